#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

#include "mwgl/graph.hpp"

namespace mwgl {

/// Full symmetric eigendecomposition of a factor Laplacian,
/// eigenvalues ascending.
struct FactorEigen {
  Matrix vectors;  // orthogonal, columns are eigenvectors
  Vector values;   // ascending; values(0) ~ 0 for a valid Laplacian

  int p() const { return static_cast<int>(values.size()); }
};

/// Relative threshold below which a product eigenvalue counts as zero.
/// The effective cutoff is zero_tol * max(1, lambda_max).
struct EigTolerance {
  double zero_tol = 1e-9;

  double cutoff(double lambda_max) const {
    return zero_tol * std::max(1.0, lambda_max);
  }
};

inline FactorEigen factor_eigendecomposition(const Matrix& L) {
  if (L.rows() != L.cols())
    throw InvalidInput("factor_eigendecomposition: matrix must be square");
  if (!L.allFinite())
    throw InvalidInput("factor_eigendecomposition: non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(L);
  if (es.info() != Eigen::Success)
    throw InvalidInput("factor_eigendecomposition: eigensolver failed");
  return FactorEigen{es.eigenvectors(), es.eigenvalues()};
}

/// All pairwise sums lambda1_i + lambda2_j: the spectrum of the Kronecker
/// sum L1 (+) L2, ascending.
inline Vector product_spectrum(const FactorEigen& eig1,
                               const FactorEigen& eig2) {
  const int p1 = eig1.p(), p2 = eig2.p();
  Vector out(static_cast<std::int64_t>(p1) * p2);
  std::int64_t k = 0;
  for (int i = 0; i < p1; ++i)
    for (int j = 0; j < p2; ++j) out(k++) = eig1.values(i) + eig2.values(j);
  std::sort(out.data(), out.data() + out.size());
  return out;
}

namespace detail {

inline double product_lambda_max(const FactorEigen& eig1,
                                 const FactorEigen& eig2) {
  return eig1.values(eig1.p() - 1) + eig2.values(eig2.p() - 1);
}

/// Number of factor eigenvalues at or below the product-level cutoff.
/// Exactly one per factor means both factors (and hence the product)
/// are connected.
inline std::pair<int, int> zero_counts(const FactorEigen& eig1,
                                       const FactorEigen& eig2,
                                       const EigTolerance& tol) {
  const double cut = tol.cutoff(product_lambda_max(eig1, eig2));
  int z1 = 0, z2 = 0;
  for (int i = 0; i < eig1.p(); ++i)
    if (eig1.values(i) <= cut) ++z1;
  for (int j = 0; j < eig2.p(); ++j)
    if (eig2.values(j) <= cut) ++z2;
  return {z1, z2};
}

inline void require_connected(const FactorEigen& eig1, const FactorEigen& eig2,
                              const EigTolerance& tol) {
  if (eig1.p() * eig2.p() < 2)
    throw DisconnectedGraph("degenerate single-node product graph");
  auto [z1, z2] = zero_counts(eig1, eig2, tol);
  if (z1 * z2 != 1)
    throw DisconnectedGraph(
        "product graph is disconnected (" + std::to_string(z1 * z2) +
        " near-zero eigenvalues); factor zero counts: " + std::to_string(z1) +
        ", " + std::to_string(z2));
}

}  // namespace detail

/// log of the pseudo-determinant of L1 (+) L2: sum of log(lambda1_i +
/// lambda2_j) over the p1*p2 - 1 nonzero pairwise sums. Throws
/// DisconnectedGraph when more than one pairwise sum falls below the cutoff.
inline double product_pseudo_logdet(const FactorEigen& eig1,
                                    const FactorEigen& eig2,
                                    const EigTolerance& tol = {}) {
  detail::require_connected(eig1, eig2, tol);
  const double cut = tol.cutoff(detail::product_lambda_max(eig1, eig2));
  double acc = 0.0;
  for (int i = 0; i < eig1.p(); ++i)
    for (int j = 0; j < eig2.p(); ++j) {
      const double s = eig1.values(i) + eig2.values(j);
      if (s > cut) acc += std::log(s);
    }
  return acc;
}

/// Mode-wise covariances of the product-graph model N(0, (L1 (+) L2)^+):
/// first  = sum_l (I (x) e_l)^T (L1 (+) L2)^+ (I (x) e_l)   (p1 x p1),
/// second = the symmetric mode-2 compression                (p2 x p2).
/// Computed on the factor scale from the factor spectra; the single zero
/// product eigenvalue contributes nothing (pseudo-inverse).
inline std::pair<Matrix, Matrix> model_mode_covariances(
    const FactorEigen& eig1, const FactorEigen& eig2,
    const EigTolerance& tol = {}) {
  detail::require_connected(eig1, eig2, tol);
  const int p1 = eig1.p(), p2 = eig2.p();
  const double cut = tol.cutoff(detail::product_lambda_max(eig1, eig2));

  Vector d1 = Vector::Zero(p1);  // sum over l of (Lambda1 + lambda2_l I)^+
  Vector d2 = Vector::Zero(p2);
  for (int i = 0; i < p1; ++i)
    for (int j = 0; j < p2; ++j) {
      const double s = eig1.values(i) + eig2.values(j);
      if (s <= cut) continue;
      d1(i) += 1.0 / s;
      d2(j) += 1.0 / s;
    }
  Matrix m1 = eig1.vectors * d1.asDiagonal() * eig1.vectors.transpose();
  Matrix m2 = eig2.vectors * d2.asDiagonal() * eig2.vectors.transpose();
  return {std::move(m1), std::move(m2)};
}

/// Same mode covariances computed the direct way: assemble the dense
/// p1p2 x p1p2 Kronecker sum, take its pseudo-inverse via the connected-
/// graph identity L^+ = (L + J)^{-1} - J, and compress each mode. Serves
/// as the oracle for model_mode_covariances and as the cost baseline the
/// factor-scale route is measured against.
inline std::pair<Matrix, Matrix> model_mode_covariances_dense(
    const Matrix& L1, const Matrix& L2) {
  const int p1 = static_cast<int>(L1.rows());
  const int p2 = static_cast<int>(L2.rows());
  const std::int64_t p = static_cast<std::int64_t>(p1) * p2;
  if (p < 2) throw DisconnectedGraph("degenerate single-node product graph");
  if (!is_connected(project_to_laplacian_weights(L1)) ||
      !is_connected(project_to_laplacian_weights(L2)))
    throw DisconnectedGraph("a factor graph is disconnected");

  Matrix K = Matrix::Zero(p, p);
  for (int a = 0; a < p1; ++a) {
    for (int b = 0; b < p1; ++b)
      if (L1(a, b) != 0.0)
        K.block(a * p2, b * p2, p2, p2).diagonal().array() += L1(a, b);
    K.block(a * p2, a * p2, p2, p2) += L2;
  }
  K.array() += 1.0 / static_cast<double>(p);
  Eigen::LLT<Matrix> llt(K);
  if (llt.info() != Eigen::Success)
    throw DisconnectedGraph("product Laplacian plus J is not positive definite");
  Matrix pinv = llt.solve(Matrix::Identity(p, p));
  pinv.array() -= 1.0 / static_cast<double>(p);

  Matrix m1 = Matrix::Zero(p1, p1);
  for (int a = 0; a < p1; ++a)
    for (int b = 0; b < p1; ++b)
      m1(a, b) = pinv.block(a * p2, b * p2, p2, p2).trace();
  Matrix m2 = Matrix::Zero(p2, p2);
  for (int a = 0; a < p1; ++a) m2 += pinv.block(a * p2, a * p2, p2, p2);
  return {std::move(m1), std::move(m2)};
}

}  // namespace mwgl
