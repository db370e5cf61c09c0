#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "mwgl/spectral.hpp"

namespace mwgl {

namespace detail {

/// splitmix64 finalizer; derives independent per-sample seeds from
/// (seed, k) so samples can be produced in any order.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

/// n two-way signals X_k of shape p1 x p2. Flat (vectorized) node index of
/// entry (i1, i2) is i1 * p2 + i2.
struct SignalSet {
  int p1 = 0;
  int p2 = 0;
  std::vector<Matrix> data;

  int n() const { return static_cast<int>(data.size()); }

  void validate() const {
    if (p1 < 1 || p2 < 1) throw InvalidInput("SignalSet: empty dimensions");
    for (const Matrix& x : data) {
      if (x.rows() != p1 || x.cols() != p2)
        throw InvalidInput("SignalSet: sample shape mismatch");
      if (!x.allFinite()) throw InvalidInput("SignalSet: non-finite entries");
    }
  }
};

/// Mode-wise sample covariances of two-way signals:
/// s1 = (1/n) sum X_k X_k^T, s2 = (1/n) sum X_k^T X_k.
/// Both traces equal (1/n) sum ||X_k||_F^2.
struct ModeCovariances {
  Matrix s1;
  Matrix s2;
};

/// Draws n signals from the improper GMRF N(0, (L1 (+) L2)^+), i.e. white
/// noise passed through the low-pass filter sqrt(L^+): reshape z ~ N(0, I)
/// as Z (p1 x p2), scale the (i, j) spectral coefficient by
/// 1/sqrt(lambda1_i + lambda2_j) (zero at the single zero mode), and map
/// back with the factor eigenbases. Every sample is exactly orthogonal to
/// the constant vector.
inline SignalSet sample_igmrf(const ProductModel& model, int n,
                              std::uint64_t seed,
                              const EigTolerance& tol = {}) {
  if (n < 1) throw InvalidInput("sample_igmrf: n must be >= 1");
  const FactorEigen eig1 =
      factor_eigendecomposition(laplacian_from_weights(model.g1));
  const FactorEigen eig2 =
      factor_eigendecomposition(laplacian_from_weights(model.g2));
  detail::require_connected(eig1, eig2, tol);
  const int p1 = model.p1(), p2 = model.p2();
  const double cut = tol.cutoff(detail::product_lambda_max(eig1, eig2));

  Matrix gain(p1, p2);
  for (int i = 0; i < p1; ++i)
    for (int j = 0; j < p2; ++j) {
      const double s = eig1.values(i) + eig2.values(j);
      gain(i, j) = s > cut ? 1.0 / std::sqrt(s) : 0.0;
    }

  SignalSet out;
  out.p1 = p1;
  out.p2 = p2;
  out.data.resize(n);
  for (int k = 0; k < n; ++k) {
    std::mt19937_64 rng(detail::derive_seed(seed, static_cast<std::uint64_t>(k)));
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix z(p1, p2);
    for (int i = 0; i < p1; ++i)
      for (int j = 0; j < p2; ++j) z(i, j) = normal(rng);
    out.data[k] = eig1.vectors * gain.cwiseProduct(z) * eig2.vectors.transpose();
  }
  return out;
}

inline ModeCovariances mode_covariances(const SignalSet& signals) {
  signals.validate();
  if (signals.n() < 1) throw InvalidInput("mode_covariances: empty SignalSet");
  Matrix s1 = Matrix::Zero(signals.p1, signals.p1);
  Matrix s2 = Matrix::Zero(signals.p2, signals.p2);
  for (const Matrix& x : signals.data) {
    s1.noalias() += x * x.transpose();
    s2.noalias() += x.transpose() * x;
  }
  const double inv_n = 1.0 / signals.n();
  return ModeCovariances{s1 * inv_n, s2 * inv_n};
}

/// Sample covariance of the row-major vectorized signals (p1p2 x p1p2).
/// Only meant for small-p validation; the solver never touches it.
inline Matrix full_sample_covariance(const SignalSet& signals) {
  signals.validate();
  if (signals.n() < 1)
    throw InvalidInput("full_sample_covariance: empty SignalSet");
  const int p = signals.p1 * signals.p2;
  Matrix scm = Matrix::Zero(p, p);
  for (const Matrix& x : signals.data) {
    // row-major vectorization; Eigen stores column-major, so flatten the
    // transpose
    const Matrix xt = x.transpose();
    Eigen::Map<const Vector> v(xt.data(), p);
    scm.noalias() += v * v.transpose();
  }
  return scm / signals.n();
}

/// Removes per-row then per-column means across the whole set (the usual
/// two-way centering for real data).
inline SignalSet center_modes(const SignalSet& signals) {
  signals.validate();
  SignalSet out = signals;
  Vector row_mean = Vector::Zero(signals.p1);
  for (const Matrix& x : out.data) row_mean += x.rowwise().mean();
  row_mean /= out.n();
  for (Matrix& x : out.data) x.colwise() -= row_mean;
  Vector col_mean = Vector::Zero(signals.p2);
  for (const Matrix& x : out.data) col_mean += x.colwise().mean().transpose();
  col_mean /= out.n();
  for (Matrix& x : out.data) x.rowwise() -= col_mean.transpose();
  return out;
}

}  // namespace mwgl
