#pragma once

#include <random>

#include "mwgl/graph.hpp"

namespace mwgl::testhelp {

/// Random connected graph: a random spanning chain plus extra edges with
/// probability extra_prob, weights Uniform(0.1, 2).
inline WeightVector random_connected(int p, std::mt19937_64& rng,
                                     double extra_prob = 0.3) {
  std::uniform_real_distribution<double> weight(0.1, 2.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> perm(p);
  for (int i = 0; i < p; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  WeightVector g = WeightVector::zeros(p);
  for (int k = 0; k + 1 < p; ++k) {
    const int a = std::max(perm[k], perm[k + 1]);
    const int b = std::min(perm[k], perm[k + 1]);
    g.w(pair_index(p, a, b)) = weight(rng);
  }
  for_each_pair(p, [&](std::int64_t l, int, int) {
    if (g.w(l) == 0.0 && unif(rng) < extra_prob) g.w(l) = weight(rng);
  });
  return g;
}

/// Dense Kronecker sum L1 (x) I + I (x) L2, written out entrywise so it
/// stays independent of the library's product construction.
inline Matrix kronecker_sum(const Matrix& L1, const Matrix& L2) {
  const int p1 = static_cast<int>(L1.rows());
  const int p2 = static_cast<int>(L2.rows());
  Matrix K = Matrix::Zero(p1 * p2, p1 * p2);
  for (int a = 0; a < p1; ++a)
    for (int b = 0; b < p1; ++b)
      for (int c = 0; c < p2; ++c) K(a * p2 + c, b * p2 + c) += L1(a, b);
  for (int a = 0; a < p1; ++a)
    for (int c = 0; c < p2; ++c)
      for (int d = 0; d < p2; ++d) K(a * p2 + c, a * p2 + d) += L2(c, d);
  return K;
}

/// Dense pseudo-inverse through a full eigendecomposition, dropping
/// eigenvalues at or below cut.
inline Matrix dense_pinv(const Matrix& M, double cut = 1e-9) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(M);
  const double scale = std::max(1.0, es.eigenvalues().maxCoeff());
  Vector inv = es.eigenvalues();
  for (int i = 0; i < inv.size(); ++i)
    inv(i) = inv(i) > cut * scale ? 1.0 / inv(i) : 0.0;
  return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace mwgl::testhelp
