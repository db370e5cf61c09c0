#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <vector>

#include "mwgl/errors.hpp"

namespace mwgl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Number of node pairs (possible edges) of a p-node undirected graph.
constexpr std::int64_t pair_count(int p) {
  return static_cast<std::int64_t>(p) * (p - 1) / 2;
}

/// Index of the unordered pair (i, j), i > j, 0-based nodes, in the
/// canonical lower-triangle-by-columns ordering used by every weight
/// vector and file format in this library:
///   (1,0), (2,0), ..., (p-1,0), (2,1), (3,1), ..., (p-1,p-2).
constexpr std::int64_t pair_index(int p, int i, int j) {
  return (i - j - 1) + static_cast<std::int64_t>(j) * (2 * p - j - 1) / 2;
}

/// Calls f(l, i, j) for every pair i > j in canonical order; l runs
/// 0, 1, 2, ... consecutively.
template <typename F>
void for_each_pair(int p, F&& f) {
  std::int64_t l = 0;
  for (int j = 0; j + 1 < p; ++j)
    for (int i = j + 1; i < p; ++i) f(l++, i, j);
}

/// Nonnegative edge weights of a p-node graph in canonical pair order.
struct WeightVector {
  int p = 0;
  Vector w;

  WeightVector() = default;
  WeightVector(int p_, Vector w_) : p(p_), w(std::move(w_)) {}

  static WeightVector zeros(int p_) {
    return WeightVector(p_, Vector::Zero(pair_count(p_)));
  }

  void validate() const {
    if (p < 1) throw InvalidInput("WeightVector: node count must be >= 1");
    if (w.size() != pair_count(p))
      throw InvalidInput("WeightVector: expected " +
                         std::to_string(pair_count(p)) + " weights for p=" +
                         std::to_string(p) + ", got " +
                         std::to_string(w.size()));
    if ((w.array() < 0).any())
      throw InvalidInput("WeightVector: negative weight");
  }
};

/// Two factor graphs whose Cartesian product is the model graph.
/// Product node (i1, i2) maps to the flat index i1 * p2 + i2 (0-based),
/// i.e. signals are vectorized row-major.
struct ProductModel {
  WeightVector g1;
  WeightVector g2;

  int p1() const { return g1.p; }
  int p2() const { return g2.p; }
  int nodes() const { return g1.p * g2.p; }
};

/// Combinatorial graph Laplacian of a weight vector: -w on off-diagonals,
/// row sums zero.
inline Matrix laplacian_from_weights(const WeightVector& g) {
  g.validate();
  Matrix L = Matrix::Zero(g.p, g.p);
  for_each_pair(g.p, [&](std::int64_t l, int i, int j) {
    const double wij = g.w(l);
    L(i, j) = -wij;
    L(j, i) = -wij;
    L(i, i) += wij;
    L(j, j) += wij;
  });
  return L;
}

/// Adjoint of laplacian_from_weights: maps a square matrix Q to the vector
/// with entries Q(i,i) - Q(i,j) - Q(j,i) + Q(j,j) in canonical pair order,
/// so that <Lw, Q> = <w, adjoint(Q)> for all w, Q.
inline Vector laplacian_adjoint(const Matrix& Q) {
  if (Q.rows() != Q.cols())
    throw InvalidInput("laplacian_adjoint: matrix must be square");
  const int p = static_cast<int>(Q.rows());
  Vector out(pair_count(p));
  for_each_pair(p, [&](std::int64_t l, int i, int j) {
    out(l) = Q(i, i) - Q(i, j) - Q(j, i) + Q(j, j);
  });
  return out;
}

/// Weight vector of the Cartesian product G1 x G2 on p1*p2 nodes: factor-1
/// edges replicate across every second-factor node and vice versa, so the
/// product Laplacian equals L1 (+) L2 (Kronecker sum) under the row-major
/// node pairing.
inline WeightVector product_weights(const WeightVector& g1,
                                    const WeightVector& g2) {
  g1.validate();
  g2.validate();
  const int p1 = g1.p, p2 = g2.p;
  WeightVector out = WeightVector::zeros(p1 * p2);
  // (i1, c) ~ (j1, c) with weight W1(i1, j1)
  for_each_pair(p1, [&](std::int64_t l, int i1, int j1) {
    if (g1.w(l) == 0.0) return;
    for (int c = 0; c < p2; ++c)
      out.w(pair_index(p1 * p2, i1 * p2 + c, j1 * p2 + c)) = g1.w(l);
  });
  // (r, i2) ~ (r, j2) with weight W2(i2, j2)
  for_each_pair(p2, [&](std::int64_t l, int i2, int j2) {
    if (g2.w(l) == 0.0) return;
    for (int r = 0; r < p1; ++r)
      out.w(pair_index(p1 * p2, r * p2 + i2, r * p2 + j2)) = g2.w(l);
  });
  return out;
}

/// True iff M is symmetric with zero row sums and nonpositive off-diagonal
/// entries, all within tol (absolute, after scaling by max(1, ||M||_F)).
inline bool is_laplacian(const Matrix& M, double tol) {
  if (M.rows() != M.cols()) return false;
  const int p = static_cast<int>(M.rows());
  const double scale = std::max(1.0, M.norm());
  const double bound = tol * scale;
  for (int i = 0; i < p; ++i) {
    if (std::abs(M.row(i).sum()) > bound) return false;
    for (int j = 0; j < p; ++j) {
      if (i == j) continue;
      if (std::abs(M(i, j) - M(j, i)) > bound) return false;
      if (M(i, j) > bound) return false;
    }
  }
  return true;
}

/// Clamp the negated strict lower triangle of M to nonnegative weights:
/// w_ij = max(0, -M(i,j)) for i > j. Used to read edges off an estimated
/// precision matrix.
inline WeightVector project_to_laplacian_weights(const Matrix& M) {
  if (M.rows() != M.cols())
    throw InvalidInput("project_to_laplacian_weights: matrix must be square");
  const int p = static_cast<int>(M.rows());
  WeightVector out = WeightVector::zeros(p);
  for_each_pair(p, [&](std::int64_t l, int i, int j) {
    out.w(l) = std::max(0.0, -M(i, j));
  });
  return out;
}

/// Structural connectivity: BFS over the strictly positive weights.
inline bool is_connected(const WeightVector& g) {
  g.validate();
  const int p = g.p;
  if (p <= 1) return true;
  std::vector<std::vector<int>> adj(p);
  for_each_pair(p, [&](std::int64_t l, int i, int j) {
    if (g.w(l) > 0.0) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  });
  std::vector<char> seen(p, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : adj[v])
      if (!seen[u]) {
        seen[u] = 1;
        ++count;
        stack.push_back(u);
      }
  }
  return count == p;
}

}  // namespace mwgl
