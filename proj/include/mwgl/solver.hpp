#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mwgl/signals.hpp"

namespace mwgl {

struct SolverConfig {
  double alpha = 0.0;                   // global sparsity weight
  std::optional<double> alpha1;         // override; default p2 * alpha
  std::optional<double> alpha2;         // override; default p1 * alpha
  double eta = 1e-3;                    // PGD step size
  double tol = 1e-6;                    // stop when ||delta w||_inf <= tol
  int max_iter = 20000;
  bool backtracking = false;            // halve eta on objective increase
  EigTolerance eig_tol;

  void validate() const {
    if (eta <= 0) throw InvalidInput("SolverConfig: eta must be > 0");
    if (tol <= 0) throw InvalidInput("SolverConfig: tol must be > 0");
    if (max_iter < 1) throw InvalidInput("SolverConfig: max_iter must be >= 1");
    if (alpha < 0 || alpha1.value_or(0) < 0 || alpha2.value_or(0) < 0)
      throw InvalidInput("SolverConfig: penalties must be >= 0");
  }

  double effective_alpha1(int p2) const { return alpha1.value_or(p2 * alpha); }
  double effective_alpha2(int p1) const { return alpha2.value_or(p1 * alpha); }
};

struct SolveResult {
  WeightVector w1;
  WeightVector w2;
  std::vector<double> objective_trace;  // objective at iterate 0, 1, ..., T
  int iterations = 0;
  bool converged = false;
};

/// Penalized negative log-likelihood of the factor pair:
///   w1' A*S1 + w2' A*S2 - logdet+(L1 (+) L2) + a1 w1'1 + a2 w2'1,
/// where A* is the Laplacian adjoint. Throws DisconnectedGraph where the
/// likelihood is -inf.
inline double objective(const WeightVector& w1, const WeightVector& w2,
                        const ModeCovariances& S, const SolverConfig& cfg = {}) {
  cfg.validate();
  const FactorEigen eig1 = factor_eigendecomposition(laplacian_from_weights(w1));
  const FactorEigen eig2 = factor_eigendecomposition(laplacian_from_weights(w2));
  const double logdet = product_pseudo_logdet(eig1, eig2, cfg.eig_tol);
  return w1.w.dot(laplacian_adjoint(S.s1)) + w2.w.dot(laplacian_adjoint(S.s2)) -
         logdet + cfg.effective_alpha1(w2.p) * w1.w.sum() +
         cfg.effective_alpha2(w1.p) * w2.w.sum();
}

/// Analytic gradient of the objective:
///   g_i = A*S_i - A*M_i + alpha_i 1,
/// with M_i the model mode covariances of the current factor pair.
inline std::pair<Vector, Vector> gradient(const WeightVector& w1,
                                          const WeightVector& w2,
                                          const ModeCovariances& S,
                                          const SolverConfig& cfg = {}) {
  cfg.validate();
  const FactorEigen eig1 = factor_eigendecomposition(laplacian_from_weights(w1));
  const FactorEigen eig2 = factor_eigendecomposition(laplacian_from_weights(w2));
  const auto [m1, m2] = model_mode_covariances(eig1, eig2, cfg.eig_tol);
  Vector g1 = laplacian_adjoint(S.s1) - laplacian_adjoint(m1);
  Vector g2 = laplacian_adjoint(S.s2) - laplacian_adjoint(m2);
  g1.array() += cfg.effective_alpha1(w2.p);
  g2.array() += cfg.effective_alpha2(w1.p);
  return {std::move(g1), std::move(g2)};
}

/// One projected gradient step: w' = max(0, w - eta * g), both factors
/// updated from the same iterate.
inline std::pair<WeightVector, WeightVector> pgd_step(const WeightVector& w1,
                                                      const WeightVector& w2,
                                                      const ModeCovariances& S,
                                                      const SolverConfig& cfg = {}) {
  const auto [g1, g2] = gradient(w1, w2, S, cfg);
  WeightVector n1{w1.p, (w1.w - cfg.eta * g1).cwiseMax(0.0)};
  WeightVector n2{w2.p, (w2.w - cfg.eta * g2).cwiseMax(0.0)};
  return {std::move(n1), std::move(n2)};
}

/// Starting point from the mode covariances: invert each (regularized when
/// near-singular), clamp the negated lower triangle to weights, and repair
/// a disconnected result by adding epsilon0 = 1e-2 to every pair.
inline std::pair<WeightVector, WeightVector> initialize_weights(
    const ModeCovariances& S) {
  const double epsilon0 = 1e-2;
  auto init_one = [&](const Matrix& s) {
    const int p = static_cast<int>(s.rows());
    if (s.rows() != s.cols())
      throw InvalidInput("initialize_weights: covariance must be square");
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    if (es.info() != Eigen::Success)
      throw InvalidInput("initialize_weights: eigensolver failed");
    const double mean_var = s.trace() / p;
    double delta = 0.0;
    if (es.eigenvalues()(0) < 1e-10 * mean_var) delta = 1e-3 * mean_var;
    const Vector inv_vals = (es.eigenvalues().array() + delta).inverse();
    const Matrix precision =
        es.eigenvectors() * inv_vals.asDiagonal() * es.eigenvectors().transpose();
    WeightVector w = project_to_laplacian_weights(precision);
    if (!is_connected(w)) w.w.array() += epsilon0;
    return w;
  };
  return {init_one(S.s1), init_one(S.s2)};
}

namespace detail {

/// Recomputes signal-side state at the top of each iteration; used by the
/// missing-data solver to refine imputations. Receives the current factor
/// eigendecompositions and must leave adj1/adj2 = A*S1 / A*S2 up to date.
using IterationHook =
    std::function<void(const FactorEigen&, const FactorEigen&, Vector& adj1,
                       Vector& adj2)>;

inline void require_connected_iterate(const FactorEigen& eig1,
                                      const FactorEigen& eig2,
                                      const EigTolerance& tol, int iter) {
  auto [z1, z2] = zero_counts(eig1, eig2, tol);
  if (z1 * z2 == 1 && eig1.p() * eig2.p() >= 2) return;
  const std::string which = z1 > 1 ? "factor 1" : (z2 > 1 ? "factor 2" : "product");
  throw DisconnectedIterate(
      which + " became disconnected at iteration " + std::to_string(iter) +
      "; use a smaller eta or a connected initialization");
}

/// Shared PGD loop behind both solvers. Iterates
///   [hook] -> connectivity check -> objective -> model covariances ->
///   simultaneous projected update
/// until the infinity norm of the weight update falls to cfg.tol.
inline SolveResult pgd_loop(WeightVector w1, WeightVector w2,
                            const SolverConfig& cfg, const IterationHook& hook) {
  cfg.validate();
  w1.validate();
  w2.validate();
  const double a1 = cfg.effective_alpha1(w2.p);
  const double a2 = cfg.effective_alpha2(w1.p);

  SolveResult res;
  res.objective_trace.reserve(cfg.max_iter + 1);
  Vector adj1, adj2;
  double eta = cfg.eta;
  int rising = 0;  // consecutive objective increases

  FactorEigen eig1 = factor_eigendecomposition(laplacian_from_weights(w1));
  FactorEigen eig2 = factor_eigendecomposition(laplacian_from_weights(w2));

  int iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    if (hook) hook(eig1, eig2, adj1, adj2);
    require_connected_iterate(eig1, eig2, cfg.eig_tol, iter);

    const double logdet = product_pseudo_logdet(eig1, eig2, cfg.eig_tol);
    const double obj = w1.w.dot(adj1) + w2.w.dot(adj2) - logdet +
                       a1 * w1.w.sum() + a2 * w2.w.sum();
    if (!std::isfinite(obj))
      throw NonFiniteObjective("objective is not finite at iteration " +
                               std::to_string(iter));
    if (!res.objective_trace.empty() && obj > res.objective_trace.back()) {
      ++rising;
      if (cfg.backtracking) {
        eta = std::max(eta / 2.0, 1e-8);
        rising = 0;
      } else if (rising >= 25) {
        throw StepTooLarge("objective increased for 25 consecutive iterations; "
                           "reduce eta or enable backtracking");
      }
    } else {
      rising = 0;
    }
    res.objective_trace.push_back(obj);

    const auto [m1, m2] = model_mode_covariances(eig1, eig2, cfg.eig_tol);
    Vector next1 = (w1.w - eta * (adj1 - laplacian_adjoint(m1) +
                                  Vector::Constant(w1.w.size(), a1)))
                       .cwiseMax(0.0);
    Vector next2 = (w2.w - eta * (adj2 - laplacian_adjoint(m2) +
                                  Vector::Constant(w2.w.size(), a2)))
                       .cwiseMax(0.0);
    const double delta =
        std::max((next1 - w1.w).lpNorm<Eigen::Infinity>(),
                 (next2 - w2.w).lpNorm<Eigen::Infinity>());
    w1.w = std::move(next1);
    w2.w = std::move(next2);
    eig1 = factor_eigendecomposition(laplacian_from_weights(w1));
    eig2 = factor_eigendecomposition(laplacian_from_weights(w2));

    if (delta <= cfg.tol) {
      res.converged = true;
      ++iter;
      break;
    }
  }

  // objective at the final iterate, under the last refined statistics
  require_connected_iterate(eig1, eig2, cfg.eig_tol, iter);
  res.objective_trace.push_back(
      w1.w.dot(adj1) + w2.w.dot(adj2) -
      product_pseudo_logdet(eig1, eig2, cfg.eig_tol) + a1 * w1.w.sum() +
      a2 * w2.w.sum());

  res.w1 = std::move(w1);
  res.w2 = std::move(w2);
  res.iterations = iter;
  return res;
}

}  // namespace detail

/// Learns the factor graphs from precomputed mode covariances by projected
/// gradient descent on the penalized MLE.
inline SolveResult solve(const ModeCovariances& S, const SolverConfig& cfg = {},
                         std::optional<std::pair<WeightVector, WeightVector>>
                             init = std::nullopt) {
  auto [w1, w2] = init ? std::move(*init) : initialize_weights(S);
  const Vector a1 = laplacian_adjoint(S.s1);
  const Vector a2 = laplacian_adjoint(S.s2);
  bool primed = false;
  detail::IterationHook hook = [&](const FactorEigen&, const FactorEigen&,
                                   Vector& adj1, Vector& adj2) {
    if (primed) return;
    adj1 = a1;
    adj2 = a2;
    primed = true;
  };
  return detail::pgd_loop(std::move(w1), std::move(w2), cfg, hook);
}

/// Convenience overload on raw signals.
inline SolveResult solve(const SignalSet& signals, const SolverConfig& cfg = {},
                         std::optional<std::pair<WeightVector, WeightVector>>
                             init = std::nullopt) {
  return solve(mode_covariances(signals), cfg, std::move(init));
}

}  // namespace mwgl
