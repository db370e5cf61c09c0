#pragma once

#include <utility>
#include <vector>

#include "mwgl/solver.hpp"

namespace mwgl {

/// Structural missingness pattern: entry (i1, i2) is either observed in
/// every sample or missing in every sample.
struct ObservationMask {
  int p1 = 0;
  int p2 = 0;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> observed;  // p1 x p2

  static ObservationMask all_observed(int p1, int p2) {
    ObservationMask m;
    m.p1 = p1;
    m.p2 = p2;
    m.observed.setConstant(p1, p2, true);
    return m;
  }

  bool any_missing() const { return !observed.all(); }
  std::int64_t missing_count() const {
    return static_cast<std::int64_t>(observed.size()) - observed.count();
  }

  void validate() const {
    if (p1 < 1 || p2 < 1) throw InvalidInput("ObservationMask: empty dimensions");
    if (observed.rows() != p1 || observed.cols() != p2)
      throw InvalidInput("ObservationMask: shape mismatch");
    if (!observed.any())
      throw InvalidInput("ObservationMask: no observed entries");
  }
};

struct ImputationConfig : SolverConfig {
  double beta = 1.0;  // Tikhonov trade-off

  void validate() const {
    SolverConfig::validate();
    if (beta <= 0) throw InvalidInput("ImputationConfig: beta must be > 0");
  }
};

/// Fills each missing entry with the mean of the observed entries sharing
/// its row or column. Observed entries pass through untouched.
inline SignalSet initial_impute(const SignalSet& signals,
                                const ObservationMask& mask) {
  signals.validate();
  mask.validate();
  if (mask.p1 != signals.p1 || mask.p2 != signals.p2)
    throw InvalidInput("initial_impute: mask/signal shape mismatch");
  SignalSet out = signals;
  for (int r1 = 0; r1 < mask.p1; ++r1)
    for (int r2 = 0; r2 < mask.p2; ++r2) {
      if (mask.observed(r1, r2)) continue;
      std::vector<std::pair<int, int>> neighbors;
      for (int j = 0; j < mask.p2; ++j)
        if (mask.observed(r1, j)) neighbors.emplace_back(r1, j);
      for (int i = 0; i < mask.p1; ++i)
        if (mask.observed(i, r2)) neighbors.emplace_back(i, r2);
      if (neighbors.empty())
        throw EmptyNeighborhood("node (" + std::to_string(r1 + 1) + "," +
                                std::to_string(r2 + 1) +
                                ") has no observed row or column neighbor");
      for (Matrix& x : out.data) {
        double acc = 0.0;
        for (auto [i, j] : neighbors) acc += x(i, j);
        x(r1, r2) = acc / neighbors.size();
      }
    }
  return out;
}

/// Mode covariances from the clean fibers only: s1 over fully observed
/// columns, s2 over fully observed rows. Initialization-only statistics;
/// throws NoCleanFiber when either set is empty.
inline ModeCovariances masked_mode_covariances(const SignalSet& signals,
                                               const ObservationMask& mask) {
  signals.validate();
  mask.validate();
  if (mask.p1 != signals.p1 || mask.p2 != signals.p2)
    throw InvalidInput("masked_mode_covariances: mask/signal shape mismatch");
  std::vector<int> clean_cols, clean_rows;
  for (int j = 0; j < mask.p2; ++j)
    if (mask.observed.col(j).all()) clean_cols.push_back(j);
  for (int i = 0; i < mask.p1; ++i)
    if (mask.observed.row(i).all()) clean_rows.push_back(i);
  if (clean_cols.empty() || clean_rows.empty())
    throw NoCleanFiber("no fully observed column or row");

  Matrix s1 = Matrix::Zero(signals.p1, signals.p1);
  Matrix s2 = Matrix::Zero(signals.p2, signals.p2);
  for (const Matrix& x : signals.data) {
    Matrix xc(signals.p1, static_cast<int>(clean_cols.size()));
    for (std::size_t c = 0; c < clean_cols.size(); ++c)
      xc.col(c) = x.col(clean_cols[c]);
    s1.noalias() += xc * xc.transpose();
    Matrix xr(static_cast<int>(clean_rows.size()), signals.p2);
    for (std::size_t r = 0; r < clean_rows.size(); ++r)
      xr.row(r) = x.row(clean_rows[r]);
    s2.noalias() += xr.transpose() * xr;
  }
  const double inv_n = 1.0 / signals.n();
  return ModeCovariances{s1 * inv_n, s2 * inv_n};
}

namespace detail {

/// (beta L + I)^{-1} applied through an eigenbasis.
inline Matrix tikhonov_filter(const FactorEigen& eig, double beta) {
  const Vector gain = (beta * eig.values.array() + 1.0).inverse();
  return eig.vectors * gain.asDiagonal() * eig.vectors.transpose();
}

/// One alternating Tikhonov pass. Filters each sample on both modes and
/// overwrites only the missing entries; the intermediate row-filtered
/// matrix is kept whole.
inline void refine_missing(std::vector<Matrix>& data,
                           const ObservationMask& mask, const FactorEigen& eig1,
                           const FactorEigen& eig2, double beta) {
  const Matrix f1 = tikhonov_filter(eig1, beta);
  const Matrix f2 = tikhonov_filter(eig2, beta);
  for (Matrix& x : data) {
    const Matrix filtered = f1 * x * f2;
    for (int i = 0; i < mask.p1; ++i)
      for (int j = 0; j < mask.p2; ++j)
        if (!mask.observed(i, j)) x(i, j) = filtered(i, j);
  }
}

}  // namespace detail

/// Applies the two factor low-pass filters (beta L_i + I)^{-1} to every
/// sample and replaces the missing entries with the filtered values.
/// beta = 0 is the identity.
inline SignalSet tikhonov_refine(const SignalSet& signals,
                                 const ObservationMask& mask,
                                 const WeightVector& g1, const WeightVector& g2,
                                 double beta) {
  signals.validate();
  mask.validate();
  if (beta < 0) throw InvalidInput("tikhonov_refine: beta must be >= 0");
  if (mask.p1 != signals.p1 || mask.p2 != signals.p2 || g1.p != signals.p1 ||
      g2.p != signals.p2)
    throw InvalidInput("tikhonov_refine: shape mismatch");
  SignalSet out = signals;
  if (beta == 0.0) return out;
  const FactorEigen eig1 = factor_eigendecomposition(laplacian_from_weights(g1));
  const FactorEigen eig2 = factor_eigendecomposition(laplacian_from_weights(g2));
  detail::refine_missing(out.data, mask, eig1, eig2, beta);
  return out;
}

struct MissingSolveResult {
  SolveResult result;
  SignalSet imputed;
};

/// Joint learning and imputation: bootstrap the factors from clean fibers
/// (falling back to row/column-mean imputation when none exist), then
/// alternate one Tikhonov refinement of the missing entries with one PGD
/// update per iteration. With an empty missing set this reduces exactly to
/// the fully observed solver.
inline MissingSolveResult solve_with_missing(const SignalSet& signals,
                                             const ObservationMask& mask,
                                             const ImputationConfig& cfg = {}) {
  cfg.validate();
  mask.validate();
  if (mask.p1 != signals.p1 || mask.p2 != signals.p2)
    throw InvalidInput("solve_with_missing: mask/signal shape mismatch");

  SignalSet filled = initial_impute(signals, mask);
  std::pair<WeightVector, WeightVector> init = [&] {
    try {
      return initialize_weights(masked_mode_covariances(signals, mask));
    } catch (const NoCleanFiber&) {
      return initialize_weights(mode_covariances(filled));
    }
  }();

  detail::IterationHook hook = [&](const FactorEigen& eig1,
                                   const FactorEigen& eig2, Vector& adj1,
                                   Vector& adj2) {
    if (mask.any_missing())
      detail::refine_missing(filled.data, mask, eig1, eig2, cfg.beta);
    const ModeCovariances S = mode_covariances(filled);
    adj1 = laplacian_adjoint(S.s1);
    adj2 = laplacian_adjoint(S.s2);
  };

  MissingSolveResult out;
  out.result = detail::pgd_loop(std::move(init.first), std::move(init.second),
                                cfg, hook);
  out.imputed = std::move(filled);
  return out;
}

}  // namespace mwgl
