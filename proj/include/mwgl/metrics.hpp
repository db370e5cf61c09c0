#pragma once

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "mwgl/graph.hpp"

namespace mwgl {

/// One measurement of a learn-from-n-samples trial.
struct RatePoint {
  int n = 0;
  int p = 0;
  int p1 = 0;
  int p2 = 0;
  double rel_err = 0.0;
};

struct RateFit {
  double c = 0.0;           // rel_err ~ c * sqrt(log p / (n * min(p1,p2)))
  double r_squared = 0.0;   // uncentered, through-origin fit
  double slope_log_n = 0.0; // OLS slope of log(rel_err) on log(n)
};

/// Rescales L so its trace equals target.
inline Matrix trace_normalize(const Matrix& L, double target) {
  const double tr = L.trace();
  if (!(tr > 0)) throw ZeroTrace("trace_normalize: nonpositive trace");
  return (target / tr) * L;
}

/// Frobenius relative error between two Laplacians after normalizing both
/// traces to target. Invariant to positive rescaling of either argument.
inline double relative_error(const Matrix& estimate, const Matrix& truth,
                             double target) {
  if (estimate.rows() != truth.rows() || estimate.cols() != truth.cols())
    throw InvalidInput("relative_error: dimension mismatch");
  const Matrix en = trace_normalize(estimate, target);
  const Matrix tn = trace_normalize(truth, target);
  return (en - tn).norm() / tn.norm();
}

/// Area under the precision-recall curve of thresholded edge recovery.
/// Predictions are {score >= rho} with rho swept over the unique scores
/// descending, plus the empty set (rho = infinity); ties enter together.
/// Trapezoidal integration in recall; the recall-0 anchor takes the
/// precision of the top-ranked prediction set.
inline double pr_auc(const WeightVector& scores, const WeightVector& truth) {
  scores.validate();
  truth.validate();
  if (scores.w.size() != truth.w.size())
    throw InvalidInput("pr_auc: length mismatch");
  const std::int64_t m = truth.w.size();
  std::int64_t positives = 0;
  for (std::int64_t l = 0; l < m; ++l)
    if (truth.w(l) > 0) ++positives;
  if (positives == 0 || positives == m)
    throw DegenerateSupport("pr_auc: truth has no edges or only edges");

  std::vector<std::int64_t> order(m);
  for (std::int64_t l = 0; l < m; ++l) order[l] = l;
  std::sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return scores.w(a) > scores.w(b);
  });

  std::vector<double> precision, recall;
  std::int64_t tp = 0, predicted = 0;
  std::int64_t i = 0;
  while (i < m) {
    std::int64_t j = i;  // group of tied scores enters at one threshold
    while (j < m && scores.w(order[j]) == scores.w(order[i])) {
      if (truth.w(order[j]) > 0) ++tp;
      ++predicted;
      ++j;
    }
    precision.push_back(static_cast<double>(tp) / predicted);
    recall.push_back(static_cast<double>(tp) / positives);
    i = j;
  }

  double auc = 0.0;
  double prev_recall = 0.0, prev_precision = precision.front();
  for (std::size_t k = 0; k < precision.size(); ++k) {
    auc += 0.5 * (precision[k] + prev_precision) * (recall[k] - prev_recall);
    prev_recall = recall[k];
    prev_precision = precision[k];
  }
  return auc;
}

/// Through-origin least squares of rel_err on sqrt(log p / (n min(p1,p2)))
/// plus the log-log slope in n. Needs two points with distinct n.
inline RateFit fit_rate_constant(const std::vector<RatePoint>& points) {
  std::vector<int> distinct;
  for (const RatePoint& pt : points)
    if (std::find(distinct.begin(), distinct.end(), pt.n) == distinct.end())
      distinct.push_back(pt.n);
  if (distinct.size() < 2)
    throw InsufficientPoints("fit_rate_constant: need >= 2 distinct n");
  for (const RatePoint& pt : points) {
    if (pt.n < 1 || pt.p < 2 || pt.p1 < 1 || pt.p2 < 1 || !(pt.rel_err > 0))
      throw InvalidInput("fit_rate_constant: invalid point");
  }

  double su2 = 0.0, suy = 0.0, sy2 = 0.0;
  for (const RatePoint& pt : points) {
    const double u = std::sqrt(std::log(static_cast<double>(pt.p)) /
                               (static_cast<double>(pt.n) * std::min(pt.p1, pt.p2)));
    su2 += u * u;
    suy += u * pt.rel_err;
    sy2 += pt.rel_err * pt.rel_err;
  }
  RateFit fit;
  fit.c = suy / su2;
  double ss_res = 0.0;
  for (const RatePoint& pt : points) {
    const double u = std::sqrt(std::log(static_cast<double>(pt.p)) /
                               (static_cast<double>(pt.n) * std::min(pt.p1, pt.p2)));
    const double r = pt.rel_err - fit.c * u;
    ss_res += r * r;
  }
  fit.r_squared = sy2 > 0 ? 1.0 - ss_res / sy2 : 1.0;

  // OLS slope of log(rel_err) against log(n)
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double count = static_cast<double>(points.size());
  for (const RatePoint& pt : points) {
    const double x = std::log(static_cast<double>(pt.n));
    const double y = std::log(pt.rel_err);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  fit.slope_log_n = (count * sxy - sx * sy) / (count * sxx - sx * sx);
  return fit;
}

}  // namespace mwgl
