#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mwgl/io.hpp"
#include "mwgl/metrics.hpp"
#include "mwgl/missing.hpp"
#include "mwgl/solver.hpp"
#include "mwgl/synth.hpp"

namespace mwgl {

/// Structural-missingness request for a sweep. "block" removes the
/// bottom-right fraction of the grid (rows from some r1 on, columns from
/// some i2 on); "random" removes uniformly chosen nodes.
struct MaskSpec {
  double fraction = 0.25;
  std::string pattern = "block";  // "block" | "random"

  void validate() const {
    if (fraction <= 0 || fraction >= 1)
      throw InvalidInput("MaskSpec: fraction must be in (0,1)");
    if (pattern != "block" && pattern != "random")
      throw InvalidInput("MaskSpec: pattern must be block or random");
  }
};

/// Everything one seeded sweep needs: the two factor recipes, the sample
/// counts, the realization seeds, solver settings, and optionally a grid
/// of alpha values selected once at a pilot n.
struct ExperimentManifest {
  std::string experiment_id = "experiment";
  GraphRecipe factor1;
  GraphRecipe factor2;
  std::vector<int> n_list;
  std::vector<std::uint64_t> seeds;
  SolverConfig solver;
  double beta = 1.0;
  std::optional<MaskSpec> mask;
  std::vector<double> alpha_grid;
  std::optional<int> alpha_select_n;
  std::string output_dir = "out";

  void validate() const {
    factor1.validate();
    factor2.validate();
    solver.validate();
    if (mask) mask->validate();
    if (n_list.empty()) throw InvalidInput("manifest: n_list is empty");
    if (seeds.empty()) throw InvalidInput("manifest: seeds is empty");
    for (int n : n_list)
      if (n < 1) throw InvalidInput("manifest: n must be >= 1");
    if (!alpha_grid.empty() && !alpha_select_n)
      throw InvalidInput("manifest: alpha_grid needs alpha_select_n");
    if (beta <= 0) throw InvalidInput("manifest: beta must be > 0");
  }
};

namespace detail {

// Fixed tags for deriving the independent streams of one realization.
inline constexpr std::uint64_t kTagFactor1 = 101;
inline constexpr std::uint64_t kTagFactor2 = 102;
inline constexpr std::uint64_t kTagSignals = 103;
inline constexpr std::uint64_t kTagMask = 104;

}  // namespace detail

/// The true factor pair of one realization. The same realization seed
/// always yields the same graphs, independent of n.
inline ProductModel realize_model(const ExperimentManifest& m,
                                  std::uint64_t seed) {
  GraphRecipe r1 = m.factor1;
  GraphRecipe r2 = m.factor2;
  r1.seed = detail::derive_seed(seed, detail::kTagFactor1);
  r2.seed = detail::derive_seed(seed, detail::kTagFactor2);
  return ProductModel{generate_factor(r1), generate_factor(r2)};
}

inline std::uint64_t signal_seed(std::uint64_t realization_seed, int n) {
  return detail::derive_seed(detail::derive_seed(realization_seed,
                                                 detail::kTagSignals),
                             static_cast<std::uint64_t>(n));
}

/// Builds the structural mask for one realization. Block masks are
/// deterministic; random masks reject nodes that would leave a missing
/// node with no observed row or column neighbor.
inline ObservationMask realize_mask(const MaskSpec& spec, int p1, int p2,
                                    std::uint64_t seed) {
  spec.validate();
  ObservationMask mask = ObservationMask::all_observed(p1, p2);
  const auto total = static_cast<std::int64_t>(p1) * p2;
  const auto target = static_cast<std::int64_t>(spec.fraction * total + 0.5);
  if (spec.pattern == "block") {
    // bottom-right block: fraction f of rows times fraction f of columns
    // is not f of the grid, so split the fraction evenly between modes
    const double side = std::sqrt(spec.fraction);
    const int mr = std::max(1, static_cast<int>(p1 * side + 0.5));
    const int mc = std::max(1, static_cast<int>(p2 * side + 0.5));
    if (mr >= p1 || mc >= p2)
      throw InvalidInput("MaskSpec: block fraction too large for grid");
    for (int i = p1 - mr; i < p1; ++i)
      for (int j = p2 - mc; j < p2; ++j) mask.observed(i, j) = false;
    return mask;
  }
  std::mt19937_64 rng(detail::derive_seed(seed, detail::kTagMask));
  std::uniform_int_distribution<int> pick_row(0, p1 - 1);
  std::uniform_int_distribution<int> pick_col(0, p2 - 1);
  std::int64_t removed = 0;
  int guard = 0;
  while (removed < target && guard < 100000) {
    ++guard;
    const int i = pick_row(rng);
    const int j = pick_col(rng);
    if (!mask.observed(i, j)) continue;
    mask.observed(i, j) = false;
    const bool row_ok = mask.observed.row(i).any();
    const bool col_ok = mask.observed.col(j).any();
    if (!row_ok && !col_ok) {
      mask.observed(i, j) = true;  // would strand the node
      continue;
    }
    ++removed;
  }
  return mask;
}

struct TrialResult {
  io::MetricsRow row;
  bool ok = false;
  std::string error;
};

/// Runs one (seed, n) trial: generate truth, sample, learn, evaluate.
/// Rel-Err uses the trace targets p1, p2 and 2 p1 p2; PR-AUC scores the
/// learned product weights against the true product support.
inline TrialResult run_trial(const ExperimentManifest& m, std::uint64_t seed,
                             int n, const SolverConfig& solver) {
  TrialResult out;
  out.row.experiment_id = m.experiment_id;
  out.row.n = n;
  out.row.seed = seed;
  try {
    const ProductModel truth = realize_model(m, seed);
    out.row.p1 = truth.p1();
    out.row.p2 = truth.p2();
    const SignalSet signals = sample_igmrf(truth, n, signal_seed(seed, n));

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult res;
    if (m.mask) {
      ImputationConfig icfg;
      static_cast<SolverConfig&>(icfg) = solver;
      icfg.beta = m.beta;
      const ObservationMask mask =
          realize_mask(*m.mask, truth.p1(), truth.p2(), seed);
      res = solve_with_missing(signals, mask, icfg).result;
    } else {
      res = solve(signals, solver);
    }
    const auto t1 = std::chrono::steady_clock::now();

    const Matrix l1_hat = laplacian_from_weights(res.w1);
    const Matrix l2_hat = laplacian_from_weights(res.w2);
    const Matrix l1_true = laplacian_from_weights(truth.g1);
    const Matrix l2_true = laplacian_from_weights(truth.g2);
    const WeightVector w_hat = product_weights(res.w1, res.w2);
    const WeightVector w_true = product_weights(truth.g1, truth.g2);

    out.row.rel_err_f1 = relative_error(l1_hat, l1_true, truth.p1());
    out.row.rel_err_f2 = relative_error(l2_hat, l2_true, truth.p2());
    out.row.rel_err_product =
        relative_error(laplacian_from_weights(w_hat),
                       laplacian_from_weights(w_true), 2.0 * truth.nodes());
    out.row.pr_auc = pr_auc(w_hat, w_true);
    out.row.iterations = res.iterations;
    out.row.wall_ms =
        std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.ok = true;
  } catch (const Error& e) {
    out.error = e.what();
  }
  return out;
}

struct BenchmarkReport {
  std::vector<io::MetricsRow> rows;  // successful trials, sorted
  std::vector<std::string> failures;
  double chosen_alpha = 0.0;
  RateFit fit;
  bool fit_valid = false;
};

namespace detail {

template <typename Task>
void run_parallel(std::vector<Task>& tasks, int jobs) {
  jobs = std::max(1, jobs);
  if (jobs == 1 || tasks.size() <= 1) {
    for (Task& t : tasks) t();
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= tasks.size()) return;
      tasks[idx]();
    }
  };
  std::vector<std::thread> pool;
  const int count = std::min<int>(jobs, static_cast<int>(tasks.size()));
  pool.reserve(count);
  for (int t = 0; t < count; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
}

}  // namespace detail

/// Full sweep: optional one-shot alpha selection at the pilot n, then all
/// (n, seed) trials, in parallel up to `jobs`. Rows come back sorted by
/// (experiment_id, n, seed); the rate fit uses the per-n mean Rel-Err.
inline BenchmarkReport run_benchmark(const ExperimentManifest& m,
                                     int jobs = 1) {
  m.validate();
  BenchmarkReport report;
  SolverConfig solver = m.solver;

  if (!m.alpha_grid.empty()) {
    struct Cell {
      double alpha;
      std::uint64_t seed;
      TrialResult result;
    };
    std::vector<Cell> cells;
    for (double alpha : m.alpha_grid)
      for (std::uint64_t seed : m.seeds) cells.push_back({alpha, seed, {}});
    std::vector<std::function<void()>> tasks;
    tasks.reserve(cells.size());
    for (Cell& cell : cells)
      tasks.emplace_back([&m, &cell, &solver] {
        SolverConfig cfg = solver;
        cfg.alpha = cell.alpha;
        cfg.alpha1.reset();
        cfg.alpha2.reset();
        cell.result = run_trial(m, cell.seed, *m.alpha_select_n, cfg);
      });
    detail::run_parallel(tasks, jobs);

    double best_alpha = m.alpha_grid.front();
    double best_err = std::numeric_limits<double>::infinity();
    for (double alpha : m.alpha_grid) {
      double acc = 0.0;
      int count = 0;
      for (const Cell& cell : cells)
        if (cell.alpha == alpha && cell.result.ok) {
          acc += cell.result.row.rel_err_product;
          ++count;
        }
      if (count == 0) continue;
      const double mean = acc / count;
      if (mean < best_err) {
        best_err = mean;
        best_alpha = alpha;
      }
    }
    solver.alpha = best_alpha;
    solver.alpha1.reset();
    solver.alpha2.reset();
  }
  report.chosen_alpha = solver.alpha;

  std::vector<TrialResult> trials(m.n_list.size() * m.seeds.size());
  std::vector<std::function<void()>> tasks;
  tasks.reserve(trials.size());
  std::size_t idx = 0;
  for (int n : m.n_list)
    for (std::uint64_t seed : m.seeds) {
      TrialResult* slot = &trials[idx++];
      tasks.emplace_back([&m, &solver, slot, n, seed] {
        *slot = run_trial(m, seed, n, solver);
      });
    }
  detail::run_parallel(tasks, jobs);

  for (const TrialResult& t : trials) {
    if (t.ok)
      report.rows.push_back(t.row);
    else
      report.failures.push_back("trial n=" + std::to_string(t.row.n) +
                                " seed=" + std::to_string(t.row.seed) + ": " +
                                t.error);
  }
  std::sort(report.rows.begin(), report.rows.end(),
            [](const io::MetricsRow& a, const io::MetricsRow& b) {
              return std::tie(a.experiment_id, a.n, a.seed) <
                     std::tie(b.experiment_id, b.n, b.seed);
            });

  // rate fit on the per-n means
  std::vector<RatePoint> points;
  for (int n : m.n_list) {
    double acc = 0.0;
    int count = 0;
    const io::MetricsRow* sample = nullptr;
    for (const io::MetricsRow& r : report.rows)
      if (r.n == n) {
        acc += r.rel_err_product;
        ++count;
        sample = &r;
      }
    if (count > 0 && acc > 0)
      points.push_back(RatePoint{n, sample->p1 * sample->p2, sample->p1,
                                 sample->p2, acc / count});
  }
  try {
    report.fit = fit_rate_constant(points);
    report.fit_valid = true;
  } catch (const Error&) {
    report.fit_valid = false;
  }
  return report;
}

// ---------------------------------------------------------------------------
// Manifest JSON.

inline GraphRecipe recipe_from_json(const io::json& j) {
  GraphRecipe r;
  if (!j.is_object() || !j.contains("family"))
    throw IoError("recipe JSON needs a family");
  r.family = graph_family_from_string(j["family"].get<std::string>());
  if (j.contains("p")) r.p = j["p"].get<int>();
  if (j.contains("rows")) r.rows = j["rows"].get<int>();
  if (j.contains("cols")) r.cols = j["cols"].get<int>();
  if (r.family == GraphFamily::grid && r.p == 0) r.p = r.rows * r.cols;
  if (j.contains("edge_prob")) r.edge_prob = j["edge_prob"].get<double>();
  if (j.contains("rewire_prob")) r.rewire_prob = j["rewire_prob"].get<double>();
  if (j.contains("weight_low")) r.weight_low = j["weight_low"].get<double>();
  if (j.contains("weight_high")) r.weight_high = j["weight_high"].get<double>();
  if (j.contains("seed")) r.seed = j["seed"].get<std::uint64_t>();
  return r;
}

inline io::json recipe_to_json(const GraphRecipe& r) {
  io::json j;
  j["family"] = to_string(r.family);
  if (r.family == GraphFamily::grid) {
    j["rows"] = r.rows;
    j["cols"] = r.cols;
  } else {
    j["p"] = r.p;
  }
  if (r.family == GraphFamily::erdos_renyi) j["edge_prob"] = r.edge_prob;
  if (r.family == GraphFamily::watts_strogatz) j["rewire_prob"] = r.rewire_prob;
  j["weight_low"] = r.weight_low;
  j["weight_high"] = r.weight_high;
  return j;
}

inline SolverConfig solver_config_from_json(const io::json& j) {
  SolverConfig cfg;
  if (j.contains("alpha")) cfg.alpha = j["alpha"].get<double>();
  if (j.contains("alpha1") && !j["alpha1"].is_null())
    cfg.alpha1 = j["alpha1"].get<double>();
  if (j.contains("alpha2") && !j["alpha2"].is_null())
    cfg.alpha2 = j["alpha2"].get<double>();
  if (j.contains("eta")) cfg.eta = j["eta"].get<double>();
  if (j.contains("tol")) cfg.tol = j["tol"].get<double>();
  if (j.contains("max_iter")) cfg.max_iter = j["max_iter"].get<int>();
  if (j.contains("backtracking")) cfg.backtracking = j["backtracking"].get<bool>();
  cfg.validate();
  return cfg;
}

inline ExperimentManifest manifest_from_json(const io::json& j) {
  ExperimentManifest m;
  if (!j.is_object() || !j.contains("factor1") || !j.contains("factor2") ||
      !j.contains("n_list") || !j.contains("seeds"))
    throw IoError("manifest JSON needs factor1, factor2, n_list, seeds");
  if (j.contains("experiment_id"))
    m.experiment_id = j["experiment_id"].get<std::string>();
  m.factor1 = recipe_from_json(j["factor1"]);
  m.factor2 = recipe_from_json(j["factor2"]);
  m.n_list = j["n_list"].get<std::vector<int>>();
  m.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
  if (j.contains("solver")) m.solver = solver_config_from_json(j["solver"]);
  if (j.contains("beta")) m.beta = j["beta"].get<double>();
  if (j.contains("mask") && !j["mask"].is_null()) {
    MaskSpec spec;
    if (j["mask"].contains("fraction"))
      spec.fraction = j["mask"]["fraction"].get<double>();
    if (j["mask"].contains("pattern"))
      spec.pattern = j["mask"]["pattern"].get<std::string>();
    m.mask = spec;
  }
  if (j.contains("alpha_grid"))
    m.alpha_grid = j["alpha_grid"].get<std::vector<double>>();
  if (j.contains("alpha_select_n"))
    m.alpha_select_n = j["alpha_select_n"].get<int>();
  if (j.contains("output_dir")) m.output_dir = j["output_dir"].get<std::string>();
  m.validate();
  return m;
}

inline ExperimentManifest load_manifest(const std::filesystem::path& path) {
  return manifest_from_json(io::detail::parse_json_file(path));
}

}  // namespace mwgl
