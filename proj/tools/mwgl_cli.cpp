// Command-line front end: generate synthetic product-graph data, learn the
// factor graphs, evaluate against ground truth, run benchmark sweeps, and
// validate file schemas.
//
// Exit codes: 0 ok, 2 bad input, 3 non-convergence, 4 disconnection, 5 I/O.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <thread>

#include "mwgl/mwgl.hpp"

namespace fs = std::filesystem;
using namespace mwgl;

namespace {

constexpr int kOk = 0;
constexpr int kBadInput = 2;
constexpr int kNoConvergence = 3;
constexpr int kDisconnected = 4;
constexpr int kIoFailure = 5;

int exit_code_for(const Error& e) {
  if (dynamic_cast<const DisconnectedGraph*>(&e)) return kDisconnected;
  if (dynamic_cast<const ConnectivityFailure*>(&e)) return kDisconnected;
  if (dynamic_cast<const IoError*>(&e)) return kIoFailure;
  if (dynamic_cast<const StepTooLarge*>(&e)) return kNoConvergence;
  if (dynamic_cast<const NonFiniteObjective*>(&e)) return kNoConvergence;
  return kBadInput;
}

struct SolverFlags {
  double alpha = 0.0;
  double alpha1 = -1.0;  // <0 means "use the default coupling"
  double alpha2 = -1.0;
  double eta = 1e-3;
  double tol = 1e-6;
  int max_iter = 20000;
  bool backtracking = false;

  void attach(CLI::App* cmd) {
    cmd->add_option("--alpha", alpha, "global sparsity weight");
    cmd->add_option("--alpha1", alpha1, "factor-1 penalty (default p2*alpha)");
    cmd->add_option("--alpha2", alpha2, "factor-2 penalty (default p1*alpha)");
    cmd->add_option("--eta", eta, "PGD step size");
    cmd->add_option("--tol", tol, "stop when the weight update is this small");
    cmd->add_option("--max-iter", max_iter, "iteration cap");
    cmd->add_flag("--backtracking", backtracking,
                  "halve eta when the objective increases");
  }

  SolverConfig to_config() const {
    SolverConfig cfg;
    cfg.alpha = alpha;
    if (alpha1 >= 0) cfg.alpha1 = alpha1;
    if (alpha2 >= 0) cfg.alpha2 = alpha2;
    cfg.eta = eta;
    cfg.tol = tol;
    cfg.max_iter = max_iter;
    cfg.backtracking = backtracking;
    return cfg;
  }
};

fs::path seed_dir(const ExperimentManifest& m, std::uint64_t seed) {
  return fs::path(m.output_dir) / m.experiment_id /
         ("seed" + std::to_string(seed));
}

int cmd_generate(const std::string& manifest_path, const std::string& out_override) {
  ExperimentManifest m = load_manifest(manifest_path);
  if (!out_override.empty()) m.output_dir = out_override;
  for (std::uint64_t seed : m.seeds) {
    const ProductModel truth = realize_model(m, seed);
    const fs::path dir = seed_dir(m, seed);
    io::save_graph(truth.g1, dir / "factor1.json");
    io::save_graph(truth.g2, dir / "factor2.json");
    io::save_graph(product_weights(truth.g1, truth.g2), dir / "product.json");
    io::save_edge_list(truth.g1, dir / "factor1_edges.csv");
    io::save_edge_list(truth.g2, dir / "factor2_edges.csv");
    if (m.mask) {
      const ObservationMask mask =
          realize_mask(*m.mask, truth.p1(), truth.p2(), seed);
      io::save_mask(mask, dir / "mask.csv");
    }
    for (int n : m.n_list) {
      const std::uint64_t sseed = signal_seed(seed, n);
      const SignalSet signals = sample_igmrf(truth, n, sseed);
      io::save_signals(signals, dir / ("n" + std::to_string(n)) / "signals.csv",
                       sseed);
    }
    std::cout << "wrote " << dir.string() << "\n";
  }
  return kOk;
}

struct LearnOutcome {
  SolveResult result;
  SolverConfig config;
};

LearnOutcome learn_once(const SignalSet& signals,
                        const std::optional<ObservationMask>& mask,
                        SolverConfig cfg, double beta,
                        SignalSet* imputed_out) {
  if (mask && mask->any_missing()) {
    ImputationConfig icfg;
    static_cast<SolverConfig&>(icfg) = cfg;
    icfg.beta = beta;
    MissingSolveResult res = solve_with_missing(signals, *mask, icfg);
    if (imputed_out) *imputed_out = std::move(res.imputed);
    return {std::move(res.result), cfg};
  }
  return {solve(signals, cfg), cfg};
}

int cmd_learn(const std::string& signals_path, const std::string& mask_path,
              const SolverFlags& flags, const std::string& alpha_grid_csv,
              double beta, bool center, const std::string& truth1,
              const std::string& truth2, const std::string& output,
              const std::string& imputed_path) {
  SignalSet signals = io::load_signals(signals_path);
  if (center) signals = center_modes(signals);

  std::optional<ObservationMask> mask;
  if (!mask_path.empty())
    mask = io::load_mask(mask_path, signals.p1, signals.p2);

  std::vector<double> grid;
  if (!alpha_grid_csv.empty()) {
    std::stringstream ss(alpha_grid_csv);
    std::string item;
    while (std::getline(ss, item, ','))
      grid.push_back(io::detail::parse_double(item, "--alpha-grid"));
    if (grid.empty()) throw InvalidInput("--alpha-grid is empty");
  }

  std::optional<std::pair<WeightVector, WeightVector>> truth;
  if (!truth1.empty() || !truth2.empty()) {
    if (truth1.empty() || truth2.empty())
      throw InvalidInput("supply both --truth-f1 and --truth-f2");
    truth = std::make_pair(io::load_graph(truth1), io::load_graph(truth2));
  }

  if (grid.empty()) {
    SignalSet imputed;
    const LearnOutcome out = learn_once(signals, mask, flags.to_config(), beta,
                                        mask ? &imputed : nullptr);
    io::save_result(out.result, out.config, output);
    if (mask && !imputed_path.empty())
      io::save_signals(imputed, imputed_path);
    std::cout << (out.result.converged ? "converged" : "hit max_iter")
              << " after " << out.result.iterations << " iterations\n";
    return out.result.converged ? kOk : kNoConvergence;
  }

  // one result file per grid value; report the best when truth is known
  io::json report;
  report["results"] = io::json::array();
  double best_err = std::numeric_limits<double>::infinity();
  double best_alpha = grid.front();
  bool all_converged = true;
  const fs::path base(output);
  for (double alpha : grid) {
    SolverConfig cfg = flags.to_config();
    cfg.alpha = alpha;
    cfg.alpha1.reset();
    cfg.alpha2.reset();
    const LearnOutcome out = learn_once(signals, mask, cfg, beta, nullptr);
    fs::path file = base;
    file.replace_extension();
    file += ".alpha" + io::detail::format_double(alpha) + ".json";
    io::save_result(out.result, out.config, file);
    all_converged &= out.result.converged;
    io::json entry;
    entry["alpha"] = alpha;
    entry["file"] = file.string();
    entry["converged"] = out.result.converged;
    if (truth) {
      const double err = relative_error(
          laplacian_from_weights(product_weights(out.result.w1, out.result.w2)),
          laplacian_from_weights(product_weights(truth->first, truth->second)),
          2.0 * signals.p1 * signals.p2);
      entry["rel_err_product"] = err;
      if (err < best_err) {
        best_err = err;
        best_alpha = alpha;
      }
    }
    report["results"].push_back(entry);
  }
  if (truth) {
    report["best_alpha"] = best_alpha;
    report["best_rel_err_product"] = best_err;
  }
  std::cout << report.dump(2) << "\n";
  return all_converged ? kOk : kNoConvergence;
}

int cmd_eval(const std::string& result_path, const std::string& truth1,
             const std::string& truth2, const std::string& csv_out,
             const std::string& id, int n, std::uint64_t seed) {
  const io::LoadedResult res = io::load_result(result_path);
  const WeightVector t1 = io::load_graph(truth1);
  const WeightVector t2 = io::load_graph(truth2);
  if (t1.p != res.w1.p || t2.p != res.w2.p)
    throw InvalidInput("truth and result dimensions disagree");

  io::MetricsRow row;
  row.experiment_id = id;
  row.n = n;
  row.p1 = t1.p;
  row.p2 = t2.p;
  row.seed = seed;
  row.rel_err_f1 = relative_error(laplacian_from_weights(res.w1),
                                  laplacian_from_weights(t1), t1.p);
  row.rel_err_f2 = relative_error(laplacian_from_weights(res.w2),
                                  laplacian_from_weights(t2), t2.p);
  const WeightVector w_hat = product_weights(res.w1, res.w2);
  const WeightVector w_true = product_weights(t1, t2);
  row.rel_err_product = relative_error(laplacian_from_weights(w_hat),
                                       laplacian_from_weights(w_true),
                                       2.0 * t1.p * t2.p);
  row.pr_auc = pr_auc(w_hat, w_true);
  row.iterations = res.iterations;
  if (!csv_out.empty()) {
    io::save_metrics({row}, csv_out);
  } else {
    std::cout << io::kMetricsHeader << "\n"
              << row.experiment_id << ',' << row.n << ',' << row.p1 << ','
              << row.p2 << ',' << row.seed << ',' << row.rel_err_product << ','
              << row.rel_err_f1 << ',' << row.rel_err_f2 << ',' << row.pr_auc
              << ',' << row.iterations << ',' << row.wall_ms << "\n";
  }
  return kOk;
}

int cmd_benchmark(const std::string& manifest_path, int jobs,
                  const std::string& out_override) {
  ExperimentManifest m = load_manifest(manifest_path);
  if (!out_override.empty()) m.output_dir = out_override;
  const BenchmarkReport report = run_benchmark(m, jobs);

  const fs::path dir = fs::path(m.output_dir) / m.experiment_id;
  io::save_metrics(report.rows, dir / "metrics.csv");
  io::json fit;
  fit["chosen_alpha"] = report.chosen_alpha;
  fit["trials_ok"] = report.rows.size();
  fit["trials_failed"] = report.failures.size();
  if (report.fit_valid) {
    fit["c"] = report.fit.c;
    fit["r_squared"] = report.fit.r_squared;
    fit["slope_log_n"] = report.fit.slope_log_n;
  } else {
    fit["c"] = nullptr;
    fit["r_squared"] = nullptr;
    fit["slope_log_n"] = nullptr;
  }
  io::detail::open_out(dir / "rate_fit.json") << fit.dump(2) << '\n';

  std::cout << "benchmark " << m.experiment_id << ": " << report.rows.size()
            << " trials ok, " << report.failures.size() << " failed\n";
  for (const std::string& f : report.failures) std::cerr << "FAILED " << f << "\n";
  if (report.fit_valid)
    std::cout << "rate fit: c=" << report.fit.c
              << " r2=" << report.fit.r_squared
              << " slope=" << report.fit.slope_log_n << "\n";
  std::cout << "wrote " << (dir / "metrics.csv").string() << "\n";
  if (report.rows.empty()) {
    std::cerr << "every trial failed\n";
    return kNoConvergence;
  }
  return kOk;
}

int cmd_schema_check(const std::string& type, const std::string& path, int p1,
                     int p2) {
  if (type == "graph") {
    io::load_graph(path);
  } else if (type == "signals") {
    io::load_signals(path);
  } else if (type == "mask") {
    if (p1 < 1 || p2 < 1)
      throw InvalidInput("mask check needs --p1 and --p2");
    io::load_mask(path, p1, p2);
  } else if (type == "result") {
    io::load_result(path);
  } else if (type == "metrics") {
    io::load_metrics(path);
  } else if (type == "manifest") {
    load_manifest(path);
  } else {
    throw InvalidInput("unknown schema type: " + type);
  }
  std::cout << path << ": valid " << type << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cartesian product graph learning from multi-way signals"};
  app.require_subcommand(1);

  // generate
  auto* generate = app.add_subcommand(
      "generate", "write synthetic graphs and signals from a manifest");
  std::string gen_manifest, gen_out;
  generate->add_option("--manifest", gen_manifest, "experiment manifest JSON")
      ->required();
  generate->add_option("--output-dir", gen_out, "override the manifest output_dir");

  // learn
  auto* learn = app.add_subcommand("learn", "learn factor graphs from signals");
  std::string learn_signals, learn_mask, learn_grid, learn_t1, learn_t2;
  std::string learn_output = "result.json", learn_imputed;
  SolverFlags flags;
  double beta = 1.0;
  bool center = false;
  learn->add_option("--signals", learn_signals, "signal CSV (with manifest)")
      ->required();
  learn->add_option("--mask", learn_mask, "missing-node CSV; enables imputation");
  learn->add_option("--output", learn_output, "result JSON path");
  learn->add_option("--imputed-out", learn_imputed, "imputed signal CSV path");
  learn->add_option("--alpha-grid", learn_grid,
                    "comma-separated alphas; one result per value");
  learn->add_option("--beta", beta, "Tikhonov trade-off for missing mode");
  learn->add_flag("--center-modes", center, "remove row and column means first");
  learn->add_option("--truth-f1", learn_t1, "true factor-1 JSON (for reports)");
  learn->add_option("--truth-f2", learn_t2, "true factor-2 JSON (for reports)");
  flags.attach(learn);

  // eval
  auto* eval = app.add_subcommand("eval", "score a result against the truth");
  std::string eval_result, eval_t1, eval_t2, eval_csv, eval_id = "eval";
  int eval_n = 0;
  std::uint64_t eval_seed = 0;
  eval->add_option("--result", eval_result, "result JSON")->required();
  eval->add_option("--truth-f1", eval_t1, "true factor-1 JSON")->required();
  eval->add_option("--truth-f2", eval_t2, "true factor-2 JSON")->required();
  eval->add_option("--csv", eval_csv, "write the row to this CSV");
  eval->add_option("--id", eval_id, "experiment id column");
  eval->add_option("--n", eval_n, "sample count column");
  eval->add_option("--seed", eval_seed, "seed column");

  // benchmark
  auto* bench = app.add_subcommand("benchmark", "full generate/learn/eval sweep");
  std::string bench_manifest, bench_out;
  int jobs = static_cast<int>(std::thread::hardware_concurrency());
  bench->add_option("--manifest", bench_manifest, "experiment manifest JSON")
      ->required();
  bench->add_option("--jobs", jobs, "parallel trials");
  bench->add_option("--output-dir", bench_out, "override the manifest output_dir");

  // schema-check
  auto* schema = app.add_subcommand("schema-check", "validate a file format");
  std::string schema_type, schema_path;
  int sp1 = 0, sp2 = 0;
  schema->add_option("--type", schema_type,
                     "graph|signals|mask|result|metrics|manifest")
      ->required();
  schema->add_option("path", schema_path, "file to validate")->required();
  schema->add_option("--p1", sp1, "grid rows (mask only)");
  schema->add_option("--p2", sp2, "grid cols (mask only)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) return cmd_generate(gen_manifest, gen_out);
    if (*learn)
      return cmd_learn(learn_signals, learn_mask, flags, learn_grid, beta,
                       center, learn_t1, learn_t2, learn_output, learn_imputed);
    if (*eval)
      return cmd_eval(eval_result, eval_t1, eval_t2, eval_csv, eval_id, eval_n,
                      eval_seed);
    if (*bench) return cmd_benchmark(bench_manifest, jobs, bench_out);
    if (*schema) return cmd_schema_check(schema_type, schema_path, sp1, sp2);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kBadInput;
  }
  return kBadInput;
}
