// End-to-end checks of the command-line tool: spawns the built binary,
// walks a generate -> learn -> eval -> benchmark -> schema-check pipeline
// in a scratch directory, and verifies exit codes and artifacts.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "mwgl/io.hpp"

namespace fs = std::filesystem;

namespace {

int failures = 0;

void check(bool ok, const std::string& what) {
  std::printf("[%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
  if (!ok) ++failures;
}

int run(const std::string& cmd) {
  const int status = std::system((cmd + " >/dev/null 2>&1").c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: cli_tests <path-to-mwgl-binary>\n";
    return 2;
  }
  const std::string bin = argv[1];
  const fs::path work =
      fs::temp_directory_path() / ("mwgl_cli_test_" + std::to_string(getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  const std::string out = (work / "out").string();

  std::ofstream(work / "manifest.json") << R"({
    "experiment_id": "smoke",
    "factor1": {"family": "erdos_renyi", "p": 4, "edge_prob": 0.5, "seed": 0},
    "factor2": {"family": "grid", "rows": 1, "cols": 5},
    "n_list": [10, 40],
    "seeds": [1, 2, 3],
    "solver": {"alpha": 0.0, "eta": 0.001, "tol": 1e-6, "max_iter": 2000},
    "output_dir": ")" << out << R"("
  })";

  check(run(bin + " generate --manifest " + (work / "manifest.json").string()) == 0,
        "generate exits 0");
  const fs::path seed1 = fs::path(out) / "smoke" / "seed1";
  check(fs::exists(seed1 / "factor1.json"), "factor graph written");
  check(fs::exists(seed1 / "product.json"), "product weights written");
  check(fs::exists(seed1 / "n10" / "signals.csv"), "signals written");
  check(fs::exists(seed1 / "n10" / "signals.csv.manifest.json"),
        "signal manifest written");

  // regenerating produces byte-identical graph files
  const std::string before = read_file(seed1 / "factor1.json");
  check(run(bin + " generate --manifest " + (work / "manifest.json").string()) == 0,
        "regenerate exits 0");
  check(read_file(seed1 / "factor1.json") == before,
        "regeneration is byte-identical");

  const std::string result = (work / "result.json").string();
  check(run(bin + " learn --signals " + (seed1 / "n40" / "signals.csv").string() +
            " --output " + result) == 0,
        "learn exits 0 on convergence");
  check(fs::exists(result), "result JSON written");

  check(run(bin + " eval --result " + result + " --truth-f1 " +
            (seed1 / "factor1.json").string() + " --truth-f2 " +
            (seed1 / "factor2.json").string() + " --csv " +
            (work / "eval.csv").string() + " --id smoke --n 40 --seed 1") == 0,
        "eval exits 0");
  check(!mwgl::io::load_metrics(work / "eval.csv").empty(),
        "eval CSV parses back");

  // alpha grid with truth: writes one result per value plus a report
  check(run(bin + " learn --signals " + (seed1 / "n40" / "signals.csv").string() +
            " --output " + (work / "grid.json").string() +
            " --alpha-grid 0,0.01 --truth-f1 " +
            (seed1 / "factor1.json").string() + " --truth-f2 " +
            (seed1 / "factor2.json").string()) == 0,
        "alpha grid learn exits 0");
  check(fs::exists(work / "grid.alpha0.json") &&
            fs::exists(work / "grid.alpha0.01.json"),
        "one result per grid alpha");

  check(run(bin + " benchmark --manifest " + (work / "manifest.json").string() +
            " --jobs 2") == 0,
        "benchmark exits 0");
  const fs::path metrics = fs::path(out) / "smoke" / "metrics.csv";
  check(fs::exists(metrics), "benchmark metrics written");
  check(mwgl::io::load_metrics(metrics).size() == 6, "benchmark ran 6 trials");
  check(fs::exists(fs::path(out) / "smoke" / "rate_fit.json"),
        "rate fit written");

  // schema checks: happy paths and deliberate failures
  check(run(bin + " schema-check --type graph " + (seed1 / "factor1.json").string()) == 0,
        "schema-check graph");
  check(run(bin + " schema-check --type signals " +
            (seed1 / "n10" / "signals.csv").string()) == 0,
        "schema-check signals");
  check(run(bin + " schema-check --type metrics " + metrics.string()) == 0,
        "schema-check metrics");
  check(run(bin + " schema-check --type result " + result) == 0,
        "schema-check result");
  check(run(bin + " schema-check --type manifest " +
            (work / "manifest.json").string()) == 0,
        "schema-check manifest");
  std::ofstream(work / "broken.json") << "{\"p\": 3, \"w\": [1]}";
  check(run(bin + " schema-check --type graph " + (work / "broken.json").string()) == 5,
        "broken graph exits 5");
  check(run(bin + " learn --signals " + (work / "missing.csv").string()) == 5,
        "missing signals exit 5");
  check(run(bin + " learn --signals " + (seed1 / "n10" / "signals.csv").string() +
            " --output " + result + " --eta -1") == 2,
        "bad eta exits 2");
  check(run(bin + " learn --signals " + (seed1 / "n10" / "signals.csv").string() +
            " --output " + result + " --max-iter 3") == 3,
        "iteration cap exits 3");

  // missing-data path through the CLI
  {
    mwgl::ObservationMask mask = mwgl::ObservationMask::all_observed(4, 5);
    mask.observed(3, 4) = false;
    mask.observed(2, 4) = false;
    mwgl::io::save_mask(mask, work / "mask.csv");
  }
  check(run(bin + " learn --signals " + (seed1 / "n40" / "signals.csv").string() +
            " --mask " + (work / "mask.csv").string() + " --output " +
            (work / "masked.json").string() + " --imputed-out " +
            (work / "imputed.csv").string()) == 0,
        "masked learn exits 0");
  check(fs::exists(work / "imputed.csv"), "imputed signals written");
  check(run(bin + " schema-check --type signals " + (work / "imputed.csv").string()) == 0,
        "imputed signals pass schema check");

  if (failures == 0) fs::remove_all(work);
  std::printf("%d failure(s)\n", failures);
  return failures == 0 ? 0 : 1;
}
