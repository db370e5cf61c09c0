#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"
#include "mwgl/io.hpp"

using namespace mwgl;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mwgl_io_test_" + std::to_string(::getpid()) + "_" +
            std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("graph JSON round trip preserves every bit") {
  TempDir tmp;
  std::mt19937_64 rng(173);
  for (int trial = 0; trial < 5; ++trial) {
    const WeightVector g = testhelp::random_connected(6, rng);
    const fs::path file = tmp.path / "graph.json";
    io::save_graph(g, file);
    const WeightVector back = io::load_graph(file);
    CHECK(back.p == g.p);
    CHECK((back.w - g.w).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("graph JSON rejects malformed files") {
  TempDir tmp;
  const fs::path file = tmp.path / "bad.json";
  std::ofstream(file) << "{\"p\": 3, \"w\": [1.0]}";  // wrong length
  CHECK_THROWS_AS(io::load_graph(file), IoError);
  std::ofstream(file) << "{\"p\": 2}";
  CHECK_THROWS_AS(io::load_graph(file), IoError);
  std::ofstream(file) << "not json";
  CHECK_THROWS_AS(io::load_graph(file), IoError);
  CHECK_THROWS_AS(io::load_graph(tmp.path / "absent.json"), IoError);
}

TEST_CASE("edge list export writes 1-based nonzero edges") {
  TempDir tmp;
  WeightVector g = WeightVector::zeros(3);
  g.w(0) = 1.5;  // (2,1)
  g.w(2) = 0.25; // (3,2)
  const fs::path file = tmp.path / "edges.csv";
  io::save_edge_list(g, file);
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  CHECK(line == "i,j,weight");
  std::getline(in, line);
  CHECK(line == "2,1,1.5");
  std::getline(in, line);
  CHECK(line == "3,2,0.25");
  CHECK_FALSE(std::getline(in, line));
}

TEST_CASE("signal CSV with manifest round trips") {
  TempDir tmp;
  std::mt19937_64 rng(179);
  const ProductModel model{testhelp::random_connected(3, rng),
                           testhelp::random_connected(4, rng)};
  const SignalSet s = sample_igmrf(model, 7, 99);
  const fs::path csv = tmp.path / "signals.csv";
  io::save_signals(s, csv, 99);
  const SignalSet back = io::load_signals(csv);
  REQUIRE(back.n() == 7);
  CHECK(back.p1 == 3);
  CHECK(back.p2 == 4);
  for (int k = 0; k < 7; ++k)
    CHECK((back.data[k] - s.data[k]).cwiseAbs().maxCoeff() == 0.0);

  // manifest disagreeing with the CSV is an error
  std::ofstream(tmp.path / "signals.csv.manifest.json")
      << "{\"p1\":3,\"p2\":4,\"n\":9,\"seed\":null}";
  CHECK_THROWS_AS(io::load_signals(csv), IoError);
}

TEST_CASE("mask CSV round trips and validates") {
  TempDir tmp;
  ObservationMask mask = ObservationMask::all_observed(3, 4);
  mask.observed(0, 0) = false;
  mask.observed(2, 3) = false;
  const fs::path file = tmp.path / "mask.csv";
  io::save_mask(mask, file);
  const ObservationMask back = io::load_mask(file, 3, 4);
  CHECK((back.observed == mask.observed).all());

  std::ofstream(file) << "i1,i2\n9,1\n";
  CHECK_THROWS_AS(io::load_mask(file, 3, 4), IoError);
  std::ofstream(file) << "wrong,header\n";
  CHECK_THROWS_AS(io::load_mask(file, 3, 4), IoError);
}

TEST_CASE("result JSON round trips") {
  TempDir tmp;
  SolveResult res;
  res.w1 = WeightVector::zeros(2);
  res.w1.w(0) = 0.75;
  res.w2 = WeightVector::zeros(3);
  res.w2.w << 0.1, 0.0, 2.25;
  res.objective_trace = {3.0, 2.5, 2.25};
  res.iterations = 2;
  res.converged = true;
  SolverConfig cfg;
  cfg.alpha = 0.01;
  cfg.alpha1 = 0.5;
  const fs::path file = tmp.path / "result.json";
  io::save_result(res, cfg, file);
  const io::LoadedResult back = io::load_result(file);
  CHECK(back.w1.p == 2);
  CHECK(back.w1.w(0) == 0.75);
  CHECK((back.w2.w - res.w2.w).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.objective_trace == res.objective_trace);
  CHECK(back.iterations == 2);
  CHECK(back.converged);

  const io::json j = io::detail::parse_json_file(file);
  CHECK(j["config"]["alpha1"].get<double>() == 0.5);
  CHECK(j["config"]["alpha2"].is_null());
}

TEST_CASE("metrics CSV round trips") {
  TempDir tmp;
  std::vector<io::MetricsRow> rows(2);
  rows[0] = {"er", 10, 4, 5, 7, 0.5, 0.4, 0.3, 0.9, 100, 12.5};
  rows[1] = {"er", 40, 4, 5, 8, 0.25, 0.2, 0.15, 0.95, 200, 30.0};
  const fs::path file = tmp.path / "metrics.csv";
  io::save_metrics(rows, file);
  const auto back = io::load_metrics(file);
  REQUIRE(back.size() == 2);
  CHECK(back[0].experiment_id == "er");
  CHECK(back[0].n == 10);
  CHECK(back[0].seed == 7);
  CHECK(back[0].rel_err_product == 0.5);
  CHECK(back[1].pr_auc == 0.95);
  CHECK(back[1].wall_ms == 30.0);

  std::ofstream(file) << "bogus\n";
  CHECK_THROWS_AS(io::load_metrics(file), IoError);
}
