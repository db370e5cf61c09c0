#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwgl/missing.hpp"
#include "mwgl/signals.hpp"
#include "mwgl/solver.hpp"

namespace mwgl::io {

using nlohmann::json;

namespace detail {

/// Shortest round-trip decimal form of a double.
inline std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

inline std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string() + " for reading");
  return in;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline double parse_double(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("bad number '" + s + "' in " + where);
  }
}

inline long parse_int(const std::string& s, const std::string& where) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw IoError("bad integer '" + s + "' in " + where);
  }
}

inline json parse_json_file(const std::filesystem::path& path) {
  auto in = open_in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Graph files: {"p": int, "w": [w_1, ..., w_{p(p-1)/2}]} in canonical order.

inline json graph_to_json(const WeightVector& g) {
  g.validate();
  json j;
  j["p"] = g.p;
  j["w"] = std::vector<double>(g.w.data(), g.w.data() + g.w.size());
  return j;
}

inline WeightVector graph_from_json(const json& j) {
  if (!j.is_object() || !j.contains("p") || !j.contains("w") ||
      !j["p"].is_number_integer() || !j["w"].is_array())
    throw IoError("graph JSON must be {\"p\": int, \"w\": [numbers]}");
  WeightVector g;
  g.p = j["p"].get<int>();
  const auto& arr = j["w"];
  g.w.resize(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw IoError("graph JSON: w must be numeric");
    g.w(static_cast<std::int64_t>(i)) = arr[i].get<double>();
  }
  try {
    g.validate();
  } catch (const InvalidInput& e) {
    throw IoError(std::string("graph JSON: ") + e.what());
  }
  return g;
}

inline void save_graph(const WeightVector& g, const std::filesystem::path& path) {
  detail::open_out(path) << graph_to_json(g).dump(2) << '\n';
}

inline WeightVector load_graph(const std::filesystem::path& path) {
  return graph_from_json(detail::parse_json_file(path));
}

/// Edge list CSV: header "i,j,weight", 1-based node ids with i > j, only
/// nonzero weights, canonical order.
inline void save_edge_list(const WeightVector& g,
                           const std::filesystem::path& path) {
  g.validate();
  auto out = detail::open_out(path);
  out << "i,j,weight\n";
  for_each_pair(g.p, [&](std::int64_t l, int i, int j) {
    if (g.w(l) != 0.0)
      out << (i + 1) << ',' << (j + 1) << ','
          << detail::format_double(g.w(l)) << '\n';
  });
}

// ---------------------------------------------------------------------------
// Signal files: CSV of n rows with p1*p2 columns (row-major vectorization)
// next to a JSON manifest {"p1": int, "p2": int, "n": int, "seed": int|null}.

inline void save_signals(const SignalSet& signals,
                         const std::filesystem::path& csv_path,
                         std::optional<std::uint64_t> seed = std::nullopt) {
  signals.validate();
  auto out = detail::open_out(csv_path);
  for (const Matrix& x : signals.data) {
    for (int i = 0; i < signals.p1; ++i)
      for (int j = 0; j < signals.p2; ++j) {
        if (i + j > 0) out << ',';
        out << detail::format_double(x(i, j));
      }
    out << '\n';
  }
  json manifest;
  manifest["p1"] = signals.p1;
  manifest["p2"] = signals.p2;
  manifest["n"] = signals.n();
  if (seed)
    manifest["seed"] = *seed;
  else
    manifest["seed"] = nullptr;
  std::filesystem::path mpath = csv_path;
  mpath += ".manifest.json";
  detail::open_out(mpath) << manifest.dump(2) << '\n';
}

inline SignalSet load_signals(const std::filesystem::path& csv_path) {
  std::filesystem::path mpath = csv_path;
  mpath += ".manifest.json";
  const json manifest = detail::parse_json_file(mpath);
  for (const char* key : {"p1", "p2", "n"})
    if (!manifest.contains(key) || !manifest[key].is_number_integer())
      throw IoError("signal manifest missing integer field " + std::string(key));
  SignalSet s;
  s.p1 = manifest["p1"].get<int>();
  s.p2 = manifest["p2"].get<int>();
  const int n = manifest["n"].get<int>();
  if (s.p1 < 1 || s.p2 < 1 || n < 1)
    throw IoError("signal manifest has nonpositive dimensions");

  auto in = detail::open_in(csv_path);
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (static_cast<int>(fields.size()) != s.p1 * s.p2)
      throw IoError("signal CSV row " + std::to_string(row + 1) + " has " +
                    std::to_string(fields.size()) + " fields, expected " +
                    std::to_string(s.p1 * s.p2));
    Matrix x(s.p1, s.p2);
    for (int i = 0; i < s.p1; ++i)
      for (int j = 0; j < s.p2; ++j)
        x(i, j) = detail::parse_double(fields[i * s.p2 + j], csv_path.string());
    s.data.push_back(std::move(x));
    ++row;
  }
  if (row != n)
    throw IoError("signal CSV has " + std::to_string(row) +
                  " rows but manifest says n=" + std::to_string(n));
  s.validate();
  return s;
}

// ---------------------------------------------------------------------------
// Mask files: CSV of the MISSING node pairs, header "i1,i2", 1-based.

inline void save_mask(const ObservationMask& mask,
                      const std::filesystem::path& path) {
  mask.validate();
  auto out = detail::open_out(path);
  out << "i1,i2\n";
  for (int i = 0; i < mask.p1; ++i)
    for (int j = 0; j < mask.p2; ++j)
      if (!mask.observed(i, j)) out << (i + 1) << ',' << (j + 1) << '\n';
}

inline ObservationMask load_mask(const std::filesystem::path& path, int p1,
                                 int p2) {
  auto in = detail::open_in(path);
  std::string line;
  if (!std::getline(in, line) || detail::split_csv_line(line) !=
                                     std::vector<std::string>{"i1", "i2"})
    throw IoError("mask CSV must start with header i1,i2");
  ObservationMask mask = ObservationMask::all_observed(p1, p2);
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != 2)
      throw IoError("mask CSV row " + std::to_string(row) + ": expected i1,i2");
    const long i1 = detail::parse_int(fields[0], path.string());
    const long i2 = detail::parse_int(fields[1], path.string());
    if (i1 < 1 || i1 > p1 || i2 < 1 || i2 > p2)
      throw IoError("mask CSV row " + std::to_string(row) +
                    ": node (" + std::to_string(i1) + "," + std::to_string(i2) +
                    ") out of range for " + std::to_string(p1) + "x" +
                    std::to_string(p2));
    mask.observed(i1 - 1, i2 - 1) = false;
  }
  try {
    mask.validate();
  } catch (const InvalidInput& e) {
    throw IoError(std::string("mask CSV: ") + e.what());
  }
  return mask;
}

// ---------------------------------------------------------------------------
// Solver results.

inline json config_to_json(const SolverConfig& cfg) {
  json j;
  j["alpha"] = cfg.alpha;
  j["alpha1"] = cfg.alpha1 ? json(*cfg.alpha1) : json(nullptr);
  j["alpha2"] = cfg.alpha2 ? json(*cfg.alpha2) : json(nullptr);
  j["eta"] = cfg.eta;
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  j["backtracking"] = cfg.backtracking;
  return j;
}

inline json result_to_json(const SolveResult& res, const SolverConfig& cfg) {
  json j;
  j["w1"] = std::vector<double>(res.w1.w.data(), res.w1.w.data() + res.w1.w.size());
  j["w2"] = std::vector<double>(res.w2.w.data(), res.w2.w.data() + res.w2.w.size());
  j["p1"] = res.w1.p;
  j["p2"] = res.w2.p;
  j["objective_trace"] = res.objective_trace;
  j["iterations"] = res.iterations;
  j["converged"] = res.converged;
  j["config"] = config_to_json(cfg);
  return j;
}

inline void save_result(const SolveResult& res, const SolverConfig& cfg,
                        const std::filesystem::path& path) {
  detail::open_out(path) << result_to_json(res, cfg).dump(2) << '\n';
}

struct LoadedResult {
  WeightVector w1;
  WeightVector w2;
  std::vector<double> objective_trace;
  int iterations = 0;
  bool converged = false;
};

inline LoadedResult load_result(const std::filesystem::path& path) {
  const json j = detail::parse_json_file(path);
  for (const char* key : {"w1", "w2", "p1", "p2", "objective_trace",
                          "iterations", "converged", "config"})
    if (!j.contains(key))
      throw IoError("result JSON missing field " + std::string(key));
  LoadedResult out;
  auto read_weights = [&](const char* wkey, const char* pkey) {
    WeightVector g;
    g.p = j[pkey].get<int>();
    const auto& arr = j[wkey];
    if (!arr.is_array()) throw IoError("result JSON: weights must be arrays");
    g.w.resize(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
      g.w(static_cast<std::int64_t>(i)) = arr[i].get<double>();
    try {
      g.validate();
    } catch (const InvalidInput& e) {
      throw IoError(std::string("result JSON: ") + e.what());
    }
    return g;
  };
  out.w1 = read_weights("w1", "p1");
  out.w2 = read_weights("w2", "p2");
  out.objective_trace = j["objective_trace"].get<std::vector<double>>();
  out.iterations = j["iterations"].get<int>();
  out.converged = j["converged"].get<bool>();
  return out;
}

// ---------------------------------------------------------------------------
// Metrics CSV.

struct MetricsRow {
  std::string experiment_id;
  int n = 0;
  int p1 = 0;
  int p2 = 0;
  std::uint64_t seed = 0;
  double rel_err_product = 0.0;
  double rel_err_f1 = 0.0;
  double rel_err_f2 = 0.0;
  double pr_auc = 0.0;
  int iterations = 0;
  double wall_ms = 0.0;
};

inline constexpr const char* kMetricsHeader =
    "experiment_id,n,p1,p2,seed,rel_err_product,rel_err_f1,rel_err_f2,"
    "pr_auc,iterations,wall_ms";

inline void save_metrics(const std::vector<MetricsRow>& rows,
                         const std::filesystem::path& path) {
  auto out = detail::open_out(path);
  out << kMetricsHeader << '\n';
  for (const MetricsRow& r : rows) {
    out << r.experiment_id << ',' << r.n << ',' << r.p1 << ',' << r.p2 << ','
        << r.seed << ',' << detail::format_double(r.rel_err_product) << ','
        << detail::format_double(r.rel_err_f1) << ','
        << detail::format_double(r.rel_err_f2) << ','
        << detail::format_double(r.pr_auc) << ',' << r.iterations << ','
        << detail::format_double(r.wall_ms) << '\n';
  }
}

inline std::vector<MetricsRow> load_metrics(const std::filesystem::path& path) {
  auto in = detail::open_in(path);
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader)
    throw IoError("metrics CSV has unexpected header");
  std::vector<MetricsRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 11)
      throw IoError("metrics CSV row " + std::to_string(lineno) +
                    ": expected 11 fields");
    const std::string where = path.string();
    MetricsRow r;
    r.experiment_id = f[0];
    r.n = static_cast<int>(detail::parse_int(f[1], where));
    r.p1 = static_cast<int>(detail::parse_int(f[2], where));
    r.p2 = static_cast<int>(detail::parse_int(f[3], where));
    r.seed = static_cast<std::uint64_t>(detail::parse_int(f[4], where));
    r.rel_err_product = detail::parse_double(f[5], where);
    r.rel_err_f1 = detail::parse_double(f[6], where);
    r.rel_err_f2 = detail::parse_double(f[7], where);
    r.pr_auc = detail::parse_double(f[8], where);
    r.iterations = static_cast<int>(detail::parse_int(f[9], where));
    r.wall_ms = detail::parse_double(f[10], where);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace mwgl::io
