#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mwgl/graph.hpp"

namespace mwgl {

enum class GraphFamily { erdos_renyi, barabasi_albert, watts_strogatz, grid };

inline GraphFamily graph_family_from_string(const std::string& name) {
  if (name == "erdos_renyi") return GraphFamily::erdos_renyi;
  if (name == "barabasi_albert") return GraphFamily::barabasi_albert;
  if (name == "watts_strogatz") return GraphFamily::watts_strogatz;
  if (name == "grid") return GraphFamily::grid;
  throw InvalidInput("unknown graph family: " + name);
}

inline std::string to_string(GraphFamily family) {
  switch (family) {
    case GraphFamily::erdos_renyi: return "erdos_renyi";
    case GraphFamily::barabasi_albert: return "barabasi_albert";
    case GraphFamily::watts_strogatz: return "watts_strogatz";
    case GraphFamily::grid: return "grid";
  }
  throw InvalidInput("unknown graph family");
}

/// Recipe for one synthetic weighted factor graph.
///   erdos_renyi:     p, edge_prob
///   barabasi_albert: p, 2 attachments per new node, connected 2-node seed
///   watts_strogatz:  p, degree-2 ring, rewire_prob per edge
///   grid:            rows x cols lattice (p = rows * cols), deterministic
/// Edge weights are drawn Uniform(weight_low, weight_high).
struct GraphRecipe {
  GraphFamily family = GraphFamily::erdos_renyi;
  int p = 0;
  int rows = 0, cols = 0;     // grid only
  double edge_prob = 0.3;     // erdos_renyi
  double rewire_prob = 0.1;   // watts_strogatz
  double weight_low = 0.1;
  double weight_high = 2.0;
  std::uint64_t seed = 0;

  int node_count() const {
    return family == GraphFamily::grid ? rows * cols : p;
  }

  void validate() const {
    if (node_count() < 2) throw InvalidInput("GraphRecipe: need p >= 2");
    if (family == GraphFamily::grid && (rows < 1 || cols < 1))
      throw InvalidInput("GraphRecipe: grid needs positive rows and cols");
    if (family == GraphFamily::erdos_renyi &&
        (edge_prob < 0 || edge_prob > 1))
      throw InvalidInput("GraphRecipe: edge_prob must be in [0,1]");
    if (family == GraphFamily::watts_strogatz &&
        (rewire_prob < 0 || rewire_prob > 1))
      throw InvalidInput("GraphRecipe: rewire_prob must be in [0,1]");
    if (weight_low <= 0)
      throw InvalidInput("GraphRecipe: weight_low must be > 0");
    if (weight_high < weight_low)
      throw InvalidInput("GraphRecipe: weight_high must be >= weight_low");
  }
};

namespace detail {

inline WeightVector erdos_renyi_once(int p, double prob, std::mt19937_64& rng) {
  WeightVector g = WeightVector::zeros(p);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for_each_pair(p, [&](std::int64_t l, int, int) {
    if (unif(rng) < prob) g.w(l) = 1.0;
  });
  return g;
}

inline WeightVector barabasi_albert(int p, std::mt19937_64& rng) {
  // connected two-node seed, then each arrival attaches to 2 distinct
  // nodes drawn proportional to degree
  WeightVector g = WeightVector::zeros(p);
  std::vector<double> degree(p, 0.0);
  auto add_edge = [&](int i, int j) {
    g.w(pair_index(p, std::max(i, j), std::min(i, j))) = 1.0;
    degree[i] += 1.0;
    degree[j] += 1.0;
  };
  add_edge(0, 1);
  for (int v = 2; v < p; ++v) {
    const int m = std::min(2, v);
    std::vector<int> targets;
    while (static_cast<int>(targets.size()) < m) {
      std::discrete_distribution<int> pick(degree.begin(), degree.begin() + v);
      const int t = pick(rng);
      if (std::find(targets.begin(), targets.end(), t) == targets.end())
        targets.push_back(t);
    }
    for (int t : targets) add_edge(v, t);
  }
  return g;
}

inline WeightVector watts_strogatz_once(int p, double rewire_prob,
                                        std::mt19937_64& rng) {
  // degree-2 ring lattice is the p-cycle; each edge may move its far
  // endpoint to a uniform non-neighbor of the near one
  std::vector<std::vector<char>> adj(p, std::vector<char>(p, 0));
  auto connect = [&](int i, int j) { adj[i][j] = adj[j][i] = 1; };
  if (p == 2) {
    connect(0, 1);
  } else {
    for (int i = 0; i < p; ++i) connect(i, (i + 1) % p);
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> node(0, p - 1);
  if (p > 2) {
    for (int i = 0; i < p; ++i) {
      const int j = (i + 1) % p;
      if (!adj[i][j]) continue;  // already rewired away
      if (unif(rng) >= rewire_prob) continue;
      const int k = node(rng);
      if (k == i || adj[i][k]) continue;  // skip self-loops and duplicates
      adj[i][j] = adj[j][i] = 0;
      connect(i, k);
    }
  }
  WeightVector g = WeightVector::zeros(p);
  for_each_pair(p, [&](std::int64_t l, int i, int j) {
    if (adj[i][j]) g.w(l) = 1.0;
  });
  return g;
}

inline WeightVector grid_topology(int rows, int cols) {
  const int p = rows * cols;
  WeightVector g = WeightVector::zeros(p);
  auto at = [&](int r, int c) { return r * cols + c; };
  auto add = [&](int a, int b) {
    g.w(pair_index(p, std::max(a, b), std::min(a, b))) = 1.0;
  };
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      if (c + 1 < cols) add(at(r, c), at(r, c + 1));
      if (r + 1 < rows) add(at(r, c), at(r + 1, c));
    }
  return g;
}

}  // namespace detail

/// Binary edge indicator of the recipe's family. Random families are
/// resampled until connected (at most 100 attempts).
inline WeightVector generate_topology(const GraphRecipe& recipe) {
  recipe.validate();
  std::mt19937_64 rng(recipe.seed);
  const int attempts = 100;
  switch (recipe.family) {
    case GraphFamily::grid:
      return detail::grid_topology(recipe.rows, recipe.cols);
    case GraphFamily::barabasi_albert:
      return detail::barabasi_albert(recipe.p, rng);  // connected by construction
    case GraphFamily::erdos_renyi:
      for (int a = 0; a < attempts; ++a) {
        WeightVector g = detail::erdos_renyi_once(recipe.p, recipe.edge_prob, rng);
        if (is_connected(g)) return g;
      }
      break;
    case GraphFamily::watts_strogatz:
      for (int a = 0; a < attempts; ++a) {
        WeightVector g =
            detail::watts_strogatz_once(recipe.p, recipe.rewire_prob, rng);
        if (is_connected(g)) return g;
      }
      break;
  }
  throw ConnectivityFailure("no connected graph after " +
                            std::to_string(attempts) + " attempts");
}

/// Replaces every unit entry of a binary topology with an independent
/// Uniform(low, high) draw. Zero entries stay zero.
inline WeightVector assign_weights(const WeightVector& topology, double low,
                                   double high, std::uint64_t seed) {
  topology.validate();
  if (low > high) throw InvalidInput("assign_weights: low must be <= high");
  WeightVector out = topology;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(low, high);
  for (std::int64_t l = 0; l < out.w.size(); ++l) {
    if (topology.w(l) == 0.0) continue;
    if (topology.w(l) != 1.0)
      throw InvalidInput("assign_weights: topology is not binary");
    out.w(l) = low == high ? low : unif(rng);
  }
  return out;
}

/// Topology plus weights in one step; weight draws use seed + 1 so the
/// same recipe seed never feeds two different distributions.
inline WeightVector generate_factor(const GraphRecipe& recipe) {
  const WeightVector topo = generate_topology(recipe);
  return assign_weights(topo, recipe.weight_low, recipe.weight_high,
                        recipe.seed + 1);
}

}  // namespace mwgl
