// Minimal end-to-end use of the library: draw two random weighted factor
// graphs, sample smooth signals on their Cartesian product, learn the
// factors back, and report the recovery error.

#include <cstdio>

#include "mwgl/mwgl.hpp"

int main() {
  using namespace mwgl;

  GraphRecipe recipe;
  recipe.family = GraphFamily::erdos_renyi;
  recipe.p = 10;
  recipe.edge_prob = 0.3;
  recipe.seed = 1;
  const WeightVector g1 = generate_factor(recipe);
  recipe.p = 12;
  recipe.seed = 2;
  const WeightVector g2 = generate_factor(recipe);

  const ProductModel truth{g1, g2};
  const SignalSet signals = sample_igmrf(truth, 640, 42);

  SolverConfig cfg;
  cfg.alpha = 0.002;
  const SolveResult res = solve(signals, cfg);

  const double err1 = relative_error(laplacian_from_weights(res.w1),
                                     laplacian_from_weights(g1), g1.p);
  const double err2 = relative_error(laplacian_from_weights(res.w2),
                                     laplacian_from_weights(g2), g2.p);
  const double auc = pr_auc(product_weights(res.w1, res.w2),
                            product_weights(g1, g2));

  std::printf("%s after %d iterations\n",
              res.converged ? "converged" : "stopped", res.iterations);
  std::printf("factor Rel-Err: %.4f / %.4f, product PR-AUC: %.4f\n", err1,
              err2, auc);
  return 0;
}
