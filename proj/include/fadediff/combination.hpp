#pragma once

#include <vector>

#include "fadediff/linalg.hpp"

namespace fadediff {

enum class GammaRule { RelativeDegree, Uniform, Metropolis };

// Static base weights gamma_{l,k} >= 0 for l in N_k. Off-diagonal entries
// are the weights applied to active neighbors; the diagonal holds the
// static complement 1 - sum of the off-diagonal column (what the dynamic
// self-weight becomes when every link is up).
struct GammaWeights {
  int n = 0;
  GammaRule rule = GammaRule::RelativeDegree;
  std::vector<double> g;  // dense n*n, g[l*n + k] = gamma_{l,k}

  double at(int l, int k) const { return g[static_cast<std::size_t>(l) * n + k]; }
  double& at(int l, int k) { return g[static_cast<std::size_t>(l) * n + k]; }
};

// One realization of the combination matrix: nonnegative, columns sum to 1,
// support restricted to the active neighborhoods.
struct CombinationMatrix {
  int n = 0;
  std::vector<double> a;  // dense n*n, a[l*n + k] = a_{l,k}

  double at(int l, int k) const { return a[static_cast<std::size_t>(l) * n + k]; }
  double& at(int l, int k) { return a[static_cast<std::size_t>(l) * n + k]; }
};

GammaWeights relative_degree_gamma(const std::vector<std::vector<int>>& neighbors);
GammaWeights uniform_gamma(const std::vector<std::vector<int>>& neighbors);
GammaWeights metropolis_gamma(const std::vector<std::vector<int>>& neighbors);
GammaWeights make_gamma(const std::vector<std::vector<int>>& neighbors, GammaRule rule);

// Checks sum_{l in N_k \ {k}} gamma_{l,k} < 1 for every k (strictly), which
// keeps every dynamic self-weight positive. Throws std::invalid_argument.
void validate_gamma(const GammaWeights& gamma, const std::vector<std::vector<int>>& neighbors);

// a_{l,k}(i) = gamma_{l,k} for active neighbors, self weight = complement.
CombinationMatrix dynamic_weights(const GammaWeights& gamma,
                                  const std::vector<std::vector<int>>& active_sets);

// E[A_i] for link success probabilities p (dense n*n, p[l*n+k] for l->k).
CMat mean_matrix(const GammaWeights& gamma, const std::vector<std::vector<int>>& neighbors,
                 const std::vector<double>& success_probs);

}  // namespace fadediff
