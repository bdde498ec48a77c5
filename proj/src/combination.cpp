#include "fadediff/combination.hpp"

#include <algorithm>
#include <stdexcept>

namespace fadediff {

namespace {

GammaWeights blank(const std::vector<std::vector<int>>& neighbors, GammaRule rule) {
  GammaWeights gw;
  gw.n = static_cast<int>(neighbors.size());
  gw.rule = rule;
  gw.g.assign(static_cast<std::size_t>(gw.n) * gw.n, 0.0);
  return gw;
}

void fill_diagonal_complement(GammaWeights& gw, const std::vector<std::vector<int>>& neighbors) {
  for (int k = 0; k < gw.n; ++k) {
    double off = 0.0;
    for (int l : neighbors[k]) {
      if (l != k) off += gw.at(l, k);
    }
    gw.at(k, k) = 1.0 - off;
  }
}

}  // namespace

GammaWeights relative_degree_gamma(const std::vector<std::vector<int>>& neighbors) {
  GammaWeights gw = blank(neighbors, GammaRule::RelativeDegree);
  for (int k = 0; k < gw.n; ++k) {
    double denom = 0.0;
    for (int m : neighbors[k]) denom += static_cast<double>(neighbors[m].size());
    for (int l : neighbors[k]) gw.at(l, k) = static_cast<double>(neighbors[l].size()) / denom;
  }
  return gw;
}

GammaWeights uniform_gamma(const std::vector<std::vector<int>>& neighbors) {
  GammaWeights gw = blank(neighbors, GammaRule::Uniform);
  for (int k = 0; k < gw.n; ++k) {
    const double w = 1.0 / static_cast<double>(neighbors[k].size());
    for (int l : neighbors[k]) gw.at(l, k) = w;
  }
  return gw;
}

GammaWeights metropolis_gamma(const std::vector<std::vector<int>>& neighbors) {
  GammaWeights gw = blank(neighbors, GammaRule::Metropolis);
  for (int k = 0; k < gw.n; ++k) {
    for (int l : neighbors[k]) {
      if (l == k) continue;
      gw.at(l, k) = 1.0 / std::max(neighbors[k].size(), neighbors[l].size());
    }
  }
  fill_diagonal_complement(gw, neighbors);
  return gw;
}

GammaWeights make_gamma(const std::vector<std::vector<int>>& neighbors, GammaRule rule) {
  switch (rule) {
    case GammaRule::RelativeDegree:
      return relative_degree_gamma(neighbors);
    case GammaRule::Uniform:
      return uniform_gamma(neighbors);
    case GammaRule::Metropolis:
      return metropolis_gamma(neighbors);
  }
  throw std::invalid_argument("make_gamma: unknown rule");
}

void validate_gamma(const GammaWeights& gamma, const std::vector<std::vector<int>>& neighbors) {
  for (int k = 0; k < gamma.n; ++k) {
    double off = 0.0;
    for (int l : neighbors[k]) {
      if (l == k) continue;
      if (gamma.at(l, k) < 0.0) throw std::invalid_argument("gamma weights must be nonnegative");
      off += gamma.at(l, k);
    }
    if (off >= 1.0) {
      throw std::invalid_argument("gamma column sum over neighbors must stay below 1");
    }
  }
}

CombinationMatrix dynamic_weights(const GammaWeights& gamma,
                                  const std::vector<std::vector<int>>& active_sets) {
  CombinationMatrix cm;
  cm.n = gamma.n;
  cm.a.assign(static_cast<std::size_t>(cm.n) * cm.n, 0.0);
  for (int k = 0; k < cm.n; ++k) {
    double off = 0.0;
    for (int l : active_sets[k]) {
      if (l == k) continue;
      const double w = gamma.at(l, k);
      cm.at(l, k) = w;
      off += w;
    }
    cm.at(k, k) = 1.0 - off;
  }
  return cm;
}

CMat mean_matrix(const GammaWeights& gamma, const std::vector<std::vector<int>>& neighbors,
                 const std::vector<double>& success_probs) {
  const int n = gamma.n;
  CMat a(n, n);
  for (int k = 0; k < n; ++k) {
    double off = 0.0;
    for (int l : neighbors[k]) {
      if (l == k) continue;
      const double p = success_probs[static_cast<std::size_t>(l) * n + k];
      const double w = gamma.at(l, k) * p;
      a(l, k) = w;
      off += w;
    }
    a(k, k) = 1.0 - off;
  }
  return a;
}

}  // namespace fadediff
