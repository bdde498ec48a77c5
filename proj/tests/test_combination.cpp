#include <cmath>

#include "doctest.h"
#include "fadediff/combination.hpp"
#include "fadediff/rng.hpp"

using namespace fadediff;

namespace {
const std::vector<std::vector<int>> kLine{{0, 1}, {0, 1, 2}, {1, 2}};
const std::vector<std::vector<int>> kComplete4{{0, 1, 2, 3}, {0, 1, 2, 3}, {0, 1, 2, 3},
                                               {0, 1, 2, 3}};
}  // namespace

TEST_CASE("relative-degree weights on the 3-node line graph") {
  const GammaWeights g = relative_degree_gamma(kLine);
  // node 1 (middle): denominator |N_0| + |N_1| + |N_2| = 2 + 3 + 2 = 7
  CHECK(g.at(0, 1) == doctest::Approx(2.0 / 7.0));
  CHECK(g.at(2, 1) == doctest::Approx(2.0 / 7.0));
  CHECK(g.at(1, 1) == doctest::Approx(3.0 / 7.0));
  validate_gamma(g, kLine);
}

TEST_CASE("relative-degree weights on the complete 4-node graph") {
  const GammaWeights g = relative_degree_gamma(kComplete4);
  for (int k = 0; k < 4; ++k)
    for (int l = 0; l < 4; ++l) CHECK(g.at(l, k) == doctest::Approx(0.25));
}

TEST_CASE("isolated node satisfies the weight condition vacuously") {
  const std::vector<std::vector<int>> isolated{{0}};
  const GammaWeights g = relative_degree_gamma(isolated);
  CHECK(g.at(0, 0) == doctest::Approx(1.0));
  validate_gamma(g, isolated);
}

TEST_CASE("uniform and metropolis rules satisfy the sum condition") {
  for (auto rule : {GammaRule::Uniform, GammaRule::Metropolis}) {
    const GammaWeights g = make_gamma(kLine, rule);
    validate_gamma(g, kLine);
  }
  const GammaWeights u = uniform_gamma(kLine);
  CHECK(u.at(0, 1) == doctest::Approx(1.0 / 3.0));
  const GammaWeights m = metropolis_gamma(kLine);
  CHECK(m.at(0, 1) == doctest::Approx(1.0 / 3.0));  // 1/max(3,2)
  CHECK(m.at(1, 0) == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("dynamic weights: no active neighbors and a single active one") {
  GammaWeights g = relative_degree_gamma(kLine);
  // nobody active for node 1
  CombinationMatrix a = dynamic_weights(g, {{0}, {1}, {2}});
  CHECK(a.at(1, 1) == doctest::Approx(1.0));
  CHECK(a.at(0, 1) == 0.0);

  g.at(0, 1) = 0.3;  // force a specific off-diagonal weight
  a = dynamic_weights(g, {{0}, {0, 1}, {2}});
  CHECK(a.at(0, 1) == doctest::Approx(0.3));
  CHECK(a.at(1, 1) == doctest::Approx(0.7));
}

TEST_CASE("dynamic weights over all activity patterns: column sums and support") {
  const GammaWeights g = relative_degree_gamma(kComplete4);
  // all 2^3 activity patterns for every column
  for (int mask = 0; mask < 8; ++mask) {
    std::vector<std::vector<int>> active(4);
    for (int k = 0; k < 4; ++k) {
      active[k].push_back(k);
      int bit = 0;
      for (int l = 0; l < 4; ++l) {
        if (l == k) continue;
        if (mask & (1 << bit)) active[k].push_back(l);
        ++bit;
      }
      std::sort(active[k].begin(), active[k].end());
    }
    const CombinationMatrix a = dynamic_weights(g, active);
    for (int k = 0; k < 4; ++k) {
      double col = 0.0;
      for (int l = 0; l < 4; ++l) {
        CHECK(a.at(l, k) >= 0.0);
        col += a.at(l, k);
        const bool in_active = std::count(active[k].begin(), active[k].end(), l) > 0;
        if (!in_active) CHECK(a.at(l, k) == 0.0);
      }
      CHECK(std::abs(col - 1.0) <= 1e-15);
      CHECK(a.at(k, k) > 0.0);
    }
  }
}

TEST_CASE("mean matrix: degenerate probability cases") {
  const GammaWeights g = relative_degree_gamma(kComplete4);
  std::vector<double> p_all(16, 1.0);
  const CMat a1 = mean_matrix(g, kComplete4, p_all);
  const CombinationMatrix stat = dynamic_weights(g, kComplete4);
  for (int l = 0; l < 4; ++l)
    for (int k = 0; k < 4; ++k) CHECK(a1(l, k).real() == doctest::Approx(stat.at(l, k)));

  std::vector<double> p_none(16, 0.0);
  const CMat a0 = mean_matrix(g, kComplete4, p_none);
  CHECK((a0 - CMat::identity(4)).max_abs() < 1e-15);
}

TEST_CASE("mean matrix equals the Monte Carlo mean of dynamic weights") {
  const GammaWeights g = relative_degree_gamma(kLine);
  std::vector<double> p(9, 0.0);
  p[1 * 3 + 0] = 0.35;  // 1 -> 0
  p[0 * 3 + 1] = 0.8;   // 0 -> 1
  p[2 * 3 + 1] = 0.55;  // 2 -> 1
  p[1 * 3 + 2] = 0.25;  // 1 -> 2

  const CMat expected = mean_matrix(g, kLine, p);
  // column sums are exactly one
  for (int k = 0; k < 3; ++k) {
    cplx col{0.0, 0.0};
    for (int l = 0; l < 3; ++l) col += expected(l, k);
    CHECK(std::abs(col - cplx{1.0, 0.0}) < 1e-14);
  }

  RngStream rng(404);
  CMat emp(3, 3);
  const long draws = 100000;
  for (long d = 0; d < draws; ++d) {
    std::vector<std::vector<int>> active(3);
    for (int k = 0; k < 3; ++k) {
      for (int l : kLine[k]) {
        if (l == k || rng.uniform() < p[static_cast<std::size_t>(l) * 3 + k]) {
          active[k].push_back(l);
        }
      }
      std::sort(active[k].begin(), active[k].end());
    }
    const CombinationMatrix a = dynamic_weights(g, active);
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k) emp(l, k) += a.at(l, k);
  }
  emp *= cplx{1.0 / draws, 0.0};
  CHECK((emp - expected).max_abs() < 0.003);
}

TEST_CASE("violated weight condition is rejected before any run") {
  GammaWeights g = relative_degree_gamma(kLine);
  g.at(0, 1) = 0.7;
  g.at(2, 1) = 0.5;  // column sum 1.2 over the neighbors
  CHECK_THROWS_AS(validate_gamma(g, kLine), std::invalid_argument);
}
