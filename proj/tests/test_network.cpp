#include <cmath>
#include <set>

#include "doctest.h"
#include "fadediff/network.hpp"
#include "fadediff/rng.hpp"

using namespace fadediff;

TEST_CASE("topology by range: pairs in and out of range") {
  const std::vector<std::pair<double, double>> two_close{{0.0, 0.0}, {0.3, 0.0}};
  auto nb = build_topology(two_close, 0.4);
  CHECK(nb[0] == std::vector<int>{0, 1});
  CHECK(nb[1] == std::vector<int>{0, 1});

  const std::vector<std::pair<double, double>> two_far{{0.0, 0.0}, {0.5, 0.0}};
  nb = build_topology(two_far, 0.4);
  CHECK(nb[0] == std::vector<int>{0});
  CHECK(nb[1] == std::vector<int>{1});

  CHECK_THROWS_AS(build_topology({{0.1, 0.1}, {0.1, 0.1}}, 0.4), ConfigError);
}

TEST_CASE("topology matches the all-pairs distance oracle") {
  RngStream rng(99);
  std::vector<std::pair<double, double>> pos(10);
  for (auto& p : pos) p = {rng.uniform(), rng.uniform()};
  const double r_o = 0.4;
  const auto nb = build_topology(pos, r_o);
  for (int k = 0; k < 10; ++k) {
    std::set<int> expected{k};
    for (int l = 0; l < 10; ++l) {
      if (l == k) continue;
      const double dx = pos[k].first - pos[l].first, dy = pos[k].second - pos[l].second;
      if (std::hypot(dx, dy) <= r_o) expected.insert(l);
    }
    CHECK(std::set<int>(nb[k].begin(), nb[k].end()) == expected);
    // symmetry and reflexivity
    for (int l : nb[k]) {
      CHECK(std::count(nb[l].begin(), nb[l].end(), k) == 1);
    }
  }
}

TEST_CASE("link threshold values") {
  CHECK(link_threshold(0.4, 0.4, 3.2) == doctest::Approx(1.0));
  CHECK(link_threshold(1e-9, 0.4, 3.2) < 1e-20);  // always-connected limit
  CHECK(link_threshold(0.2, 0.4, 3.2) == doctest::Approx(std::pow(2.0, -3.2)).epsilon(1e-12));
  CHECK(link_threshold(0.2, 0.4, 3.2) == doctest::Approx(0.10882).epsilon(1e-4));
  CHECK_THROWS_AS(link_threshold(-1.0, 0.4, 3.2), ConfigError);
}

TEST_CASE("default network sampling: determinism and documented values") {
  const NetworkModel a = sample_default_network(1234);
  const NetworkModel b = sample_default_network(1234);
  CHECK(network_to_json(a) == network_to_json(b));

  CHECK(a.n == 10);
  CHECK(a.m == 2);
  CHECK(a.w_true[0] == cplx{2.0, 2.0});
  CHECK(a.w_true[1] == cplx{-2.0, 2.0});
  CHECK(a.transmit_power == 1.0);
  CHECK(a.tx_range == 0.4);
  CHECK(a.path_loss_exponent == doctest::Approx(3.2));
  for (const auto& nd : a.nodes) {
    CHECK(nd.step_size == doctest::Approx(0.01));
    CHECK(nd.regressor_variance > 0.0);
    CHECK(nd.meas_noise_var >= 0.0);
  }
  const NetworkModel c = sample_default_network(4321);
  CHECK(network_to_json(a) != network_to_json(c));
}

TEST_CASE("sampled networks never leave a node isolated; connectivity is reported") {
  int connected_count = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const NetworkModel net = sample_default_network(seed);
    for (int k = 0; k < net.n; ++k) {
      CHECK(net.degree(k) >= 2);  // self plus at least one neighbor
    }
    CHECK(net.connected == is_connected(net.neighbors));
    if (net.connected) ++connected_count;
  }
  CHECK(connected_count >= 30);  // reported, not required
}

TEST_CASE("network JSON round trip is lossless") {
  const NetworkModel net = sample_default_network(77);
  const NetworkModel back = network_from_json(network_to_json(net));
  CHECK(network_to_json(back) == network_to_json(net));
  CHECK(back.n == net.n);
  for (int k = 0; k < net.n; ++k) {
    for (int l : net.neighbors[k]) {
      if (l == k) continue;
      CHECK(back.link(l, k).distance == net.link(l, k).distance);
      CHECK(back.link(l, k).link_noise_var == net.link(l, k).link_noise_var);
      CHECK(back.link(l, k).nu == doctest::Approx(net.link(l, k).nu).epsilon(1e-15));
    }
  }
}
