#include <cmath>

#include "doctest.h"
#include "fadediff/engine.hpp"
#include "fadediff/rng.hpp"

using namespace fadediff;

namespace {

NetworkModel tiny_network(int n, std::uint64_t seed, double meas_noise = -1.0) {
  NetworkOptions opt;
  opt.n = n;
  NetworkModel net = sample_network(seed, opt);
  if (meas_noise >= 0.0) {
    for (auto& nd : net.nodes) nd.meas_noise_var = meas_noise;
  }
  return net;
}

RunSpec spec_for(Algorithm alg, CsiMode csi, int iters, std::uint64_t seed) {
  RunSpec s;
  s.algorithm = alg;
  s.csi.mode = csi;
  s.iterations = iters;
  s.seed = seed;
  return s;
}

}  // namespace

TEST_CASE("adapt_step: zero step and fixed point") {
  const cplx w[2] = {{1.0, -0.5}, {0.25, 2.0}};
  const cplx u[2] = {{0.3, 0.1}, {-0.7, 0.4}};
  cplx psi[2];
  // mu = 0 leaves the weight unchanged
  adapt_step(w, u, cplx{5.0, 1.0}, 0.0, 2, psi);
  CHECK(psi[0] == w[0]);
  CHECK(psi[1] == w[1]);
  // w = w_true and no noise: d = u w exactly, so psi = w
  cplx d{0.0, 0.0};
  for (int j = 0; j < 2; ++j) d += u[j] * w[j];
  adapt_step(w, u, d, 0.01, 2, psi);
  CHECK(std::abs(psi[0] - w[0]) < 1e-16);
  CHECK(std::abs(psi[1] - w[1]) < 1e-16);
}

TEST_CASE("single-node noise-free LMS converges to the true parameter") {
  NetworkOptions opt;
  opt.n = 1;
  NetworkModel net = sample_network(3, opt);
  net.nodes[0].meas_noise_var = 0.0;
  const GammaWeights g = relative_degree_gamma(net.neighbors);
  const RunRecord rec =
      run_realization(net, g, spec_for(Algorithm::NonCoop, CsiMode::Ideal, 10000, 42));
  CHECK(!rec.diverged);
  CHECK(rec.network_msd.front() == doctest::Approx(16.0));  // ||w_true||^2 at w = 0
  CHECK(rec.network_msd.back() < 1e-12);                    // ||w - w_true|| < 1e-6
}

TEST_CASE("runs are deterministic given the seed") {
  const NetworkModel net = tiny_network(5, 17);
  const GammaWeights g = relative_degree_gamma(net.neighbors);
  const RunSpec s = spec_for(Algorithm::Atc, CsiMode::PilotCsi, 200, 99);
  const RunRecord a = run_realization(net, g, s);
  const RunRecord b = run_realization(net, g, s);
  REQUIRE(a.network_msd.size() == b.network_msd.size());
  for (std::size_t t = 0; t < a.network_msd.size(); ++t) {
    CHECK(a.network_msd[t] == b.network_msd[t]);
    CHECK(a.network_emse[t] == b.network_emse[t]);
  }
}

TEST_CASE("mode collapse: isolated nodes make ATC, CTA and non-cooperative identical") {
  NetworkOptions opt;
  opt.n = 4;
  opt.tx_range = 1e-6;  // nobody is in range
  NetworkModel net = sample_network(11, opt);
  const GammaWeights g = relative_degree_gamma(net.neighbors);
  const RunRecord noncoop =
      run_realization(net, g, spec_for(Algorithm::NonCoop, CsiMode::Ideal, 300, 5));
  const RunRecord atc =
      run_realization(net, g, spec_for(Algorithm::Atc, CsiMode::PerfectCsi, 300, 5));
  const RunRecord cta =
      run_realization(net, g, spec_for(Algorithm::Cta, CsiMode::PerfectCsi, 300, 5));
  for (std::size_t t = 0; t < noncoop.network_msd.size(); ++t) {
    CHECK(noncoop.network_msd[t] == atc.network_msd[t]);
    CHECK(noncoop.network_msd[t] == cta.network_msd[t]);
  }
}

TEST_CASE("mode collapse: perfect CSI with clean always-on links equals ideal diffusion") {
  NetworkModel net = tiny_network(6, 23);
  for (auto& lp : net.links) {
    lp.link_noise_var = 0.0;
    lp.pilot_noise_var = 0.0;
    lp.nu = 0.0;  // every link always active
  }
  const GammaWeights g = relative_degree_gamma(net.neighbors);
  const RunRecord ideal =
      run_realization(net, g, spec_for(Algorithm::IdealAtc, CsiMode::Ideal, 400, 7));
  const RunRecord wireless =
      run_realization(net, g, spec_for(Algorithm::Atc, CsiMode::PerfectCsi, 400, 7));
  REQUIRE(!wireless.diverged);
  for (std::size_t t = 0; t < ideal.network_msd.size(); ++t) {
    CHECK(ideal.network_msd[t] == wireless.network_msd[t]);
    CHECK(ideal.network_emse[t] == wireless.network_emse[t]);
  }
}

TEST_CASE("CTA with clean always-on links matches a hand-rolled reference") {
  NetworkModel net = tiny_network(4, 31, 0.1);
  for (auto& lp : net.links) {
    lp.link_noise_var = 0.0;
    lp.pilot_noise_var = 0.0;
    lp.nu = 0.0;
  }
  const GammaWeights g = relative_degree_gamma(net.neighbors);
  const int iters = 150;
  const std::uint64_t seed = 77;
  const RunRecord rec =
      run_realization(net, g, spec_for(Algorithm::Cta, CsiMode::PerfectCsi, iters, seed));

  // reference: static combine-then-adapt with the same data substream
  const int n = net.n, m = net.m;
  RngStream data(mix_seed(seed, kStreamData));
  std::vector<cplx> w(static_cast<std::size_t>(n) * m, cplx{0.0, 0.0});
  const std::vector<cplx> wt = net.w_true_stacked();
  for (int t = 0; t < iters; ++t) {
    double msd = 0.0;
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < m; ++j) msd += std::norm(wt[k * m + j] - w[k * m + j]);
    CHECK(rec.network_msd[t] == doctest::Approx(msd / n).epsilon(1e-12));

    std::vector<cplx> u(static_cast<std::size_t>(n) * m);
    std::vector<cplx> v(n);
    for (int k = 0; k < n; ++k) {
      for (int j = 0; j < m; ++j) u[k * m + j] = data.cgauss(net.nodes[k].regressor_variance);
      v[k] = data.cgauss(net.nodes[k].meas_noise_var);
    }
    std::vector<cplx> psi(static_cast<std::size_t>(n) * m, cplx{0.0, 0.0});
    for (int k = 0; k < n; ++k) {
      double off = 0.0;
      for (int l : net.neighbors[k]) {
        if (l == k) continue;
        off += g.at(l, k);
        for (int j = 0; j < m; ++j) psi[k * m + j] += g.at(l, k) * w[l * m + j];
      }
      for (int j = 0; j < m; ++j) psi[k * m + j] += (1.0 - off) * w[k * m + j];
    }
    for (int k = 0; k < n; ++k) {
      cplx d{0.0, 0.0};
      for (int j = 0; j < m; ++j) d += u[k * m + j] * wt[k * m + j];
      d += v[k];
      cplx err = d;
      for (int j = 0; j < m; ++j) err -= u[k * m + j] * psi[k * m + j];
      for (int j = 0; j < m; ++j)
        w[k * m + j] = psi[k * m + j] + net.nodes[k].step_size * std::conj(u[k * m + j]) * err;
    }
  }
}

TEST_CASE("CTA with zero step size is pure averaging from the zero state") {
  NetworkModel net = tiny_network(5, 41);
  for (auto& nd : net.nodes) nd.step_size = 0.0;
  for (auto& lp : net.links) lp.link_noise_var = 0.0;  // isolate the averaging dynamics
  const GammaWeights g = relative_degree_gamma(net.neighbors);
  const RunRecord rec =
      run_realization(net, g, spec_for(Algorithm::Cta, CsiMode::PerfectCsi, 50, 3));
  for (double v : rec.network_msd) CHECK(v == doctest::Approx(16.0));
}

TEST_CASE("unequalized diffusion over fading links diverges and is flagged") {
  const NetworkModel net = tiny_network(8, 53);
  const GammaWeights g = relative_degree_gamma(net.neighbors);
  const RunRecord rec = run_realization(
      net, g, spec_for(Algorithm::NoEqualization, CsiMode::NoEqualization, 2000, 1));
  CHECK(rec.diverged);
  CHECK(rec.diverged_at > 0);
  CHECK(rec.network_msd.size() == static_cast<std::size_t>(rec.diverged_at));
}

TEST_CASE("error-window mean accumulates the trailing weight errors") {
  NetworkModel net = tiny_network(3, 61, 0.0);
  const GammaWeights g = relative_degree_gamma(net.neighbors);
  RunSpec s = spec_for(Algorithm::NonCoop, CsiMode::Ideal, 4000, 9);
  s.err_window = 100;
  const RunRecord rec = run_realization(net, g, s);
  REQUIRE(rec.err_window_mean.size() == static_cast<std::size_t>(net.n) * net.m);
  // noise-free: weights converge, so the trailing mean error is ~0
  for (const cplx& e : rec.err_window_mean) CHECK(std::abs(e) < 1e-8);
}
