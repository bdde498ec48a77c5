#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "fadediff/channel.hpp"

using namespace fadediff;

TEST_CASE("fading draws match the circular Gaussian moments") {
  RngStream rng(5);
  const long draws = 1000000;
  cplx mean{0.0, 0.0};
  double power = 0.0;
  for (long i = 0; i < draws; ++i) {
    const cplx h = draw_fading(1.0, rng);
    mean += h;
    power += std::norm(h);
  }
  mean /= static_cast<double>(draws);
  power /= static_cast<double>(draws);
  CHECK(std::abs(mean) < 0.005);
  CHECK(power > 0.997);
  CHECK(power < 1.003);
}

TEST_CASE("|h|^2 is exponential: KS statistic against the CDF") {
  RngStream rng(6);
  const long draws = 1000000;
  std::vector<double> samples(draws);
  for (auto& s : samples) s = std::norm(draw_fading(1.0, rng));
  std::sort(samples.begin(), samples.end());
  double ks = 0.0;
  for (long i = 0; i < draws; ++i) {
    const double cdf = 1.0 - std::exp(-samples[i]);
    const double hi = static_cast<double>(i + 1) / draws;
    const double lo = static_cast<double>(i) / draws;
    ks = std::max({ks, std::abs(cdf - hi), std::abs(cdf - lo)});
  }
  CHECK(ks < 0.002);
}

TEST_CASE("success probability forms") {
  CHECK(success_probability(1.0, lambda_true(1.0)) == doctest::Approx(std::exp(-1.0)));
  CHECK(success_probability(0.0, 2.5) == doctest::Approx(1.0));
  // pilot form with the documented example values
  const double r = 0.4, alpha = 3.2, pt = 1.0, sigma2 = 0.01;
  const double r_alpha_over_pt = std::pow(r, alpha) / pt;
  const double lambda = lambda_pilot(1.0, r_alpha_over_pt, sigma2, 1);
  CHECK(lambda == doctest::Approx(0.999467).epsilon(1e-4));
  CHECK(success_probability(1.0, lambda) == doctest::Approx(0.36808).epsilon(1e-4));
  CHECK_THROWS_AS(success_probability(-0.1, 1.0), ConfigError);
}

TEST_CASE("transmit: unit gain with no noise, reproducibility, noise covariance") {
  const double r_o = 0.4, alpha = 3.2;
  const double pt = std::pow(r_o, alpha);  // makes pg = 1 at r = r_o
  const double pg = path_gain(pt, r_o, alpha);
  CHECK(pg == doctest::Approx(1.0));

  RngStream rng(9);
  std::vector<cplx> payload{{1.0, 2.0}, {-0.5, 0.25}};
  std::vector<cplx> out(2);
  transmit(payload.data(), 2, cplx{1.0, 0.0}, pg, 0.0, rng, out.data());
  CHECK(out[0] == payload[0]);
  CHECK(out[1] == payload[1]);

  // zero payload: output is pure noise with the requested covariance
  std::vector<cplx> zero{{0.0, 0.0}, {0.0, 0.0}};
  const double var = 0.3;
  double acc = 0.0;
  cplx cross{0.0, 0.0};
  const long draws = 200000;
  for (long i = 0; i < draws; ++i) {
    transmit(zero.data(), 2, cplx{0.7, -0.1}, pg, var, rng, out.data());
    acc += std::norm(out[0]) + std::norm(out[1]);
    cross += out[0] * std::conj(out[1]);
  }
  CHECK(acc / (2 * draws) == doctest::Approx(var).epsilon(0.01));
  CHECK(std::abs(cross) / draws < 0.01);

  // determinism under a fixed substream
  RngStream r1(123), r2(123);
  std::vector<cplx> o1(2), o2(2);
  transmit(payload.data(), 2, cplx{0.3, 0.4}, 2.0, 0.5, r1, o1.data());
  transmit(payload.data(), 2, cplx{0.3, 0.4}, 2.0, 0.5, r2, o2.data());
  CHECK(o1[0] == o2[0]);
  CHECK(o1[1] == o2[1]);
}

TEST_CASE("pilot estimation error variance follows (r^a/Pt) sigma^2 / n") {
  RngStream rng(10);
  const double pt = 1.0, r = 0.33, alpha = 3.2;
  const double pg = path_gain(pt, r, alpha);
  const double sigma2 = 0.05;
  const double expected1 = std::pow(r, alpha) / pt * sigma2;

  for (int n : {1, 2}) {
    double acc = 0.0;
    const long draws = 1000000;
    for (long i = 0; i < draws; ++i) {
      const cplx h = draw_fading(1.0, rng);
      const cplx hat = pilot_estimate(h, pg, sigma2, n, rng);
      acc += std::norm(h - hat);
    }
    const double emp = acc / draws;
    CHECK(emp == doctest::Approx(expected1 / n).epsilon(0.01));
  }

  // noiseless pilots recover the channel exactly
  RngStream rng2(11);
  const cplx h = draw_fading(1.0, rng2);
  const cplx hat = pilot_estimate(h, pg, 0.0, 1, rng2);
  CHECK(std::abs(h - hat) < 1e-15);
  CHECK_THROWS_AS(pilot_estimate(h, pg, 0.1, 0, rng2), ConfigError);
}

TEST_CASE("equalizer gain: zero-forcing identity, self gain, gating contract") {
  const double pg = 3.7;
  RngStream rng(12);
  const cplx h = draw_fading(1.0, rng);
  const double nu = 0.01;
  REQUIRE(std::norm(h) >= nu);
  const cplx g = equalizer_gain(h, pg, nu, false);
  CHECK(std::abs(g * (h * pg) - cplx{1.0, 0.0}) < 1e-14);
  // the fused factor used in the combination step cancels exactly
  CHECK(zero_forcing_factor(h * pg, h * pg) == cplx{1.0, 0.0});
  CHECK(equalizer_gain(h, pg, nu, true) == cplx{1.0, 0.0});
  CHECK_THROWS_AS(equalizer_gain(cplx{1e-9, 0.0}, pg, 0.5, false), std::logic_error);
  // bound |g|^2 <= (r^a/Pt)/nu on active links
  const double bound = (1.0 / (pg * pg)) / nu;
  CHECK(std::norm(g) <= bound * (1.0 + 1e-12));
}

TEST_CASE("gating: empirical link inclusion matches e^(-lambda nu)") {
  NetworkOptions opt;
  opt.n = 4;
  const NetworkModel net = sample_network(2024, opt);
  RngStream chan(77), pilot(78);

  for (const CsiSpec csi : {CsiSpec{CsiMode::PerfectCsi, 1}, CsiSpec{CsiMode::PilotCsi, 1}}) {
    std::vector<long> hits(static_cast<std::size_t>(net.n) * net.n, 0);
    const long slots = 100000;
    for (long s = 0; s < slots; ++s) {
      const ChannelDraw draw = draw_channel_slot(net, csi, chan, pilot);
      for (int k = 0; k < net.n; ++k)
        for (int l : net.neighbors[k]) {
          if (l != k && draw.is_active(l, k)) ++hits[static_cast<std::size_t>(l) * net.n + k];
        }
    }
    for (int k = 0; k < net.n; ++k)
      for (int l : net.neighbors[k]) {
        if (l == k) continue;
        const double expected = link_success_probability(net.link(l, k), csi);
        const double emp =
            static_cast<double>(hits[static_cast<std::size_t>(l) * net.n + k]) / slots;
        CHECK(std::abs(emp - expected) < 0.01);
      }
  }
}

TEST_CASE("active sets: self always present, subset of static neighbors") {
  NetworkOptions opt;
  opt.n = 6;
  const NetworkModel net = sample_network(5, opt);
  RngStream chan(1), pilot(2);
  for (int s = 0; s < 200; ++s) {
    const ChannelDraw draw = draw_channel_slot(net, CsiSpec{CsiMode::PilotCsi, 1}, chan, pilot);
    for (int k = 0; k < net.n; ++k) {
      CHECK(std::count(draw.active_sets[k].begin(), draw.active_sets[k].end(), k) == 1);
      for (int l : draw.active_sets[k]) {
        CHECK(net.is_neighbor(l, k));
        CHECK(draw.is_active(l, k));
      }
    }
  }
}

TEST_CASE("nu = 0 keeps every neighbor active") {
  NetworkOptions opt;
  opt.n = 5;
  NetworkModel net = sample_network(31, opt);
  for (auto& lp : net.links) lp.nu = 0.0;
  RngStream chan(3), pilot(4);
  const ChannelDraw draw = draw_channel_slot(net, CsiSpec{CsiMode::PerfectCsi, 1}, chan, pilot);
  for (int k = 0; k < net.n; ++k) {
    CHECK(draw.active_sets[k] == net.neighbors[k]);
  }
}
