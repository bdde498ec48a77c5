#include "fadediff/channel.hpp"

#include <cmath>
#include <stdexcept>

namespace fadediff {

double success_probability(double nu, double lambda) {
  if (nu < 0.0 || lambda <= 0.0) {
    throw ConfigError("success_probability: need nu >= 0 and lambda > 0");
  }
  return std::exp(-lambda * nu);
}

double lambda_true(double sigma_h2) {
  if (sigma_h2 <= 0.0) throw ConfigError("lambda_true: fading variance must be positive");
  return 1.0 / sigma_h2;
}

double lambda_pilot(double sigma_h2, double r_alpha_over_pt, double sigma_y2, int n_pilots) {
  if (n_pilots < 1) throw ConfigError("lambda_pilot: need at least one pilot");
  return 1.0 / (sigma_h2 + r_alpha_over_pt * sigma_y2 / n_pilots);
}

double lambda_for(const LinkParams& lp, const CsiSpec& csi) {
  if (csi.mode == CsiMode::PilotCsi) {
    const double r_alpha_over_pt = 1.0 / (lp.path_gain * lp.path_gain);
    return lambda_pilot(lp.fading_variance, r_alpha_over_pt, lp.pilot_noise_var, csi.n_pilots);
  }
  return lambda_true(lp.fading_variance);
}

double link_success_probability(const LinkParams& lp, const CsiSpec& csi) {
  return success_probability(lp.nu, lambda_for(lp, csi));
}

cplx draw_fading(double sigma_h2, RngStream& rng) {
  if (sigma_h2 <= 0.0) throw ConfigError("draw_fading: fading variance must be positive");
  return rng.cgauss(sigma_h2);
}

void transmit(const cplx* payload, std::size_t m, cplx h, double path_gain, double noise_var,
              RngStream& rng, cplx* out) {
  const cplx beta = h * path_gain;
  for (std::size_t i = 0; i < m; ++i) {
    out[i] = beta * payload[i];
    if (noise_var > 0.0) out[i] += rng.cgauss(noise_var);
  }
}

cplx pilot_estimate(cplx h, double path_gain, double pilot_noise_var, int n_pilots,
                    RngStream& rng) {
  if (n_pilots < 1) throw ConfigError("pilot_estimate: need at least one pilot");
  cplx acc{0.0, 0.0};
  for (int j = 0; j < n_pilots; ++j) {
    acc += h * path_gain + rng.cgauss(pilot_noise_var);
  }
  return acc / (path_gain * static_cast<double>(n_pilots));
}

cplx equalizer_gain(cplx h_hat, double path_gain, double nu, bool is_self) {
  if (is_self) return cplx{1.0, 0.0};
  if (std::norm(h_hat) < nu) {
    throw std::logic_error("equalizer_gain: link is not active");
  }
  const cplx beta = h_hat * path_gain;
  return std::conj(beta) / std::norm(beta);
}

ChannelDraw draw_channel_slot(const NetworkModel& net, const CsiSpec& csi, RngStream& chan_rng,
                              RngStream& pilot_rng, bool reciprocal_fading) {
  ChannelDraw draw;
  draw.n = net.n;
  const std::size_t nn = static_cast<std::size_t>(net.n) * net.n;
  draw.h.assign(nn, cplx{0.0, 0.0});
  draw.h_hat.assign(nn, cplx{0.0, 0.0});
  draw.active.assign(nn, 0);
  draw.active_sets.resize(net.n);

  // self links: undistorted, h_hat = 1, always active
  for (int k = 0; k < net.n; ++k) {
    draw.h[static_cast<std::size_t>(k) * net.n + k] = 1.0;
    draw.h_hat[static_cast<std::size_t>(k) * net.n + k] = 1.0;
    draw.active[static_cast<std::size_t>(k) * net.n + k] = 1;
  }

  for (int k = 0; k < net.n; ++k) {
    for (int l : net.neighbors[k]) {
      if (l == k) continue;
      const std::size_t idx = static_cast<std::size_t>(l) * net.n + k;
      const LinkParams& lp = net.link(l, k);
      cplx h;
      if (reciprocal_fading && k > l && net.is_neighbor(k, l)) {
        h = draw.h[static_cast<std::size_t>(k) * net.n + l];
      } else {
        h = draw_fading(lp.fading_variance, chan_rng);
      }
      draw.h[idx] = h;
      cplx h_hat = h;
      if (csi.mode == CsiMode::PilotCsi) {
        h_hat = pilot_estimate(h, lp.path_gain, lp.pilot_noise_var, csi.n_pilots, pilot_rng);
      }
      draw.h_hat[idx] = h_hat;
      draw.active[idx] = std::norm(h_hat) >= lp.nu ? 1 : 0;
    }
    draw.active_sets[k] = gate_active_set(net, k, draw.h_hat);
  }
  return draw;
}

std::vector<int> gate_active_set(const NetworkModel& net, int receiver,
                                 const std::vector<cplx>& h_hat_dense) {
  std::vector<int> active;
  for (int l : net.neighbors[receiver]) {
    if (l == receiver) {
      active.push_back(l);
      continue;
    }
    const cplx h_hat = h_hat_dense[static_cast<std::size_t>(l) * net.n + receiver];
    if (std::norm(h_hat) >= net.link(l, receiver).nu) active.push_back(l);
  }
  return active;
}

}  // namespace fadediff
