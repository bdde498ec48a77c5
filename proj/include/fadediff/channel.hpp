#pragma once

#include <cstdint>
#include <vector>

#include "fadediff/network.hpp"
#include "fadediff/rng.hpp"

namespace fadediff {

// How a receiving node obtains the channel coefficients it equalizes with.
//   Ideal          — no channel at all, psi arrives undistorted
//   PerfectCsi     — receiver knows the fading coefficient exactly
//   PilotCsi       — least-squares estimate from n_pilots pilot symbols
//   NoEqualization — raw distorted data combined with unit gain
//                    (gating still uses the true coefficient)
enum class CsiMode { Ideal, PerfectCsi, PilotCsi, NoEqualization };

struct CsiSpec {
  CsiMode mode = CsiMode::PerfectCsi;
  int n_pilots = 1;
};

// Pr(|h|^2 >= nu) for an exponentially distributed |h|^2 with rate lambda.
double success_probability(double nu, double lambda);

// Rate of |h|^2 when gating on the true coefficient.
double lambda_true(double sigma_h2);
// Rate of |h_hat|^2 when gating on the n-pilot estimate: the estimate is
// circular Gaussian with variance sigma_h^2 + (r^alpha/Pt) sigma_y^2 / n.
double lambda_pilot(double sigma_h2, double r_alpha_over_pt, double sigma_y2, int n_pilots);
double lambda_for(const LinkParams& lp, const CsiSpec& csi);
// Steady-state success probability of a directed link under a CSI mode.
double link_success_probability(const LinkParams& lp, const CsiSpec& csi);

// One circular Gaussian fading draw with E|h|^2 = sigma_h2.
cplx draw_fading(double sigma_h2, RngStream& rng);

// Applies h * path_gain to the payload and adds circular Gaussian link noise.
void transmit(const cplx* payload, std::size_t m, cplx h, double path_gain, double noise_var,
              RngStream& rng, cplx* out);

// Least-squares channel estimate from n unit pilots:
//   h_hat = sqrt(r^alpha/Pt) * mean(y_j),  y_j = h*path_gain + v_j.
cplx pilot_estimate(cplx h, double path_gain, double pilot_noise_var, int n_pilots,
                    RngStream& rng);

// Zero-forcing equalizer gain. Formed against the combined coefficient
// beta = h_hat * path_gain so that a perfectly known channel cancels
// exactly. Throws std::logic_error when called on a gated-out link.
cplx equalizer_gain(cplx h_hat, double path_gain, double nu, bool is_self);

// Residual signal factor after equalization: g * beta_true computed as
// (conj(beta_hat) beta_true) / |beta_hat|^2, which is exactly 1.0 when the
// estimate equals the true coefficient. The combination step applies this
// to the payload and the plain gain to the additive noise.
inline cplx zero_forcing_factor(cplx beta_hat, cplx beta_true) {
  return std::conj(beta_hat) * beta_true / std::norm(beta_hat);
}

// One time slot of channel state for every directed link of the network.
struct ChannelDraw {
  int n = 0;
  std::vector<cplx> h;           // dense n*n, sender-major: h[l*n+k] for l->k
  std::vector<cplx> h_hat;       // estimate used for gating and equalization
  std::vector<std::uint8_t> active;
  std::vector<std::vector<int>> active_sets;  // per receiver, sorted, incl self

  bool is_active(int sender, int receiver) const {
    return active[static_cast<std::size_t>(sender) * n + receiver] != 0;
  }
};

// Draw fading and (for PilotCsi) pilot observations for every directed
// neighbor link, then gate on |h_hat|^2 >= nu. Links are visited in
// receiver-major order with senders in sorted neighbor order; this order is
// part of the reproducibility contract. Pure given the two streams.
ChannelDraw draw_channel_slot(const NetworkModel& net, const CsiSpec& csi, RngStream& chan_rng,
                              RngStream& pilot_rng, bool reciprocal_fading = false);

// Active set for one receiver given per-link estimates (exposed for tests).
std::vector<int> gate_active_set(const NetworkModel& net, int receiver,
                                 const std::vector<cplx>& h_hat_dense);

}  // namespace fadediff
