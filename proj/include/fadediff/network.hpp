#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fadediff/linalg.hpp"

namespace fadediff {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NodeParams {
  double x = 0.0, y = 0.0;
  double regressor_variance = 1.0;  // sigma_u^2; R_u = sigma_u^2 I unless overridden
  CMat regressor_covariance;        // M x M Hermitian positive definite
  double meas_noise_var = 0.0;      // sigma_v^2
  double step_size = 0.01;          // mu
};

// Parameters of one directed link l -> k (distances and noise powers are
// symmetric by construction; fading draws need not be).
struct LinkParams {
  double distance = 0.0;
  double fading_variance = 1.0;  // sigma_h^2
  double link_noise_var = 0.0;   // sigma^2 on payload transmissions
  double pilot_noise_var = 0.0;  // sigma^2 on pilot observations
  double path_gain = 1.0;        // sqrt(Pt / r^alpha)
  double nu = 0.0;               // gating threshold (r / r_o)^alpha
};

struct NetworkModel {
  int n = 0;  // number of nodes
  int m = 0;  // dimension of the unknown parameter
  std::vector<cplx> w_true;
  double transmit_power = 1.0;
  double tx_range = 0.4;
  double path_loss_exponent = 3.2;
  std::vector<NodeParams> nodes;
  // Sorted neighbor lists, each including the node itself.
  std::vector<std::vector<int>> neighbors;
  // Directed link parameters, dense n x n; valid where sender != receiver
  // and sender is a neighbor of receiver.
  std::vector<LinkParams> links;
  bool connected = false;
  std::uint64_t seed = 0;

  const LinkParams& link(int sender, int receiver) const {
    return links[static_cast<std::size_t>(sender) * n + receiver];
  }
  LinkParams& link(int sender, int receiver) {
    return links[static_cast<std::size_t>(sender) * n + receiver];
  }
  bool is_neighbor(int sender, int receiver) const;
  int degree(int k) const { return static_cast<int>(neighbors[k].size()); }
  // omega = 1_N (x) w_true
  std::vector<cplx> w_true_stacked() const;
};

// nu = (r / r_o)^alpha
double link_threshold(double r, double r_o, double alpha);
double path_gain(double transmit_power, double r, double alpha);

// Neighbor sets by transmission range: l in N_k iff dist <= r_o or l == k.
std::vector<std::vector<int>> build_topology(const std::vector<std::pair<double, double>>& pos,
                                             double r_o);

bool is_connected(const std::vector<std::vector<int>>& neighbors);

// Distributions used when sampling a network. The paper's experiment section
// fixes N, M, w, Pt, r_o, alpha and mu; node/link noise profiles are drawn
// from the documented ranges below.
struct NetworkOptions {
  int n = 10;
  int m = 2;
  std::vector<cplx> w_true = {cplx{2.0, 2.0}, cplx{-2.0, 2.0}};
  double transmit_power = 1.0;
  double tx_range = 0.4;
  double path_loss_exponent = 3.2;
  double step_size = 0.01;
  double sigma_u2_min = 0.8, sigma_u2_max = 1.2;
  double meas_noise_min = 0.05, meas_noise_max = 0.15;
  // Nominal (non-fading) link SNR Pt / (sigma^2 r_o^alpha), drawn per
  // undirected pair, in dB.
  double link_snr_db_min = 34.0, link_snr_db_max = 40.0;
  double fading_variance = 1.0;
  bool reciprocal_fading = false;  // share one fading draw per undirected pair
};

NetworkModel sample_network(std::uint64_t seed, const NetworkOptions& opt);
inline NetworkModel sample_default_network(std::uint64_t seed) {
  return sample_network(seed, NetworkOptions{});
}

// Lossless serialization (used inside experiment configs and sidecars).
std::string network_to_json(const NetworkModel& net);
NetworkModel network_from_json(const std::string& json_text);

}  // namespace fadediff
