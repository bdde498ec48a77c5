#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fadediff/harness.hpp"
#include "fadediff/network.hpp"

namespace fadediff {

// Parsed experiment configuration. The JSON schema is strict: unknown keys
// anywhere in the file are rejected (see docs/config.md in the README).
struct AppConfig {
  // network: either sampled from the documented distributions...
  NetworkOptions network_options;
  std::uint64_t network_seed = 1;
  // ...or embedded verbatim
  std::optional<NetworkModel> explicit_network;

  // algorithm
  std::vector<std::string> modes = {"ideal", "perfect_csi", "pilot_csi_1", "pilot_csi_2",
                                    "noncoop"};
  GammaRule gamma_rule = GammaRule::RelativeDegree;
  int iterations = 2000;
  int runs = 500;
  bool reciprocal_fading = false;
  int err_window = 0;

  // theory
  BarFVariant barf_variant = BarFVariant::Gaussian;
  RvMode rv_mode = RvMode::MonteCarlo;
  long mc_samples = 500000;
  std::vector<std::string> theory_modes = {"perfect_csi"};
  bool transient = true;

  // sweep
  std::vector<int> sweep_indices = {1, 2, 3, 4, 5, 6, 7};
  std::vector<std::string> sweep_modes = {"ideal", "noncoop", "perfect_csi", "pilot_csi_1"};
  int sweep_runs = 300;
  int sweep_iterations = 1500;

  // output
  std::string out_dir = "out";
  bool per_node_curves = false;
  double steady_window_frac = 0.2;

  std::uint64_t master_seed = 42;

  std::string canonical_json() const;
  std::uint64_t hash() const;  // FNV-1a over the canonical form (not crypto)
};

AppConfig load_config(const std::string& path);
AppConfig parse_config(const std::string& json_text);

// Materializes the network (explicit or sampled) described by the config.
NetworkModel make_network(const AppConfig& cfg);

}  // namespace fadediff
