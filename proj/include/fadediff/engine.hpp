#pragma once

#include <cstdint>
#include <vector>

#include "fadediff/channel.hpp"
#include "fadediff/combination.hpp"
#include "fadediff/network.hpp"

namespace fadediff {

enum class Algorithm { Atc, Cta, NonCoop, IdealAtc, NoEqualization };

struct RunSpec {
  Algorithm algorithm = Algorithm::Atc;
  CsiSpec csi;
  int iterations = 2000;
  std::uint64_t seed = 0;
  // Trailing window (in iterations) over which the per-node weight error is
  // averaged; 0 disables.
  int err_window = 0;
  bool record_node_curves = false;
  bool reciprocal_fading = false;
  // A run is flagged divergent when any node weight norm exceeds this.
  double divergence_threshold = 1e6;
};

// One network realization. Row t of the curves refers to the state after t
// adapt+combine cycles: msd[t] = ||w_true - w_t||^2 averaged over nodes
// (msd[0] is the all-zero initialization), emse[t] = |u_{t+1} (w_true - w_t)|^2
// averaged over nodes. Rows stop early when the run diverges.
struct RunRecord {
  std::vector<double> network_msd;
  std::vector<double> network_emse;
  std::vector<std::vector<double>> node_msd;   // optional, N x rows
  std::vector<std::vector<double>> node_emse;  // optional, N x rows
  std::vector<cplx> err_window_mean;           // N*M, empty if window disabled
  bool diverged = false;
  int diverged_at = -1;
  std::uint64_t seed = 0;
};

// Executes one seeded trajectory. Deterministic given (net, gamma, spec);
// distinct purpose substreams are derived from spec.seed so that modes
// sharing a seed also share the data realization.
RunRecord run_realization(const NetworkModel& net, const GammaWeights& gamma,
                          const RunSpec& spec);

// ATC adaptation step, exposed for tests: psi = w + mu * u^* (d - u w).
void adapt_step(const cplx* w, const cplx* u, cplx d, double mu, std::size_t m, cplx* psi);

}  // namespace fadediff
