#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fadediff/engine.hpp"
#include "fadediff/theory.hpp"

namespace fadediff {

// A named algorithm/CSI combination, e.g. "perfect_csi" or "pilot_csi_2".
struct ModeSpec {
  std::string name;
  Algorithm algorithm = Algorithm::Atc;
  CsiSpec csi;
};

// Accepts: ideal, noncoop, perfect_csi, pilot_csi_<n>, no_equalization,
// each optionally prefixed with "cta_" for the combine-then-adapt order
// (where it applies). Throws ConfigError on unknown names.
ModeSpec parse_mode(const std::string& name);

struct EnsembleOptions {
  int runs = 500;
  int iterations = 2000;
  std::uint64_t master_seed = 0;
  int jobs = 0;  // 0 = hardware concurrency
  double steady_window_frac = 0.2;
  // Trailing window for the empirical mean-error vector (0 disables).
  int err_window = 0;
  bool reciprocal_fading = false;
  bool record_node_curves = false;
};

struct LearningCurve {
  std::string mode;
  std::string scope = "network";  // "network" or "node:<k>"
  std::string source = "simulated";
  int runs = 0;            // completed (non-diverged) runs in the average
  int diverged_runs = 0;
  std::vector<double> msd;   // linear scale, row t = after t cycles
  std::vector<double> emse;  // linear scale
  double steady_msd = 0.0;           // mean over the steady window
  double steady_msd_ci = 0.0;        // 95% half-width across runs (linear)
  double steady_emse = 0.0;
  bool all_diverged = false;
};

struct EnsembleResult {
  std::vector<LearningCurve> curves;  // network scope first, then nodes
  // Empirical mean error vector per mode (window-averaged across runs) and
  // its per-component standard error; only filled when err_window > 0.
  std::map<std::string, std::vector<cplx>> mean_error;
  std::map<std::string, std::vector<double>> mean_error_se;
  std::map<std::string, int> diverged_counts;
};

// Runs `runs` seeded realizations per mode and averages them. Run r of every
// mode uses the substream derived from (master_seed, r), so modes share
// their data realizations; reduction order is fixed by run index, which
// makes the result independent of the worker count.
EnsembleResult run_ensemble(const NetworkModel& net, const GammaWeights& gamma,
                            const std::vector<ModeSpec>& modes, const EnsembleOptions& opt);

struct SweepPoint {
  int snr_index = 0;
  std::string mode;
  double steady_msd = 0.0;     // linear
  double steady_msd_ci = 0.0;  // linear 95% half-width
  bool all_diverged = false;
};

// Rescales every link/pilot noise variance by -5 dB per index step and
// records the steady-state MSD per mode. The base network is reused, so
// modes that ignore link noise are bit-identical across indices.
std::vector<SweepPoint> snr_sweep(const NetworkModel& base, const GammaWeights& gamma,
                                  const std::vector<ModeSpec>& modes,
                                  const std::vector<int>& indices, const EnsembleOptions& opt);

struct ModeComparison {
  std::string mode;
  double steady_gap_db = 0.0;         // simulated minus predicted
  double transient_max_gap_db = 0.0;  // after burn-in
  bool steady_pass = false;
  bool transient_pass = false;
};

struct CompareReport {
  std::vector<ModeComparison> rows;
  int burn_in = 50;
  double steady_tol_db = 1.0;
  double transient_tol_db = 2.0;
  bool all_pass() const;
  std::string to_json() const;
};
CompareReport compare_report(const std::vector<LearningCurve>& simulated,
                             const std::vector<LearningCurve>& predicted, int burn_in = 50,
                             double steady_tol_db = 1.0, double transient_tol_db = 2.0);

double to_db(double linear);
// Steady-state estimate over the trailing fraction of a curve.
double steady_mean(const std::vector<double>& curve, double window_frac);

}  // namespace fadediff
