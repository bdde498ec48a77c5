#pragma once

#include <cstdint>
#include <vector>

#include "fadediff/channel.hpp"
#include "fadediff/combination.hpp"
#include "fadediff/linalg.hpp"
#include "fadediff/network.hpp"

namespace fadediff {

struct StabilityError : std::runtime_error {
  double rho;
  StabilityError(const std::string& msg, double r) : std::runtime_error(msg), rho(r) {}
};

// Conditional moments of one directed link under SNR gating, estimated by
// Monte Carlo over (fading, pilot noise) pairs. g is the zero-forcing gain
// formed from the estimated coefficient, vbar the averaged pilot noise,
// I the gating indicator.
struct LinkMoments {
  cplx c1{0.0, 0.0};  // E[I g vbar]       -> e_{l,k} = -gamma_{l,k} * c1
  double c1_se = 0.0;
  double c2 = 0.0;  // E[I |g vbar|^2]     -> E|e|^2 = gamma^2 * c2
  double c2_se = 0.0;
  double c3 = 0.0;  // E[I |g|^2]          -> E[a^2 |g|^2] = gamma^2 * c3
  double c3_se = 0.0;
  double p_emp = 0.0;
  long samples = 0;
  long accepted = 0;
};

LinkMoments estimate_link_moments(const LinkParams& lp, const CsiSpec& csi, long samples,
                                  std::uint64_t seed);

// Second-order Taylor approximation of E[I |g|^2] = p E[ 1/z | gated ] with
// z the gated received power (truncated exponential).
double taylor_gated_inverse_moment(double lambda, double nu, double pt_over_ralpha);
// Exact value of the same moment via the exponential integral (test oracle).
double exact_gated_inverse_moment(double lambda, double nu, double pt_over_ralpha);

enum class TheoryCsi { Ideal, PerfectCsi, PilotCsi, NonCoop };
enum class BarFVariant { Gaussian, SmallStep };
enum class RvMode { MonteCarlo, Taylor };

struct TheoryOptions {
  TheoryCsi csi = TheoryCsi::PerfectCsi;
  int n_pilots = 1;
  BarFVariant barf = BarFVariant::Gaussian;
  RvMode rv_mode = RvMode::MonteCarlo;
  long mc_samples = 500000;
  std::uint64_t seed = 1;
  // -1/0/+1: evaluate with all Monte Carlo moments shifted by that many
  // standard errors (prediction sensitivity reporting).
  int moment_shift = 0;
};

// Everything the closed-form performance analysis needs, assembled once per
// (network, combination rule, CSI mode).
struct TheoryModel {
  int n = 0, m = 0;
  TheoryOptions options;
  std::vector<double> success_probs;  // dense n*n
  CMat A;   // N x N mean combination matrix
  CMat E;   // N x N mean estimation-error matrix (zero unless PilotCsi)
  CMat B;   // NM x NM mean recursion matrix (A+E)^T (I - M R)
  CMat IMR; // NM x NM,  I - M R
  CMat P;   // NM x NM,  E[p p^*]
  CMat Rv;  // NM x NM block diagonal equalized-link-noise covariance
  CMat K2;  // N^2 x N^2 closed-form E[A_i (x) A_i]
  CMat Dbase;  // N^2 x N^2 scalar factor of D
  CMat barF;   // (NM)^2
  CMat F;      // barF * (Dbase (x) I_{M^2})
  std::vector<cplx> gamma_vec;  // steady-state driving vector
  std::vector<cplx> bias;       // NM; lim E[w_true - w_i] (zero unless PilotCsi)
  double rho_B = 0.0;
  double rho_F = 0.0;
  double beta = 1.0;
  double e_norm_bound = 0.0;  // block-infinity bound on the extended E^T
  double d_norm_bound = 0.0;  // block-infinity bound on D
  std::vector<LinkMoments> link_moments;  // dense n*n (PilotCsi only)
  std::vector<CMat> r_u;                  // per-node regressor covariance
  std::vector<double> mu;                 // per-node step size
  std::vector<cplx> omega_vec;            // 1_N (x) w_true
};

TheoryModel build_theory(const NetworkModel& net, const GammaWeights& gamma,
                         const TheoryOptions& opt);

// Closed-form E[A_i (x) A_i] from the per-link success probabilities:
// independent columns factor into products of means; same-column second
// moments follow from the Bernoulli structure of the dynamic weights.
CMat second_moment_AA(const GammaWeights& gamma, const std::vector<std::vector<int>>& neighbors,
                      const std::vector<double>& success_probs);

// Fourth-moment (circular Gaussian regressors) expression for
// E[(I - M R_i)^T (x)_b (I - M R_i)]; beta = 1 complex data, 2 real data.
CMat barF_gaussian(const std::vector<CMat>& r_u, const std::vector<double>& mu, double beta);
// Small step-size approximation (I - M R)^T (x)_b (I - M R).
CMat barF_small_step(const std::vector<CMat>& r_u, const std::vector<double>& mu);

// lim E[w_true - w_i]; throws StabilityError when rho(B) >= 1.
std::vector<cplx> mean_bias(const TheoryModel& model);

struct StepRange {
  double lo = 0.0, hi = 0.0;
};
// Mean stability step-size interval per node given a bound on ||E||.
std::vector<StepRange> mean_step_bounds(const std::vector<CMat>& r_u, double e_norm_bound);
// Mean-square stability interval per node given a bound on ||D||.
std::vector<StepRange> ms_step_bounds(const std::vector<CMat>& r_u, double d_norm_bound);

enum class Scope { Network, Node };
enum class Metric { Msd, Emse };

// Steady-state MSD/EMSE from the variance relation. Throws StabilityError
// when rho(F) >= 1.
double steady_state(const TheoryModel& model, Metric metric, Scope scope, int node = 0,
                    double* rcond = nullptr);

struct TransientCurves {
  std::vector<double> msd;   // row t = predicted value after t cycles
  std::vector<double> emse;  // aligned with the simulator's row convention
  bool divergent = false;
};
// Learning-curve recursion (perfect-CSI analysis); iterations rows.
TransientCurves transient_curves(const TheoryModel& model, int iterations,
                                 Scope scope = Scope::Network, int node = 0);

}  // namespace fadediff
