#include "fadediff/engine.hpp"

#include <cmath>

#include "fadediff/kernels.hpp"
#include "fadediff/rng.hpp"

namespace fadediff {

void adapt_step(const cplx* w, const cplx* u, cplx d, double mu, std::size_t m, cplx* psi) {
  cplx err = d;
  for (std::size_t j = 0; j < m; ++j) err -= u[j] * w[j];
  for (std::size_t j = 0; j < m; ++j) psi[j] = w[j] + mu * std::conj(u[j]) * err;
}

namespace {

struct NodeDraw {
  std::vector<cplx> u;  // N x M regressors, row k
  std::vector<cplx> v;  // measurement noise per node
};

// Regressors in the fixed node order; isotropic covariance uses the direct
// circular draw, general covariance goes through the Cholesky factor.
void draw_data(const NetworkModel& net, const std::vector<CMat>& chol, RngStream& rng,
               NodeDraw& out) {
  const int m = net.m;
  for (int k = 0; k < net.n; ++k) {
    cplx* u = out.u.data() + static_cast<std::size_t>(k) * m;
    if (chol[k].rows() == 0) {
      for (int j = 0; j < m; ++j) u[j] = rng.cgauss(net.nodes[k].regressor_variance);
    } else {
      // u_b = conj((L z)_b) with z i.i.d. CN(0,1) gives E[conj(u_a) u_b] = R_ab
      std::vector<cplx> z(m);
      for (int j = 0; j < m; ++j) z[j] = rng.cgauss(1.0);
      const CMat& L = chol[k];
      for (int b = 0; b < m; ++b) {
        cplx acc{0.0, 0.0};
        for (int j = 0; j <= b; ++j) acc += L(b, j) * z[j];
        u[b] = std::conj(acc);
      }
    }
    out.v[k] = rng.cgauss(net.nodes[k].meas_noise_var);
  }
}

}  // namespace

RunRecord run_realization(const NetworkModel& net, const GammaWeights& gamma,
                          const RunSpec& spec) {
  if (spec.iterations < 1) throw ConfigError("run_realization: iterations must be >= 1");
  validate_gamma(gamma, net.neighbors);

  const int n = net.n, m = net.m;
  const std::size_t nm = static_cast<std::size_t>(n) * m;

  RngStream data_rng(mix_seed(spec.seed, kStreamData));
  RngStream chan_rng(mix_seed(spec.seed, kStreamChannel));
  RngStream pilot_rng(mix_seed(spec.seed, kStreamPilot));
  RngStream link_rng(mix_seed(spec.seed, kStreamLink));

  // Cholesky factors only where the covariance is not sigma^2 I.
  std::vector<CMat> chol(n);
  for (int k = 0; k < n; ++k) {
    const CMat& r = net.nodes[k].regressor_covariance;
    bool isotropic = r.rows() == static_cast<std::size_t>(m);
    if (isotropic) {
      for (int a = 0; a < m && isotropic; ++a)
        for (int b = 0; b < m && isotropic; ++b) {
          const cplx expect = a == b ? cplx{net.nodes[k].regressor_variance, 0.0} : cplx{0.0, 0.0};
          if (std::abs(r(a, b) - expect) > 0.0) isotropic = false;
        }
    }
    if (!isotropic) {
      // dense complex Cholesky, lower triangular
      CMat l(m, m);
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b <= a; ++b) {
          cplx acc = r(a, b);
          for (int j = 0; j < b; ++j) acc -= l(a, j) * std::conj(l(b, j));
          if (a == b) {
            if (acc.real() <= 0.0) throw ConfigError("regressor covariance is not positive definite");
            l(a, a) = std::sqrt(acc.real());
          } else {
            l(a, b) = acc / l(b, b).real();
          }
        }
      }
      chol[k] = l;
    }
  }

  const std::vector<cplx> w_true = net.w_true_stacked();
  std::vector<cplx> w(nm, cplx{0.0, 0.0});  // w_{k,-1} = 0
  std::vector<cplx> psi(nm), w_next(nm);
  NodeDraw data{std::vector<cplx>(nm), std::vector<cplx>(n)};

  RunRecord rec;
  rec.seed = spec.seed;
  rec.network_msd.reserve(spec.iterations);
  rec.network_emse.reserve(spec.iterations);
  if (spec.record_node_curves) {
    rec.node_msd.assign(n, {});
    rec.node_emse.assign(n, {});
  }
  std::vector<cplx> err_acc;
  if (spec.err_window > 0) err_acc.assign(nm, cplx{0.0, 0.0});

  const bool uses_channel = spec.algorithm == Algorithm::Atc ||
                            spec.algorithm == Algorithm::Cta ||
                            spec.algorithm == Algorithm::NoEqualization;
  CsiSpec csi = spec.csi;
  if (spec.algorithm == Algorithm::NoEqualization) csi.mode = CsiMode::NoEqualization;

  const double div_thresh2 = spec.divergence_threshold * spec.divergence_threshold;

  for (int t = 1; t <= spec.iterations; ++t) {
    // state-before-cycle MSD, then the a-priori error with this cycle's data
    double msd_net = 0.0;
    for (int k = 0; k < n; ++k) {
      const double e2 =
          kernels::sqdist(w_true.data() + static_cast<std::size_t>(k) * m,
                          w.data() + static_cast<std::size_t>(k) * m, m) ;
      msd_net += e2;
      if (spec.record_node_curves) rec.node_msd[k].push_back(e2);
    }
    rec.network_msd.push_back(msd_net / n);

    draw_data(net, chol, data_rng, data);

    double emse_net = 0.0;
    for (int k = 0; k < n; ++k) {
      const cplx* u = data.u.data() + static_cast<std::size_t>(k) * m;
      cplx apriori{0.0, 0.0};
      for (int j = 0; j < m; ++j) {
        apriori += u[j] * (w_true[static_cast<std::size_t>(k) * m + j] -
                           w[static_cast<std::size_t>(k) * m + j]);
      }
      const double a2 = std::norm(apriori);
      emse_net += a2;
      if (spec.record_node_curves) rec.node_emse[k].push_back(a2);
    }
    rec.network_emse.push_back(emse_net / n);

    const bool combine_first = spec.algorithm == Algorithm::Cta;

    if (!combine_first) {
      // adapt
      for (int k = 0; k < n; ++k) {
        const cplx* u = data.u.data() + static_cast<std::size_t>(k) * m;
        const cplx* wk = w.data() + static_cast<std::size_t>(k) * m;
        cplx d{0.0, 0.0};
        for (int j = 0; j < m; ++j) d += u[j] * w_true[static_cast<std::size_t>(k) * m + j];
        d += data.v[k];
        adapt_step(wk, u, d, net.nodes[k].step_size, m, psi.data() + static_cast<std::size_t>(k) * m);
      }
    }

    const std::vector<cplx>& payload = combine_first ? w : psi;
    std::vector<cplx>& combined = combine_first ? psi : w_next;

    if (spec.algorithm == Algorithm::NonCoop) {
      combined = psi;
    } else if (spec.algorithm == Algorithm::IdealAtc) {
      for (int k = 0; k < n; ++k) {
        cplx* out = combined.data() + static_cast<std::size_t>(k) * m;
        double off = 0.0;
        for (int j = 0; j < m; ++j) out[j] = cplx{0.0, 0.0};
        for (int l : net.neighbors[k]) {
          if (l == k) continue;
          const double a = gamma.at(l, k);
          off += a;
          kernels::axpy(out, payload.data() + static_cast<std::size_t>(l) * m, cplx{a, 0.0}, m);
        }
        kernels::axpy(out, payload.data() + static_cast<std::size_t>(k) * m, cplx{1.0 - off, 0.0},
                      m);
      }
    } else {
      ChannelDraw slot =
          draw_channel_slot(net, csi, chan_rng, pilot_rng, spec.reciprocal_fading);
      for (int k = 0; k < n; ++k) {
        cplx* out = combined.data() + static_cast<std::size_t>(k) * m;
        for (int j = 0; j < m; ++j) out[j] = cplx{0.0, 0.0};
        double off = 0.0;
        for (int l : slot.active_sets[k]) {
          if (l == k) continue;
          const LinkParams& lp = net.link(l, k);
          const std::size_t idx = static_cast<std::size_t>(l) * n + k;
          const double a = gamma.at(l, k);
          off += a;
          // equalized receive, split into the payload factor and the noise
          // gain so the perfect-CSI no-noise case collapses exactly
          const cplx beta_true = slot.h[idx] * lp.path_gain;
          cplx sig_coeff, noise_gain;
          if (csi.mode == CsiMode::NoEqualization) {
            sig_coeff = beta_true * a;
            noise_gain = cplx{a, 0.0};
          } else {
            const cplx beta_hat = slot.h_hat[idx] * lp.path_gain;
            sig_coeff = cplx{a, 0.0} * zero_forcing_factor(beta_hat, beta_true);
            noise_gain = cplx{a, 0.0} * (std::conj(beta_hat) / std::norm(beta_hat));
          }
          kernels::axpy(out, payload.data() + static_cast<std::size_t>(l) * m, sig_coeff, m);
          if (lp.link_noise_var > 0.0) {
            for (int j = 0; j < m; ++j) out[j] += noise_gain * link_rng.cgauss(lp.link_noise_var);
          }
        }
        kernels::axpy(out, payload.data() + static_cast<std::size_t>(k) * m, cplx{1.0 - off, 0.0},
                      m);
      }
    }

    if (combine_first) {
      // CTA: adapt from the combined intermediate
      for (int k = 0; k < n; ++k) {
        const cplx* u = data.u.data() + static_cast<std::size_t>(k) * m;
        const cplx* pk = psi.data() + static_cast<std::size_t>(k) * m;
        cplx d{0.0, 0.0};
        for (int j = 0; j < m; ++j) d += u[j] * w_true[static_cast<std::size_t>(k) * m + j];
        d += data.v[k];
        adapt_step(pk, u, d, net.nodes[k].step_size, m,
                   w_next.data() + static_cast<std::size_t>(k) * m);
      }
    }

    w.swap(w_next);

    // divergence check on the fresh state
    for (int k = 0; k < n && !rec.diverged; ++k) {
      const double norm2 = kernels::sqnorm(w.data() + static_cast<std::size_t>(k) * m, m);
      if (!std::isfinite(norm2) || norm2 > div_thresh2) {
        rec.diverged = true;
        rec.diverged_at = t;
      }
    }
    if (rec.diverged) break;

    if (spec.err_window > 0 && t > spec.iterations - spec.err_window) {
      for (std::size_t j = 0; j < nm; ++j) err_acc[j] += w_true[j] - w[j];
    }
  }

  if (spec.err_window > 0 && !rec.diverged) {
    rec.err_window_mean.resize(nm);
    for (std::size_t j = 0; j < nm; ++j) {
      rec.err_window_mean[j] = err_acc[j] / static_cast<double>(spec.err_window);
    }
  }
  return rec;
}

}  // namespace fadediff
