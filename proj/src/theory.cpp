#include "fadediff/theory.hpp"

#include <cmath>
#include <sstream>

#include "fadediff/rng.hpp"

namespace fadediff {

namespace {

CMat extend(const CMat& s, int m) { return kron(s, CMat::identity(m)); }

// (S (x) I_q) v  without materializing the Kronecker product: v is a stack
// of |cols(S)| slots of length q.
std::vector<cplx> apply_scalar_kron(const CMat& s, const std::vector<cplx>& v, std::size_t q) {
  std::vector<cplx> out(s.rows() * q, cplx{0.0, 0.0});
  for (std::size_t r = 0; r < s.rows(); ++r) {
    for (std::size_t z = 0; z < s.cols(); ++z) {
      const cplx w = s(r, z);
      if (w == cplx{0.0, 0.0}) continue;
      kernels::axpy(out.data() + r * q, v.data() + z * q, w, q);
    }
  }
  return out;
}

CMat block_diag_nodes(const NetworkModel& net, const std::vector<CMat>& blocks) {
  const int m = net.m;
  CMat out(static_cast<std::size_t>(net.n) * m, static_cast<std::size_t>(net.n) * m);
  for (int k = 0; k < net.n; ++k)
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        out(static_cast<std::size_t>(k) * m + a, static_cast<std::size_t>(k) * m + b) =
            blocks[k](a, b);
  return out;
}

std::vector<CMat> regressor_covariances(const NetworkModel& net) {
  std::vector<CMat> r(net.n);
  for (int k = 0; k < net.n; ++k) r[k] = net.nodes[k].regressor_covariance;
  return r;
}

std::vector<double> step_sizes(const NetworkModel& net) {
  std::vector<double> mu(net.n);
  for (int k = 0; k < net.n; ++k) mu[k] = net.nodes[k].step_size;
  return mu;
}

double lambda_max_hermitian(const CMat& r) {
  // small Hermitian blocks; power iteration is enough but eigenvalues()
  // keeps one code path
  double best = 0.0;
  for (const cplx& l : eigenvalues(r)) best = std::max(best, l.real());
  return best;
}

}  // namespace

LinkMoments estimate_link_moments(const LinkParams& lp, const CsiSpec& csi, long samples,
                                  std::uint64_t seed) {
  if (samples < 1) throw ConfigError("estimate_link_moments: need samples >= 1");
  RngStream rng(mix_seed(seed, kStreamTheory));
  const int n_pilots = csi.mode == CsiMode::PilotCsi ? csi.n_pilots : 1;
  const double vbar_var = lp.pilot_noise_var / n_pilots;
  const bool pilots = csi.mode == CsiMode::PilotCsi;

  cplx sum1{0.0, 0.0};
  double sum1_sq = 0.0;  // sum of |sample|^2 for the combined s.e.
  double sum2 = 0.0, sum2_sq = 0.0;
  double sum3 = 0.0, sum3_sq = 0.0;
  long accepted = 0;

  for (long s = 0; s < samples; ++s) {
    const cplx h = rng.cgauss(lp.fading_variance);
    cplx h_hat = h;
    cplx vbar{0.0, 0.0};
    if (pilots) {
      vbar = rng.cgauss(vbar_var);
      h_hat = h + vbar / lp.path_gain;
    }
    if (std::norm(h_hat) < lp.nu) continue;
    ++accepted;
    const cplx beta = h_hat * lp.path_gain;
    const cplx g = std::conj(beta) / std::norm(beta);
    const cplx s1 = g * vbar;
    const double s2 = std::norm(s1);
    const double s3 = std::norm(g);
    sum1 += s1;
    sum1_sq += s2;
    sum2 += s2;
    sum2_sq += s2 * s2;
    sum3 += s3;
    sum3_sq += s3 * s3;
  }

  const double inv = 1.0 / static_cast<double>(samples);
  LinkMoments lm;
  lm.samples = samples;
  lm.accepted = accepted;
  lm.p_emp = accepted * inv;
  lm.c1 = sum1 * inv;
  lm.c2 = sum2 * inv;
  lm.c3 = sum3 * inv;
  const double var1 = std::max(0.0, sum1_sq * inv - std::norm(lm.c1));
  const double var2 = std::max(0.0, sum2_sq * inv - lm.c2 * lm.c2);
  const double var3 = std::max(0.0, sum3_sq * inv - lm.c3 * lm.c3);
  lm.c1_se = std::sqrt(var1 * inv);
  lm.c2_se = std::sqrt(var2 * inv);
  lm.c3_se = std::sqrt(var3 * inv);
  return lm;
}

double taylor_gated_inverse_moment(double lambda, double nu, double pt_over_ralpha) {
  const double p = std::exp(-lambda * nu);
  const double mean_y = 1.0 / lambda + nu;  // truncated |h_hat|^2
  const double c = pt_over_ralpha;
  const double t1 = 1.0 / (c * mean_y);
  const double t2 = nu / (c * mean_y * mean_y);
  const double t3 = 1.0 / (c * lambda * lambda * mean_y * mean_y * mean_y);
  return p * (t1 - t2 + t3);
}

double exact_gated_inverse_moment(double lambda, double nu, double pt_over_ralpha) {
  // E[ I / z ] with z = (Pt/r^a) y and y ~ Exp(lambda) gated at nu:
  // integral_nu^inf y^-1 lambda e^(-lambda y) dy = lambda E1(lambda nu)
  const double e1 = -std::expint(-lambda * nu);
  return lambda * e1 / pt_over_ralpha;
}

CMat second_moment_AA(const GammaWeights& gamma, const std::vector<std::vector<int>>& neighbors,
                      const std::vector<double>& probs) {
  const int n = gamma.n;
  const auto p = [&](int l, int k) { return probs[static_cast<std::size_t>(l) * n + k]; };
  // means
  CMat abar = mean_matrix(gamma, neighbors, probs);

  // per-column sums used by the same-column cases
  std::vector<double> col_gp(n, 0.0), col_g2p(n, 0.0);
  for (int k = 0; k < n; ++k) {
    for (int l : neighbors[k]) {
      if (l == k) continue;
      col_gp[k] += gamma.at(l, k) * p(l, k);
      col_g2p[k] += gamma.at(l, k) * gamma.at(l, k) * p(l, k);
    }
  }

  CMat out(static_cast<std::size_t>(n) * n, static_cast<std::size_t>(n) * n);
  for (int l = 0; l < n; ++l)
    for (int mrow = 0; mrow < n; ++mrow)
      for (int k = 0; k < n; ++k)
        for (int ncol = 0; ncol < n; ++ncol) {
          const std::size_t r = static_cast<std::size_t>(l) * n + mrow;
          const std::size_t z = static_cast<std::size_t>(k) * n + ncol;
          double val;
          if (k != ncol) {
            val = abar(l, k).real() * abar(mrow, ncol).real();
          } else if (l != k && mrow != k) {
            // both entries are gated neighbor weights of column k
            val = l == mrow ? gamma.at(l, k) * gamma.at(l, k) * p(l, k)
                            : gamma.at(l, k) * gamma.at(mrow, k) * p(l, k) * p(mrow, k);
          } else if (l == k && mrow == k) {
            // E[a_kk^2] for the Bernoulli sum a_kk = 1 - sum gamma_j I_j
            const double s1 = col_gp[k];
            const double s2 = col_g2p[k];
            double cross = 0.0;  // sum_{j != j'} gamma_j gamma_j' p_j p_j'
            cross = s1 * s1;
            for (int j : neighbors[k]) {
              if (j == k) continue;
              const double gj = gamma.at(j, k) * p(j, k);
              cross -= gj * gj;
            }
            val = 1.0 - 2.0 * s1 + s2 + cross;
          } else {
            // one self weight, one neighbor weight of the same column
            const int j = l == k ? mrow : l;
            const double gj = gamma.at(j, k);
            const double pj = p(j, k);
            val = gj * pj * (1.0 - gj - (col_gp[k] - gj * pj));
          }
          out(r, z) = val;
        }
  return out;
}

CMat barF_gaussian(const std::vector<CMat>& r_u, const std::vector<double>& mu, double beta) {
  const int n = static_cast<int>(r_u.size());
  const int m = static_cast<int>(r_u.front().rows());
  for (const CMat& r : r_u) {
    if ((r - r.adjoint()).max_abs() > 1e-12 * std::max(1.0, r.max_abs())) {
      throw std::invalid_argument("barF_gaussian: covariance must be Hermitian");
    }
  }
  const std::size_t m2 = static_cast<std::size_t>(m) * m;
  CMat out(static_cast<std::size_t>(n) * n * m2, static_cast<std::size_t>(n) * n * m2);
  std::vector<CMat> z(n);  // I - mu_k R_k
  for (int k = 0; k < n; ++k) z[k] = CMat::identity(m) - r_u[k] * cplx{mu[k], 0.0};

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      CMat blk = kron(z[j].transpose(), z[i]);
      if (j == i) {
        // fourth-moment correction for the same-node block
        const CMat& r = r_u[i];
        CMat corr = kron(r.transpose(), r) * cplx{beta - 1.0, 0.0};
        // r_k r_k^* with r_k = vec(R_k), column-major
        std::vector<cplx> rvec(m2);
        std::size_t posv = 0;
        for (int c = 0; c < m; ++c)
          for (int rr = 0; rr < m; ++rr) rvec[posv++] = r(rr, c);
        for (std::size_t a = 0; a < m2; ++a)
          for (std::size_t b = 0; b < m2; ++b) corr(a, b) += rvec[a] * std::conj(rvec[b]);
        blk += corr * cplx{mu[i] * mu[i], 0.0};
      }
      const std::size_t off = (static_cast<std::size_t>(j) * n + i) * m2;
      for (std::size_t a = 0; a < m2; ++a)
        for (std::size_t b = 0; b < m2; ++b) out(off + a, off + b) = blk(a, b);
    }
  return out;
}

CMat barF_small_step(const std::vector<CMat>& r_u, const std::vector<double>& mu) {
  const int n = static_cast<int>(r_u.size());
  const int m = static_cast<int>(r_u.front().rows());
  const std::size_t m2 = static_cast<std::size_t>(m) * m;
  CMat out(static_cast<std::size_t>(n) * n * m2, static_cast<std::size_t>(n) * n * m2);
  std::vector<CMat> z(n);
  for (int k = 0; k < n; ++k) z[k] = CMat::identity(m) - r_u[k] * cplx{mu[k], 0.0};
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const CMat blk = kron(z[j].transpose(), z[i]);
      const std::size_t off = (static_cast<std::size_t>(j) * n + i) * m2;
      for (std::size_t a = 0; a < m2; ++a)
        for (std::size_t b = 0; b < m2; ++b) out(off + a, off + b) = blk(a, b);
    }
  return out;
}

TheoryModel build_theory(const NetworkModel& net, const GammaWeights& gamma,
                         const TheoryOptions& opt) {
  validate_gamma(gamma, net.neighbors);
  TheoryModel model;
  model.n = net.n;
  model.m = net.m;
  model.options = opt;
  model.beta = 1.0;  // complex regressors throughout the simulator

  const int n = net.n, m = net.m;
  const std::size_t nm = static_cast<std::size_t>(n) * m;
  const std::size_t m2 = static_cast<std::size_t>(m) * m;
  const bool pilot = opt.csi == TheoryCsi::PilotCsi;
  const CsiSpec csi{pilot ? CsiMode::PilotCsi : CsiMode::PerfectCsi, opt.n_pilots};

  // link success probabilities
  model.success_probs.assign(static_cast<std::size_t>(n) * n, 0.0);
  for (int k = 0; k < n; ++k)
    for (int l : net.neighbors[k]) {
      if (l == k) continue;
      double p = 1.0;
      if (opt.csi != TheoryCsi::Ideal && opt.csi != TheoryCsi::NonCoop) {
        p = link_success_probability(net.link(l, k), csi);
      }
      model.success_probs[static_cast<std::size_t>(l) * n + k] = p;
    }

  // mean combination matrix
  if (opt.csi == TheoryCsi::NonCoop) {
    model.A = CMat::identity(n);
  } else {
    model.A = mean_matrix(gamma, net.neighbors, model.success_probs);
  }

  // link moments and mean error matrix
  model.E = CMat(n, n);
  model.link_moments.assign(static_cast<std::size_t>(n) * n, LinkMoments{});
  const bool uses_links = opt.csi == TheoryCsi::PerfectCsi || pilot;
  if (uses_links) {
    for (int k = 0; k < n; ++k)
      for (int l : net.neighbors[k]) {
        if (l == k) continue;
        const std::size_t idx = static_cast<std::size_t>(l) * n + k;
        LinkMoments lm = estimate_link_moments(net.link(l, k), csi, opt.mc_samples,
                                               mix_seed(opt.seed, 0x6d6fu, idx));
        if (opt.moment_shift != 0) {
          const double s = static_cast<double>(opt.moment_shift);
          const double a1 = std::abs(lm.c1);
          if (a1 > 0.0) lm.c1 *= (1.0 + s * lm.c1_se / a1);
          lm.c2 = std::max(0.0, lm.c2 + s * lm.c2_se);
          lm.c3 = std::max(0.0, lm.c3 + s * lm.c3_se);
        }
        model.link_moments[idx] = lm;
        if (pilot) model.E(l, k) = -gamma.at(l, k) * lm.c1;
      }
  }

  // B = (A+E)^T (x) I_M  *  (I - M R)
  model.r_u = regressor_covariances(net);
  model.mu = step_sizes(net);
  const std::vector<CMat>& r_u = model.r_u;
  const std::vector<double>& mu = model.mu;
  {
    std::vector<CMat> imr_blocks(n);
    for (int k = 0; k < n; ++k) imr_blocks[k] = CMat::identity(m) - r_u[k] * cplx{mu[k], 0.0};
    model.IMR = block_diag_nodes(net, imr_blocks);
  }
  const CMat ae = model.A + model.E;
  model.B = extend(ae.transpose(), m) * model.IMR;
  model.rho_B = spectral_radius(model.B);
  model.e_norm_bound =
      block_maxnorm_bound(extend(model.E, m).transpose(), BlockPartition{static_cast<std::size_t>(m)});

  // P and Rv
  {
    std::vector<CMat> pk(n), rvk(n);
    for (int k = 0; k < n; ++k) {
      pk[k] = r_u[k] * cplx{net.nodes[k].meas_noise_var, 0.0};
      double s = 0.0;
      if (uses_links) {
        for (int l : net.neighbors[k]) {
          if (l == k) continue;
          const LinkParams& lp = net.link(l, k);
          const std::size_t idx = static_cast<std::size_t>(l) * n + k;
          double c3;
          if (opt.rv_mode == RvMode::MonteCarlo) {
            c3 = model.link_moments[idx].c3;
          } else {
            const double pt_over_ralpha = lp.path_gain * lp.path_gain;
            c3 = taylor_gated_inverse_moment(lambda_for(lp, csi), lp.nu, pt_over_ralpha);
          }
          s += gamma.at(l, k) * gamma.at(l, k) * c3 * lp.link_noise_var;
        }
      }
      rvk[k] = CMat::identity(m) * cplx{s, 0.0};
    }
    model.P = block_diag_nodes(net, pk);
    model.Rv = block_diag_nodes(net, rvk);
  }

  // second moments of the combination/error pair
  if (opt.csi == TheoryCsi::NonCoop) {
    model.K2 = CMat::identity(static_cast<std::size_t>(n) * n);
  } else {
    model.K2 = second_moment_AA(gamma, net.neighbors, model.success_probs);
  }
  CMat k_ae(static_cast<std::size_t>(n) * n, static_cast<std::size_t>(n) * n);
  CMat k_ea(k_ae), k_ee(k_ae);
  if (pilot) {
    const CMat& abar = model.A;
    const CMat& e = model.E;
    const auto pcol = [&](int k, int skip) {
      double s = 0.0;
      for (int j : net.neighbors[k]) {
        if (j == k || j == skip) continue;
        s += gamma.at(j, k) * model.success_probs[static_cast<std::size_t>(j) * n + k];
      }
      return s;
    };
    for (int l = 0; l < n; ++l)
      for (int mrow = 0; mrow < n; ++mrow)
        for (int k = 0; k < n; ++k)
          for (int ncol = 0; ncol < n; ++ncol) {
            const std::size_t r = static_cast<std::size_t>(l) * n + mrow;
            const std::size_t z = static_cast<std::size_t>(k) * n + ncol;
            const cplx e_mn = e(mrow, ncol);
            const cplx e_lk = e(l, k);
            // E[a_{l,k} conj(e_{m,n})]
            if (e_mn != cplx{0.0, 0.0}) {
              cplx v;
              if (k != ncol) {
                v = abar(l, k) * std::conj(e_mn);
              } else if (l == mrow) {
                v = gamma.at(l, k) * std::conj(e_mn);
              } else if (l == k) {
                v = std::conj(e_mn) * (1.0 - gamma.at(mrow, k) - pcol(k, mrow));
              } else {
                v = abar(l, k) * std::conj(e_mn);
              }
              k_ae(r, z) = v;
            }
            // E[e_{l,k} a_{m,n}]
            if (e_lk != cplx{0.0, 0.0}) {
              cplx v;
              if (k != ncol) {
                v = e_lk * abar(mrow, ncol);
              } else if (mrow == l) {
                v = gamma.at(l, k) * e_lk;
              } else if (mrow == k) {
                v = e_lk * (1.0 - gamma.at(l, k) - pcol(k, l));
              } else {
                v = e_lk * abar(mrow, k);
              }
              k_ea(r, z) = v;
            }
            // E[e_{l,k} conj(e_{m,n})]
            if (e_lk != cplx{0.0, 0.0} && e_mn != cplx{0.0, 0.0}) {
              if (k == ncol && l == mrow) {
                const double g = gamma.at(l, k);
                k_ee(r, z) = g * g * model.link_moments[static_cast<std::size_t>(l) * n + k].c2;
              } else {
                k_ee(r, z) = e_lk * std::conj(e_mn);
              }
            }
          }
  }
  model.Dbase = model.K2 + k_ae + k_ea + k_ee;
  model.d_norm_bound =
      block_maxnorm_bound(kron(model.Dbase, CMat::identity(m2)), BlockPartition{m2});

  // barF and F
  if (opt.barf == BarFVariant::Gaussian) {
    model.barF = barF_gaussian(r_u, mu, model.beta);
  } else {
    model.barF = barF_small_step(r_u, mu);
  }
  model.F = model.barF * kron(model.Dbase, CMat::identity(m2));
  model.rho_F = spectral_radius(model.F);

  // bias
  model.omega_vec = net.w_true_stacked();
  const std::vector<cplx>& omega = model.omega_vec;
  model.bias.assign(nm, cplx{0.0, 0.0});
  if (pilot && model.rho_B < 1.0) {
    const std::vector<cplx> drive = extend(model.E, m).transpose() * omega;
    const CMat i_minus_b = CMat::identity(nm) - model.B;
    const std::vector<cplx> x = lu_solve(i_minus_b, drive);
    for (std::size_t j = 0; j < nm; ++j) model.bias[j] = -x[j];
  }

  // gamma vector
  const BlockPartition part{static_cast<std::size_t>(m)};
  std::vector<cplx> gamma_vec(nm * nm, cplx{0.0, 0.0});
  {
    // noise-adaptation term: (Dbase^T (x) I) bvec(M P^T M)
    CMat mptm(nm, nm);
    for (int k = 0; k < n; ++k)
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          mptm(static_cast<std::size_t>(k) * m + a, static_cast<std::size_t>(k) * m + b) =
              mu[k] * mu[k] * net.nodes[k].meas_noise_var * r_u[k](b, a);
    const std::vector<cplx> t2 =
        apply_scalar_kron(model.Dbase.transpose(), bvec(mptm, part), m2);
    for (std::size_t j = 0; j < gamma_vec.size(); ++j) gamma_vec[j] += t2[j];
    // equalized link noise
    const std::vector<cplx> t4 = bvec(model.Rv.transpose(), part);
    for (std::size_t j = 0; j < gamma_vec.size(); ++j) gamma_vec[j] += t4[j];
  }
  if (pilot) {
    // bias-power term: (K_EE^T (x) I) bvec((omega omega^*)^T)
    CMat wout(nm, nm);
    for (std::size_t a = 0; a < nm; ++a)
      for (std::size_t b = 0; b < nm; ++b) wout(a, b) = omega[b] * std::conj(omega[a]);
    const std::vector<cplx> t1 = apply_scalar_kron(k_ee.transpose(), bvec(wout, part), m2);
    for (std::size_t j = 0; j < gamma_vec.size(); ++j) gamma_vec[j] += t1[j];

    // cross term between the state recursion and the bias drive
    if (model.rho_B < 1.0) {
      CMat bw(nm, nm);
      for (std::size_t a = 0; a < nm; ++a)
        for (std::size_t b = 0; b < nm; ++b) bw(a, b) = model.bias[b] * std::conj(omega[a]);
      // (b omega^*)^T has entries bias[a]... transposed outer product
      // bw above already holds ((b omega^*)^T)(a,b) = b_b conj(omega_a)
      const CMat w2 = block_kron(model.IMR, CMat::identity(nm), part);
      const std::vector<cplx> u3 =
          apply_scalar_kron((k_ae + k_ee).transpose(), w2 * bvec(bw, part), m2);
      const CMat c3t = bvec_inverse(u3, n, part);
      const CMat c3 = c3t.transpose();
      const CMat h = c3 + c3.adjoint();
      const std::vector<cplx> t3 = bvec(h.transpose(), part);
      for (std::size_t j = 0; j < gamma_vec.size(); ++j) gamma_vec[j] -= t3[j];
    }
  }
  model.gamma_vec = std::move(gamma_vec);
  return model;
}

std::vector<cplx> mean_bias(const TheoryModel& model) {
  if (model.options.csi != TheoryCsi::PilotCsi) {
    return std::vector<cplx>(static_cast<std::size_t>(model.n) * model.m, cplx{0.0, 0.0});
  }
  if (model.rho_B >= 1.0) {
    std::ostringstream os;
    os << "mean recursion unstable: rho(B) = " << model.rho_B;
    throw StabilityError(os.str(), model.rho_B);
  }
  return model.bias;
}

std::vector<StepRange> mean_step_bounds(const std::vector<CMat>& r_u, double e_norm_bound) {
  const double q = 1.0 / (1.0 + e_norm_bound);
  std::vector<StepRange> out;
  out.reserve(r_u.size());
  for (const CMat& r : r_u) {
    const double lmax = lambda_max_hermitian(r);
    if (lmax <= 0.0) throw ConfigError("mean_step_bounds: lambda_max must be positive");
    out.push_back({(1.0 - q) / lmax, (1.0 + q) / lmax});
  }
  return out;
}

std::vector<StepRange> ms_step_bounds(const std::vector<CMat>& r_u, double d_norm_bound) {
  const double q = 1.0 / std::sqrt(d_norm_bound);
  std::vector<StepRange> out;
  out.reserve(r_u.size());
  for (const CMat& r : r_u) {
    const double lmax = lambda_max_hermitian(r);
    if (lmax <= 0.0) throw ConfigError("ms_step_bounds: lambda_max must be positive");
    out.push_back({std::max(0.0, (1.0 - q) / lmax), (1.0 + q) / lmax});
  }
  return out;
}

namespace {

CMat weighting_matrix(const TheoryModel& model, Metric metric, Scope scope, int node,
                      const std::vector<CMat>& r_u) {
  const int n = model.n, m = model.m;
  const std::size_t nm = static_cast<std::size_t>(n) * m;
  CMat omega_w(nm, nm);
  const auto put_block = [&](int k, const CMat& blk, double scale) {
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        omega_w(static_cast<std::size_t>(k) * m + a, static_cast<std::size_t>(k) * m + b) =
            blk(a, b) * scale;
  };
  if (scope == Scope::Node) {
    if (node < 0 || node >= n) throw std::invalid_argument("weighting_matrix: bad node index");
    put_block(node, metric == Metric::Msd ? CMat::identity(m) : r_u[node], 1.0);
  } else {
    for (int k = 0; k < n; ++k) {
      put_block(k, metric == Metric::Msd ? CMat::identity(m) : r_u[k], 1.0 / n);
    }
  }
  return omega_w;
}

}  // namespace

double steady_state(const TheoryModel& model, Metric metric, Scope scope, int node,
                    double* rcond) {
  if (model.rho_F >= 1.0) {
    std::ostringstream os;
    os << "variance recursion unstable: rho(F) = " << model.rho_F
       << "; mean-square range requires rho(I - M R) < " << 1.0 / std::sqrt(model.d_norm_bound);
    throw StabilityError(os.str(), model.rho_F);
  }
  const BlockPartition part{static_cast<std::size_t>(model.m)};
  const CMat omega_w = weighting_matrix(model, metric, scope, node, model.r_u);
  const std::size_t dim = model.gamma_vec.size();
  const CMat i_minus_f = CMat::identity(dim) - model.F;
  const std::vector<cplx> y = lu_solve(i_minus_f, bvec(omega_w, part), rcond);
  return dot(model.gamma_vec, y).real();
}

TransientCurves transient_curves(const TheoryModel& model, int iterations, Scope scope,
                                 int node) {
  if (iterations < 1) throw ConfigError("transient_curves: iterations must be >= 1");
  TransientCurves out;
  out.divergent = model.rho_F >= 1.0;
  const BlockPartition part{static_cast<std::size_t>(model.m)};
  const std::size_t nm = static_cast<std::size_t>(model.n) * model.m;

  // weight vector of the initial error: bvec(((omega omega^*)^T))
  CMat wout(nm, nm);
  for (std::size_t a = 0; a < nm; ++a)
    for (std::size_t b = 0; b < nm; ++b)
      wout(a, b) = model.omega_vec[b] * std::conj(model.omega_vec[a]);
  const std::vector<cplx> wvec = bvec(wout, part);

  const auto run = [&](Metric metric, std::vector<double>& curve) {
    std::vector<cplx> phi =
        bvec(weighting_matrix(model, metric, scope, node, model.r_u), part);
    curve.resize(iterations);
    curve[0] = dot(wvec, phi).real();
    cplx acc{0.0, 0.0};
    std::vector<cplx> next(phi.size());
    for (int t = 1; t < iterations; ++t) {
      acc += dot(model.gamma_vec, phi);
      kernels::matvec(next.data(), model.F.data(), phi.data(), model.F.rows(), model.F.cols());
      phi.swap(next);
      curve[t] = dot(wvec, phi).real() + acc.real();
    }
  };
  run(Metric::Msd, out.msd);
  run(Metric::Emse, out.emse);
  return out;
}

}  // namespace fadediff
