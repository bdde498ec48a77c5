#include "fadediff/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <sstream>
#include <thread>

#include "fadediff/rng.hpp"
#include "json.hpp"

namespace fadediff {

double to_db(double linear) { return 10.0 * std::log10(std::max(linear, 1e-300)); }

double steady_mean(const std::vector<double>& curve, double window_frac) {
  if (curve.empty()) return 0.0;
  const std::size_t w =
      std::max<std::size_t>(1, static_cast<std::size_t>(curve.size() * window_frac));
  double acc = 0.0;
  for (std::size_t i = curve.size() - w; i < curve.size(); ++i) acc += curve[i];
  return acc / static_cast<double>(w);
}

ModeSpec parse_mode(const std::string& name) {
  ModeSpec spec;
  spec.name = name;
  std::string base = name;
  bool cta = false;
  if (base.rfind("cta_", 0) == 0) {
    cta = true;
    base = base.substr(4);
  }
  if (base == "ideal") {
    if (cta) throw ConfigError("parse_mode: ideal links are simulated in ATC order only");
    spec.algorithm = Algorithm::IdealAtc;
    spec.csi.mode = CsiMode::Ideal;
  } else if (base == "noncoop") {
    spec.algorithm = Algorithm::NonCoop;
    spec.csi.mode = CsiMode::Ideal;
  } else if (base == "perfect_csi") {
    spec.algorithm = cta ? Algorithm::Cta : Algorithm::Atc;
    spec.csi.mode = CsiMode::PerfectCsi;
  } else if (base == "no_equalization") {
    spec.algorithm = Algorithm::NoEqualization;
    spec.csi.mode = CsiMode::NoEqualization;
  } else if (base.rfind("pilot_csi_", 0) == 0) {
    const std::string num = base.substr(10);
    int n = 0;
    try {
      n = std::stoi(num);
    } catch (...) {
      throw ConfigError("parse_mode: bad pilot count in '" + name + "'");
    }
    if (n < 1) throw ConfigError("parse_mode: pilot count must be >= 1");
    spec.algorithm = cta ? Algorithm::Cta : Algorithm::Atc;
    spec.csi.mode = CsiMode::PilotCsi;
    spec.csi.n_pilots = n;
  } else {
    throw ConfigError("parse_mode: unknown mode '" + name + "'");
  }
  return spec;
}

namespace {

struct ModeAccumulator {
  std::vector<RunRecord> records;  // indexed by run
};

void run_mode(const NetworkModel& net, const GammaWeights& gamma, const ModeSpec& mode,
              const EnsembleOptions& opt, ModeAccumulator& acc) {
  acc.records.resize(opt.runs);
  std::atomic<int> next{0};
  const int jobs = opt.jobs > 0
                       ? opt.jobs
                       : std::max(1u, std::thread::hardware_concurrency());
  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= opt.runs) return;
      RunSpec spec;
      spec.algorithm = mode.algorithm;
      spec.csi = mode.csi;
      spec.iterations = opt.iterations;
      spec.seed = mix_seed(opt.master_seed, static_cast<std::uint64_t>(r));
      spec.err_window = opt.err_window;
      spec.reciprocal_fading = opt.reciprocal_fading;
      spec.record_node_curves = opt.record_node_curves;
      acc.records[r] = run_realization(net, gamma, spec);
    }
  };
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

LearningCurve reduce_network_curve(const std::string& mode, const std::vector<RunRecord>& recs,
                                   const EnsembleOptions& opt) {
  LearningCurve lc;
  lc.mode = mode;
  std::vector<double> msd_sum(opt.iterations, 0.0), emse_sum(opt.iterations, 0.0);
  std::vector<double> steadies;
  steadies.reserve(recs.size());
  // fixed run order: the reduction is identical for any worker count
  for (const RunRecord& r : recs) {
    if (r.diverged) {
      ++lc.diverged_runs;
      continue;
    }
    for (int t = 0; t < opt.iterations; ++t) {
      msd_sum[t] += r.network_msd[t];
      emse_sum[t] += r.network_emse[t];
    }
    steadies.push_back(steady_mean(r.network_msd, opt.steady_window_frac));
    ++lc.runs;
  }
  if (lc.runs == 0) {
    lc.all_diverged = true;
    return lc;
  }
  lc.msd.resize(opt.iterations);
  lc.emse.resize(opt.iterations);
  for (int t = 0; t < opt.iterations; ++t) {
    lc.msd[t] = msd_sum[t] / lc.runs;
    lc.emse[t] = emse_sum[t] / lc.runs;
  }
  lc.steady_msd = steady_mean(lc.msd, opt.steady_window_frac);
  lc.steady_emse = steady_mean(lc.emse, opt.steady_window_frac);
  double mean = 0.0;
  for (double s : steadies) mean += s;
  mean /= steadies.size();
  double var = 0.0;
  for (double s : steadies) var += (s - mean) * (s - mean);
  var = steadies.size() > 1 ? var / (steadies.size() - 1) : 0.0;
  lc.steady_msd_ci = 1.96 * std::sqrt(var / steadies.size());
  return lc;
}

}  // namespace

EnsembleResult run_ensemble(const NetworkModel& net, const GammaWeights& gamma,
                            const std::vector<ModeSpec>& modes, const EnsembleOptions& opt) {
  if (opt.runs < 1) throw ConfigError("run_ensemble: runs must be >= 1");
  if (modes.empty()) throw ConfigError("run_ensemble: mode list must not be empty");
  EnsembleResult result;
  const std::size_t nm = static_cast<std::size_t>(net.n) * net.m;

  for (const ModeSpec& mode : modes) {
    ModeAccumulator acc;
    run_mode(net, gamma, mode, opt, acc);
    LearningCurve lc = reduce_network_curve(mode.name, acc.records, opt);
    result.diverged_counts[mode.name] = lc.diverged_runs;
    result.curves.push_back(std::move(lc));

    if (opt.record_node_curves) {
      for (int k = 0; k < net.n; ++k) {
        LearningCurve nodecurve;
        nodecurve.mode = mode.name;
        nodecurve.scope = "node:" + std::to_string(k);
        std::vector<double> msd_sum(opt.iterations, 0.0), emse_sum(opt.iterations, 0.0);
        int completed = 0;
        for (const RunRecord& r : acc.records) {
          if (r.diverged) continue;
          ++completed;
          for (int t = 0; t < opt.iterations; ++t) {
            msd_sum[t] += r.node_msd[k][t];
            emse_sum[t] += r.node_emse[k][t];
          }
        }
        nodecurve.runs = completed;
        if (completed > 0) {
          nodecurve.msd.resize(opt.iterations);
          nodecurve.emse.resize(opt.iterations);
          for (int t = 0; t < opt.iterations; ++t) {
            nodecurve.msd[t] = msd_sum[t] / completed;
            nodecurve.emse[t] = emse_sum[t] / completed;
          }
          nodecurve.steady_msd = steady_mean(nodecurve.msd, opt.steady_window_frac);
          nodecurve.steady_emse = steady_mean(nodecurve.emse, opt.steady_window_frac);
        } else {
          nodecurve.all_diverged = true;
        }
        result.curves.push_back(std::move(nodecurve));
      }
    }

    if (opt.err_window > 0) {
      std::vector<cplx> mean(nm, cplx{0.0, 0.0});
      std::vector<double> sq(nm, 0.0);
      int completed = 0;
      for (const RunRecord& r : acc.records) {
        if (r.diverged || r.err_window_mean.empty()) continue;
        ++completed;
        for (std::size_t j = 0; j < nm; ++j) {
          mean[j] += r.err_window_mean[j];
          sq[j] += std::norm(r.err_window_mean[j]);
        }
      }
      if (completed > 0) {
        std::vector<double> se(nm, 0.0);
        for (std::size_t j = 0; j < nm; ++j) {
          mean[j] /= static_cast<double>(completed);
          const double var =
              std::max(0.0, sq[j] / completed - std::norm(mean[j]));
          se[j] = std::sqrt(var / completed);
        }
        result.mean_error[mode.name] = std::move(mean);
        result.mean_error_se[mode.name] = std::move(se);
      }
    }
  }
  return result;
}

std::vector<SweepPoint> snr_sweep(const NetworkModel& base, const GammaWeights& gamma,
                                  const std::vector<ModeSpec>& modes,
                                  const std::vector<int>& indices, const EnsembleOptions& opt) {
  std::vector<SweepPoint> points;
  for (int idx : indices) {
    NetworkModel net = base;
    const double scale = std::pow(10.0, -0.5 * idx);  // +5 dB SNR per index
    for (LinkParams& lp : net.links) {
      lp.link_noise_var *= scale;
      lp.pilot_noise_var *= scale;
    }
    EnsembleResult res = run_ensemble(net, gamma, modes, opt);
    for (const LearningCurve& lc : res.curves) {
      if (lc.scope != "network") continue;
      SweepPoint p;
      p.snr_index = idx;
      p.mode = lc.mode;
      p.steady_msd = lc.steady_msd;
      p.steady_msd_ci = lc.steady_msd_ci;
      p.all_diverged = lc.all_diverged;
      points.push_back(p);
    }
  }
  return points;
}

bool CompareReport::all_pass() const {
  for (const auto& r : rows) {
    if (!r.steady_pass || !r.transient_pass) return false;
  }
  return true;
}

std::string CompareReport::to_json() const {
  nlohmann::json j;
  j["burn_in"] = burn_in;
  j["steady_tol_db"] = steady_tol_db;
  j["transient_tol_db"] = transient_tol_db;
  nlohmann::json rows_json = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_json.push_back({{"mode", r.mode},
                         {"steady_gap_db", r.steady_gap_db},
                         {"transient_max_gap_db", r.transient_max_gap_db},
                         {"steady_pass", r.steady_pass},
                         {"transient_pass", r.transient_pass}});
  }
  j["rows"] = rows_json;
  j["all_pass"] = all_pass();
  return j.dump(2);
}

CompareReport compare_report(const std::vector<LearningCurve>& simulated,
                             const std::vector<LearningCurve>& predicted, int burn_in,
                             double steady_tol_db, double transient_tol_db) {
  CompareReport report;
  report.burn_in = burn_in;
  report.steady_tol_db = steady_tol_db;
  report.transient_tol_db = transient_tol_db;
  for (const LearningCurve& sim : simulated) {
    if (sim.scope != "network") continue;
    const LearningCurve* pred = nullptr;
    for (const LearningCurve& p : predicted) {
      if (p.mode == sim.mode && p.scope == sim.scope) {
        pred = &p;
        break;
      }
    }
    if (!pred) continue;
    if (sim.msd.size() != pred->msd.size()) {
      throw std::invalid_argument("compare_report: curve lengths differ for mode " + sim.mode);
    }
    ModeComparison row;
    row.mode = sim.mode;
    row.steady_gap_db = to_db(sim.steady_msd) - to_db(pred->steady_msd);
    double max_gap = 0.0;
    for (std::size_t t = burn_in; t < sim.msd.size(); ++t) {
      max_gap = std::max(max_gap, std::abs(to_db(sim.msd[t]) - to_db(pred->msd[t])));
    }
    row.transient_max_gap_db = max_gap;
    row.steady_pass = std::abs(row.steady_gap_db) <= steady_tol_db;
    row.transient_pass = max_gap <= transient_tol_db;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace fadediff
