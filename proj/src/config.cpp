#include "fadediff/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fadediff {

namespace {

using nlohmann::json;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
  }
}

GammaRule parse_rule(const std::string& s) {
  if (s == "relative_degree") return GammaRule::RelativeDegree;
  if (s == "uniform") return GammaRule::Uniform;
  if (s == "metropolis") return GammaRule::Metropolis;
  throw ConfigError("config: unknown gamma rule '" + s + "'");
}

std::string rule_name(GammaRule r) {
  switch (r) {
    case GammaRule::RelativeDegree: return "relative_degree";
    case GammaRule::Uniform: return "uniform";
    case GammaRule::Metropolis: return "metropolis";
  }
  return "?";
}

void parse_range(const json& j, const char* key, double& lo, double& hi) {
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2) throw ConfigError(std::string("config: ") + key + " must be [lo, hi]");
  lo = v.at(0).get<double>();
  hi = v.at(1).get<double>();
  if (hi < lo) throw ConfigError(std::string("config: ") + key + " range is reversed");
}

}  // namespace

AppConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  reject_unknown(j, {"network", "algorithm", "theory", "sweep", "output", "master_seed"}, "root");

  AppConfig cfg;
  if (j.contains("master_seed")) cfg.master_seed = j.at("master_seed").get<std::uint64_t>();

  if (j.contains("network")) {
    const json& n = j.at("network");
    reject_unknown(n,
                   {"n_nodes", "dim", "w_true", "transmit_power", "tx_range",
                    "path_loss_exponent", "step_size", "sigma_u2_range", "meas_noise_var_range",
                    "link_snr_db_range", "fading_variance", "reciprocal_fading", "seed",
                    "explicit"},
                   "network");
    NetworkOptions& o = cfg.network_options;
    if (n.contains("n_nodes")) o.n = n.at("n_nodes").get<int>();
    if (n.contains("dim")) o.m = n.at("dim").get<int>();
    if (n.contains("w_true")) {
      o.w_true.clear();
      for (const auto& z : n.at("w_true")) {
        o.w_true.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
      }
    }
    if (n.contains("transmit_power")) o.transmit_power = n.at("transmit_power").get<double>();
    if (n.contains("tx_range")) o.tx_range = n.at("tx_range").get<double>();
    if (n.contains("path_loss_exponent"))
      o.path_loss_exponent = n.at("path_loss_exponent").get<double>();
    if (n.contains("step_size")) o.step_size = n.at("step_size").get<double>();
    if (n.contains("sigma_u2_range")) parse_range(n, "sigma_u2_range", o.sigma_u2_min, o.sigma_u2_max);
    if (n.contains("meas_noise_var_range"))
      parse_range(n, "meas_noise_var_range", o.meas_noise_min, o.meas_noise_max);
    if (n.contains("link_snr_db_range"))
      parse_range(n, "link_snr_db_range", o.link_snr_db_min, o.link_snr_db_max);
    if (n.contains("fading_variance")) o.fading_variance = n.at("fading_variance").get<double>();
    if (n.contains("reciprocal_fading")) o.reciprocal_fading = n.at("reciprocal_fading").get<bool>();
    if (n.contains("seed")) cfg.network_seed = n.at("seed").get<std::uint64_t>();
    if (n.contains("explicit")) {
      cfg.explicit_network = network_from_json(n.at("explicit").dump());
    }
    if (o.n < 1 || o.m < 1) throw ConfigError("config: n_nodes and dim must be >= 1");
    if (static_cast<int>(o.w_true.size()) != o.m)
      throw ConfigError("config: w_true length must equal dim");
  }

  if (j.contains("algorithm")) {
    const json& a = j.at("algorithm");
    reject_unknown(a, {"modes", "gamma_rule", "iterations", "runs", "err_window"}, "algorithm");
    if (a.contains("modes")) cfg.modes = a.at("modes").get<std::vector<std::string>>();
    if (a.contains("gamma_rule")) cfg.gamma_rule = parse_rule(a.at("gamma_rule").get<std::string>());
    if (a.contains("iterations")) cfg.iterations = a.at("iterations").get<int>();
    if (a.contains("runs")) cfg.runs = a.at("runs").get<int>();
    if (a.contains("err_window")) cfg.err_window = a.at("err_window").get<int>();
    if (cfg.iterations < 1) throw ConfigError("config: iterations must be >= 1");
    if (cfg.runs < 1) throw ConfigError("config: runs must be >= 1");
    if (cfg.modes.empty()) throw ConfigError("config: mode list must not be empty");
    for (const std::string& m : cfg.modes) parse_mode(m);  // validates names
  }
  cfg.reciprocal_fading = cfg.network_options.reciprocal_fading;

  if (j.contains("theory")) {
    const json& t = j.at("theory");
    reject_unknown(t, {"barf_variant", "rv_mode", "mc_samples", "modes", "transient"}, "theory");
    if (t.contains("barf_variant")) {
      const std::string v = t.at("barf_variant").get<std::string>();
      if (v == "gaussian") cfg.barf_variant = BarFVariant::Gaussian;
      else if (v == "small_step") cfg.barf_variant = BarFVariant::SmallStep;
      else throw ConfigError("config: barf_variant must be gaussian or small_step");
    }
    if (t.contains("rv_mode")) {
      const std::string v = t.at("rv_mode").get<std::string>();
      if (v == "montecarlo") cfg.rv_mode = RvMode::MonteCarlo;
      else if (v == "taylor") cfg.rv_mode = RvMode::Taylor;
      else throw ConfigError("config: rv_mode must be montecarlo or taylor");
    }
    if (t.contains("mc_samples")) cfg.mc_samples = t.at("mc_samples").get<long>();
    if (t.contains("modes")) cfg.theory_modes = t.at("modes").get<std::vector<std::string>>();
    if (t.contains("transient")) cfg.transient = t.at("transient").get<bool>();
    if (cfg.mc_samples < 1) throw ConfigError("config: mc_samples must be >= 1");
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    reject_unknown(s, {"indices", "modes", "runs", "iterations"}, "sweep");
    if (s.contains("indices")) cfg.sweep_indices = s.at("indices").get<std::vector<int>>();
    if (s.contains("modes")) cfg.sweep_modes = s.at("modes").get<std::vector<std::string>>();
    if (s.contains("runs")) cfg.sweep_runs = s.at("runs").get<int>();
    if (s.contains("iterations")) cfg.sweep_iterations = s.at("iterations").get<int>();
    for (const std::string& m : cfg.sweep_modes) parse_mode(m);
  }

  if (j.contains("output")) {
    const json& o = j.at("output");
    reject_unknown(o, {"dir", "per_node_curves", "steady_window_frac"}, "output");
    if (o.contains("dir")) cfg.out_dir = o.at("dir").get<std::string>();
    if (o.contains("per_node_curves")) cfg.per_node_curves = o.at("per_node_curves").get<bool>();
    if (o.contains("steady_window_frac"))
      cfg.steady_window_frac = o.at("steady_window_frac").get<double>();
    if (cfg.steady_window_frac <= 0.0 || cfg.steady_window_frac > 1.0)
      throw ConfigError("config: steady_window_frac must be in (0, 1]");
  }
  return cfg;
}

AppConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string AppConfig::canonical_json() const {
  json j;
  json net;
  net["n_nodes"] = network_options.n;
  net["dim"] = network_options.m;
  json w = json::array();
  for (const auto& z : network_options.w_true) w.push_back({z.real(), z.imag()});
  net["w_true"] = w;
  net["transmit_power"] = network_options.transmit_power;
  net["tx_range"] = network_options.tx_range;
  net["path_loss_exponent"] = network_options.path_loss_exponent;
  net["step_size"] = network_options.step_size;
  net["sigma_u2_range"] = {network_options.sigma_u2_min, network_options.sigma_u2_max};
  net["meas_noise_var_range"] = {network_options.meas_noise_min, network_options.meas_noise_max};
  net["link_snr_db_range"] = {network_options.link_snr_db_min, network_options.link_snr_db_max};
  net["fading_variance"] = network_options.fading_variance;
  net["reciprocal_fading"] = network_options.reciprocal_fading;
  net["seed"] = network_seed;
  if (explicit_network) net["explicit"] = json::parse(network_to_json(*explicit_network));
  j["network"] = net;
  j["algorithm"] = {{"modes", modes},
                    {"gamma_rule", rule_name(gamma_rule)},
                    {"iterations", iterations},
                    {"runs", runs},
                    {"err_window", err_window}};
  j["theory"] = {{"barf_variant", barf_variant == BarFVariant::Gaussian ? "gaussian" : "small_step"},
                 {"rv_mode", rv_mode == RvMode::MonteCarlo ? "montecarlo" : "taylor"},
                 {"mc_samples", mc_samples},
                 {"modes", theory_modes},
                 {"transient", transient}};
  j["sweep"] = {{"indices", sweep_indices},
                {"modes", sweep_modes},
                {"runs", sweep_runs},
                {"iterations", sweep_iterations}};
  j["output"] = {{"dir", out_dir},
                 {"per_node_curves", per_node_curves},
                 {"steady_window_frac", steady_window_frac}};
  j["master_seed"] = master_seed;
  return j.dump();
}

std::uint64_t AppConfig::hash() const {
  const std::string s = canonical_json();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

NetworkModel make_network(const AppConfig& cfg) {
  if (cfg.explicit_network) return *cfg.explicit_network;
  return sample_network(cfg.network_seed, cfg.network_options);
}

}  // namespace fadediff
