#include "fadediff/network.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "fadediff/rng.hpp"
#include "json.hpp"

namespace fadediff {

bool NetworkModel::is_neighbor(int sender, int receiver) const {
  const auto& nb = neighbors[receiver];
  return std::binary_search(nb.begin(), nb.end(), sender);
}

std::vector<cplx> NetworkModel::w_true_stacked() const {
  std::vector<cplx> omega(static_cast<std::size_t>(n) * m);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < m; ++j) omega[static_cast<std::size_t>(k) * m + j] = w_true[j];
  return omega;
}

double link_threshold(double r, double r_o, double alpha) {
  if (r <= 0.0 || r_o <= 0.0 || alpha <= 0.0) {
    throw ConfigError("link_threshold: r, r_o and alpha must be positive");
  }
  return std::pow(r / r_o, alpha);
}

double path_gain(double transmit_power, double r, double alpha) {
  return std::sqrt(transmit_power / std::pow(r, alpha));
}

std::vector<std::vector<int>> build_topology(const std::vector<std::pair<double, double>>& pos,
                                             double r_o) {
  if (r_o <= 0.0) throw ConfigError("build_topology: r_o must be positive");
  const int n = static_cast<int>(pos.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (pos[a] == pos[b]) throw ConfigError("build_topology: duplicate node positions");
    }
  std::vector<std::vector<int>> nb(n);
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < n; ++l) {
      const double dx = pos[k].first - pos[l].first;
      const double dy = pos[k].second - pos[l].second;
      if (l == k || std::sqrt(dx * dx + dy * dy) <= r_o) nb[k].push_back(l);
    }
  }
  return nb;
}

bool is_connected(const std::vector<std::vector<int>>& neighbors) {
  if (neighbors.empty()) return true;
  std::vector<char> seen(neighbors.size(), 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  std::size_t count = 1;
  while (!q.empty()) {
    const int k = q.front();
    q.pop();
    for (int l : neighbors[k]) {
      if (!seen[l]) {
        seen[l] = 1;
        ++count;
        q.push(l);
      }
    }
  }
  return count == neighbors.size();
}

NetworkModel sample_network(std::uint64_t seed, const NetworkOptions& opt) {
  if (opt.n < 1 || opt.m < 1) throw ConfigError("sample_network: need n >= 1, m >= 1");
  if (static_cast<int>(opt.w_true.size()) != opt.m) {
    throw ConfigError("sample_network: w_true length must equal m");
  }
  RngStream rng(mix_seed(seed, kStreamNetwork));

  NetworkModel net;
  net.n = opt.n;
  net.m = opt.m;
  net.w_true = opt.w_true;
  net.transmit_power = opt.transmit_power;
  net.tx_range = opt.tx_range;
  net.path_loss_exponent = opt.path_loss_exponent;
  net.seed = seed;

  // Positions first, then node profiles, then pair draws; the order is part
  // of the reproducibility contract. Placements that leave a node without
  // any neighbor are redrawn (full connectivity is still only reported).
  std::vector<std::pair<double, double>> pos;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    pos.clear();
    for (int k = 0; k < opt.n; ++k) {
      std::pair<double, double> p;
      do {
        p = {rng.uniform(), rng.uniform()};
      } while (std::find(pos.begin(), pos.end(), p) != pos.end());
      pos.push_back(p);
    }
    net.neighbors = build_topology(pos, opt.tx_range);
    bool isolated = false;
    for (const auto& nb : net.neighbors) isolated = isolated || nb.size() < 2;
    if (!isolated || opt.n == 1) break;
  }
  net.connected = is_connected(net.neighbors);

  net.nodes.resize(opt.n);
  for (int k = 0; k < opt.n; ++k) {
    NodeParams& nd = net.nodes[k];
    nd.x = pos[k].first;
    nd.y = pos[k].second;
    nd.regressor_variance = rng.uniform(opt.sigma_u2_min, opt.sigma_u2_max);
    nd.regressor_covariance = CMat::identity(opt.m) * cplx{nd.regressor_variance, 0.0};
    nd.meas_noise_var = rng.uniform(opt.meas_noise_min, opt.meas_noise_max);
    nd.step_size = opt.step_size;
  }

  const double ro_alpha = std::pow(opt.tx_range, opt.path_loss_exponent);
  net.links.assign(static_cast<std::size_t>(opt.n) * opt.n, LinkParams{});
  for (int k = 0; k < opt.n; ++k) {
    for (int l : net.neighbors[k]) {
      if (l <= k) continue;
      const double dx = pos[k].first - pos[l].first;
      const double dy = pos[k].second - pos[l].second;
      const double r = std::sqrt(dx * dx + dy * dy);
      const double snr_db = rng.uniform(opt.link_snr_db_min, opt.link_snr_db_max);
      const double noise = opt.transmit_power / (ro_alpha * std::pow(10.0, snr_db / 10.0));
      LinkParams lp;
      lp.distance = r;
      lp.fading_variance = opt.fading_variance;
      lp.link_noise_var = noise;
      lp.pilot_noise_var = noise;
      lp.path_gain = path_gain(opt.transmit_power, r, opt.path_loss_exponent);
      lp.nu = link_threshold(r, opt.tx_range, opt.path_loss_exponent);
      net.link(l, k) = lp;
      net.link(k, l) = lp;
    }
  }
  return net;
}

namespace {

using nlohmann::json;

json cplx_to_json(const cplx& z) { return json::array({z.real(), z.imag()}); }
cplx cplx_from_json(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json cmat_to_json(const CMat& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(cplx_to_json(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

CMat cmat_from_json(const json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j.at(0).size() : 0;
  CMat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = cplx_from_json(j.at(r).at(c));
  return m;
}

}  // namespace

std::string network_to_json(const NetworkModel& net) {
  json j;
  j["n"] = net.n;
  j["m"] = net.m;
  json w = json::array();
  for (const auto& z : net.w_true) w.push_back(cplx_to_json(z));
  j["w_true"] = w;
  j["transmit_power"] = net.transmit_power;
  j["tx_range"] = net.tx_range;
  j["path_loss_exponent"] = net.path_loss_exponent;
  j["connected"] = net.connected;
  j["seed"] = net.seed;
  j["neighbors"] = net.neighbors;
  json nodes = json::array();
  for (const auto& nd : net.nodes) {
    nodes.push_back({{"x", nd.x},
                     {"y", nd.y},
                     {"regressor_variance", nd.regressor_variance},
                     {"regressor_covariance", cmat_to_json(nd.regressor_covariance)},
                     {"meas_noise_var", nd.meas_noise_var},
                     {"step_size", nd.step_size}});
  }
  j["nodes"] = nodes;
  json links = json::array();
  for (int k = 0; k < net.n; ++k) {
    for (int l : net.neighbors[k]) {
      if (l == k) continue;
      const LinkParams& lp = net.link(l, k);
      links.push_back({{"from", l},
                       {"to", k},
                       {"distance", lp.distance},
                       {"fading_variance", lp.fading_variance},
                       {"link_noise_var", lp.link_noise_var},
                       {"pilot_noise_var", lp.pilot_noise_var}});
    }
  }
  j["links"] = links;
  return j.dump(2);
}

NetworkModel network_from_json(const std::string& text) {
  json j = json::parse(text);
  NetworkModel net;
  net.n = j.at("n").get<int>();
  net.m = j.at("m").get<int>();
  for (const auto& z : j.at("w_true")) net.w_true.push_back(cplx_from_json(z));
  net.transmit_power = j.at("transmit_power").get<double>();
  net.tx_range = j.at("tx_range").get<double>();
  net.path_loss_exponent = j.at("path_loss_exponent").get<double>();
  net.connected = j.at("connected").get<bool>();
  net.seed = j.at("seed").get<std::uint64_t>();
  net.neighbors = j.at("neighbors").get<std::vector<std::vector<int>>>();
  for (const auto& nj : j.at("nodes")) {
    NodeParams nd;
    nd.x = nj.at("x").get<double>();
    nd.y = nj.at("y").get<double>();
    nd.regressor_variance = nj.at("regressor_variance").get<double>();
    nd.regressor_covariance = cmat_from_json(nj.at("regressor_covariance"));
    nd.meas_noise_var = nj.at("meas_noise_var").get<double>();
    nd.step_size = nj.at("step_size").get<double>();
    net.nodes.push_back(nd);
  }
  net.links.assign(static_cast<std::size_t>(net.n) * net.n, LinkParams{});
  for (const auto& lj : j.at("links")) {
    const int from = lj.at("from").get<int>();
    const int to = lj.at("to").get<int>();
    LinkParams lp;
    lp.distance = lj.at("distance").get<double>();
    lp.fading_variance = lj.at("fading_variance").get<double>();
    lp.link_noise_var = lj.at("link_noise_var").get<double>();
    lp.pilot_noise_var = lj.at("pilot_noise_var").get<double>();
    lp.path_gain = path_gain(net.transmit_power, lp.distance, net.path_loss_exponent);
    lp.nu = link_threshold(lp.distance, net.tx_range, net.path_loss_exponent);
    net.link(from, to) = lp;
  }
  return net;
}

}  // namespace fadediff
