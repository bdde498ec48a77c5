#include "fadediff/output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fadediff {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

std::string curve_to_csv(const LearningCurve& curve) {
  std::ostringstream os;
  os << "iter,msd_db,emse_db,scope,mode,runs\n";
  if (curve.all_diverged) {
    os << "0,diverged,diverged," << curve.scope << "," << curve.mode << ",0\n";
    return os.str();
  }
  for (std::size_t t = 0; t < curve.msd.size(); ++t) {
    os << t << "," << fmt(to_db(curve.msd[t])) << "," << fmt(to_db(curve.emse[t])) << ","
       << curve.scope << "," << curve.mode << "," << curve.runs << "\n";
  }
  return os.str();
}

void write_curve_csv(const std::string& path, const LearningCurve& curve) {
  write_text_file(path, curve_to_csv(curve));
}

std::string sweep_to_csv(const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  os << "snr_index,mode,steady_msd_db,ci_halfwidth_db\n";
  for (const SweepPoint& p : points) {
    if (p.all_diverged) {
      os << p.snr_index << "," << p.mode << ",diverged,diverged\n";
      continue;
    }
    // dB half-width of a linear-scale interval, evaluated upward
    const double hw_db = to_db(p.steady_msd + p.steady_msd_ci) - to_db(p.steady_msd);
    os << p.snr_index << "," << p.mode << "," << fmt(to_db(p.steady_msd)) << "," << fmt(hw_db)
       << "\n";
  }
  return os.str();
}

std::string metadata_json(const AppConfig& cfg, double wall_seconds,
                          const std::map<std::string, int>& diverged_counts) {
  nlohmann::json j;
  char hash_hex[24];
  std::snprintf(hash_hex, sizeof(hash_hex), "%016llx",
                static_cast<unsigned long long>(cfg.hash()));
  j["config_hash"] = hash_hex;
  j["master_seed"] = cfg.master_seed;
  j["wall_time_s"] = wall_seconds;
  j["schema_version"] = 1;
  std::string build = "unknown";
#if defined(__GNUC__)
  build = "gcc-" + std::to_string(__GNUC__) + "." + std::to_string(__GNUC_MINOR__);
#endif
  j["build"] = build;
  j["diverged_runs"] = diverged_counts;
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << content;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace fadediff
