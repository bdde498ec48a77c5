#pragma once

#include <string>
#include <vector>

#include "fadediff/config.hpp"
#include "fadediff/harness.hpp"

namespace fadediff {

// CSV schema (frozen): iter, msd_db, emse_db, scope, mode, runs
// Predictions use runs = 0. Numbers are printed with %.10g so identical
// inputs produce identical bytes.
std::string curve_to_csv(const LearningCurve& curve);
void write_curve_csv(const std::string& path, const LearningCurve& curve);

// CSV schema (frozen): snr_index, mode, steady_msd_db, ci_halfwidth_db
std::string sweep_to_csv(const std::vector<SweepPoint>& points);

// Sidecar with config hash, seed, build id, wall time and divergence counts.
std::string metadata_json(const AppConfig& cfg, double wall_seconds,
                          const std::map<std::string, int>& diverged_counts);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace fadediff
