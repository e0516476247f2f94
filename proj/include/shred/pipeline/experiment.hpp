#pragma once

#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "shred/pipeline/config.hpp"

namespace shred::pipeline {

/// CLI stages in pipeline order. `reconstruct` applies to the exact
/// reconstructors, `train` to the SHRED scenarios.
enum class Stage { simulate, sample, reconstruct, svd, train, eval, report };

std::string to_string(Stage s);
Stage stage_from_string(const std::string& name);

struct RunReport {
  std::string scenario;
  std::string config_hash;
  std::vector<std::pair<std::string, double>> timings;  // seconds, JSON only
  std::vector<std::pair<std::string, double>> metrics;  // insertion order
  std::vector<std::string> artifacts;                    // relative to output_dir

  double metric(const std::string& name) const;
  bool has_metric(const std::string& name) const;
  /// `metric,value` lines in insertion order with shortest round-trip values.
  std::string metrics_csv() const;
  nlohmann::json to_json() const;
};

/// Runs the scenario up to `stop`. With `write_files` the artifacts of every
/// completed stage plus config.json, metrics.csv and report.json land in
/// config.output_dir.
RunReport run_experiment(const ExperimentConfig& config, Stage stop = Stage::eval, bool write_files = true);

}  // namespace shred::pipeline
