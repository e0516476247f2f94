#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "shred/net/model.hpp"
#include "shred/net/train.hpp"
#include "shred/spectral.hpp"

namespace shred::pipeline {

enum class Scenario {
  linear_exact,
  multi_sensor,
  mobile,
  coupled,
  nonlinear_galerkin,
  parametric_shred,
  forecast_shred,
};

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& name);

struct PdeConfig {
  BoundaryKind boundary = BoundaryKind::periodic;
  double length = 1.0;
  std::size_t grid_points = 64;
  std::size_t num_modes = 8;
  std::vector<double> op{0.0, 0.0, 1.0};  // real coefficients c_0..c_4
  std::optional<double> nu;                 // Burgers viscosity
  std::optional<std::array<std::vector<double>, 4>> coupled;

  bool operator==(const PdeConfig&) const = default;
};

struct InitialCondition {
  double amplitude = 1.0;
  double decay = 0.0;

  bool operator==(const InitialCondition&) const = default;
};

struct TimeConfig {
  double start = 0.0;
  double end = 1.0;
  std::size_t count = 2;
  std::optional<double> dt_internal;

  bool operator==(const TimeConfig&) const = default;
};

/// Measurement instants for the exact reconstructors. Missing fields fall
/// back to the default spacing starting at t = 0 and ceil(N/m) instants.
struct MeasurementConfig {
  std::optional<double> start;
  std::optional<double> end;
  std::optional<std::size_t> count;

  bool operator==(const MeasurementConfig&) const = default;
};

struct SensorConfig {
  std::vector<std::size_t> locations;
  std::vector<std::size_t> mobile_path;
  bool random_mobile = false;
  std::optional<std::size_t> num_sensors;
  std::optional<std::size_t> num_configs;

  bool operator==(const SensorConfig&) const = default;
};

struct ExperimentConfig {
  Scenario scenario = Scenario::linear_exact;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  std::size_t workers = 1;
  bool plots = true;
  PdeConfig pde;
  InitialCondition initial_condition;
  TimeConfig time;
  MeasurementConfig measurement;
  SensorConfig sensors;
  double noise_sigma = 0.0;
  std::size_t svd_rank = 10;
  std::vector<double> parameters;  // scales the operator: L_mu = mu * L
  net::Architecture network;        // inputs/outputs are derived per run
  net::TrainConfig train;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Throws ConfigError with every schema violation (the first names the
/// offending field) before interpreting anything.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Full document including defaults; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& config);

/// FNV-1a 64 of the canonical (sorted-key, compact) serialization, as hex.
std::string config_hash(const ExperimentConfig& config);

OperatorSpec make_operator(const std::vector<double>& coefficients);

}  // namespace shred::pipeline
