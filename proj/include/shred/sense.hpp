#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shred/simulate.hpp"

namespace shred {

/// Thermocouple-style absolute uncertainty used as the default noise level.
inline constexpr double kDefaultNoiseSigma = 0.5;

enum class SensorKind { stationary, mobile };

/// Sensors live on grid indices; no interpolation.
///
/// A stationary spec may list several locations, each contributing one
/// measurement channel. A mobile spec is a single channel whose location at
/// time instant j is path[j].
struct SensorSpec {
  SensorKind kind = SensorKind::stationary;
  std::vector<std::size_t> indices;
  std::string id;

  static SensorSpec stationary(std::vector<std::size_t> locations, std::string id = {});
  static SensorSpec mobile(std::vector<std::size_t> path, std::string id = {});

  std::size_t channels() const noexcept { return kind == SensorKind::mobile ? 1 : indices.size(); }
  /// Grid index observed by `channel` at time instant `j`.
  std::size_t location(std::size_t channel, std::size_t j) const;

  bool operator==(const SensorSpec&) const = default;
};

std::size_t total_channels(const std::vector<SensorSpec>& sensors);

/// Throws IndexOutOfRange / PathLengthMismatch.
void validate_sensors(const std::vector<SensorSpec>& sensors, std::size_t num_points, std::size_t num_times);

/// Rows are channels (in sensor order), columns are time instants.
struct MeasurementTrajectory {
  Eigen::MatrixXd values;
  std::vector<SensorSpec> sensors;
  TimeGrid times;
  double noise_sigma = 0.0;
};

/// Exact gather: values(c, j) = snapshots(loc_c(j), j).
MeasurementTrajectory sample(const SnapshotMatrix& snapshots, const std::vector<SensorSpec>& sensors);

/// i.i.d. Gaussian perturbation, deterministic in `seed`.
MeasurementTrajectory add_noise(const MeasurementTrajectory& traj, double sigma, std::uint64_t seed);

/// Scatter the trajectory back onto a grid-sized matrix. Unsensed entries are
/// NaN.
Eigen::MatrixXd embed(const MeasurementTrajectory& traj, std::size_t num_points);

/// `num_configs` independent draws of `num_sensors` distinct stationary
/// locations (sorted ascending), one single-location SensorSpec per sensor.
std::vector<std::vector<SensorSpec>> random_sensor_configs(const SpatialGrid& grid, std::size_t num_sensors,
                                                           std::size_t num_configs, std::uint64_t seed);

/// A mobile path of `length` locations, distinct while length <= M.
SensorSpec random_mobile_path(const SpatialGrid& grid, std::size_t length, std::uint64_t seed);

}  // namespace shred
