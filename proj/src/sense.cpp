#include "shred/sense.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "shred/errors.hpp"

namespace shred {

SensorSpec SensorSpec::stationary(std::vector<std::size_t> locations, std::string id) {
  if (locations.empty()) throw ValidationError("stationary sensor needs at least one location");
  return SensorSpec{SensorKind::stationary, std::move(locations), std::move(id)};
}

SensorSpec SensorSpec::mobile(std::vector<std::size_t> path, std::string id) {
  if (path.empty()) throw ValidationError("mobile sensor needs a non-empty path");
  return SensorSpec{SensorKind::mobile, std::move(path), std::move(id)};
}

std::size_t SensorSpec::location(std::size_t channel, std::size_t j) const {
  if (kind == SensorKind::mobile) {
    if (channel != 0) throw IndexOutOfRange("mobile sensor has a single channel");
    if (j >= indices.size()) throw PathLengthMismatch("time index beyond mobile path");
    return indices[j];
  }
  if (channel >= indices.size()) throw IndexOutOfRange("sensor channel out of range");
  return indices[channel];
}

std::size_t total_channels(const std::vector<SensorSpec>& sensors) {
  return std::accumulate(sensors.begin(), sensors.end(), std::size_t{0},
                         [](std::size_t acc, const SensorSpec& s) { return acc + s.channels(); });
}

void validate_sensors(const std::vector<SensorSpec>& sensors, std::size_t num_points, std::size_t num_times) {
  for (const auto& s : sensors) {
    for (auto idx : s.indices)
      if (idx >= num_points)
        throw IndexOutOfRange("sensor index " + std::to_string(idx) + " outside grid of " +
                              std::to_string(num_points));
    if (s.kind == SensorKind::mobile && s.indices.size() != num_times)
      throw PathLengthMismatch("mobile path length " + std::to_string(s.indices.size()) +
                               " != time instants " + std::to_string(num_times));
  }
}

MeasurementTrajectory sample(const SnapshotMatrix& snapshots, const std::vector<SensorSpec>& sensors) {
  const auto nt = static_cast<std::size_t>(snapshots.cols());
  validate_sensors(sensors, static_cast<std::size_t>(snapshots.rows()), nt);
  Eigen::MatrixXd values(static_cast<Eigen::Index>(total_channels(sensors)), snapshots.cols());
  Eigen::Index row = 0;
  for (const auto& s : sensors) {
    for (std::size_t c = 0; c < s.channels(); ++c, ++row)
      for (std::size_t j = 0; j < nt; ++j)
        values(row, static_cast<Eigen::Index>(j)) =
            snapshots.values(static_cast<Eigen::Index>(s.location(c, j)), static_cast<Eigen::Index>(j));
  }
  return MeasurementTrajectory{std::move(values), sensors, snapshots.times, 0.0};
}

MeasurementTrajectory add_noise(const MeasurementTrajectory& traj, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ValidationError("noise sigma must be non-negative");
  MeasurementTrajectory out = traj;
  out.noise_sigma = sigma;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  // Row-major draw order so the stream does not depend on storage order.
  for (Eigen::Index i = 0; i < out.values.rows(); ++i)
    for (Eigen::Index j = 0; j < out.values.cols(); ++j) out.values(i, j) += normal(rng);
  return out;
}

Eigen::MatrixXd embed(const MeasurementTrajectory& traj, std::size_t num_points) {
  const auto nt = static_cast<std::size_t>(traj.values.cols());
  validate_sensors(traj.sensors, num_points, nt);
  Eigen::MatrixXd out = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(num_points), traj.values.cols(),
                                                  std::numeric_limits<double>::quiet_NaN());
  Eigen::Index row = 0;
  for (const auto& s : traj.sensors)
    for (std::size_t c = 0; c < s.channels(); ++c, ++row)
      for (std::size_t j = 0; j < nt; ++j)
        out(static_cast<Eigen::Index>(s.location(c, j)), static_cast<Eigen::Index>(j)) =
            traj.values(row, static_cast<Eigen::Index>(j));
  return out;
}

namespace {

std::vector<std::size_t> draw_distinct(std::size_t population, std::size_t count, std::mt19937_64& rng) {
  std::vector<std::size_t> pool(population);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < count; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, population - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(count);
  return pool;
}

}  // namespace

std::vector<std::vector<SensorSpec>> random_sensor_configs(const SpatialGrid& grid, std::size_t num_sensors,
                                                           std::size_t num_configs, std::uint64_t seed) {
  if (num_sensors == 0) throw ValidationError("need at least one sensor");
  if (num_sensors > grid.num_points())
    throw ValidationError("more sensors than grid points");
  std::mt19937_64 rng(seed);
  std::vector<std::vector<SensorSpec>> configs;
  configs.reserve(num_configs);
  for (std::size_t c = 0; c < num_configs; ++c) {
    auto locs = draw_distinct(grid.num_points(), num_sensors, rng);
    std::sort(locs.begin(), locs.end());
    std::vector<SensorSpec> specs;
    for (std::size_t s = 0; s < locs.size(); ++s)
      specs.push_back(SensorSpec::stationary({locs[s]}, "c" + std::to_string(c) + "s" + std::to_string(s)));
    configs.push_back(std::move(specs));
  }
  return configs;
}

SensorSpec random_mobile_path(const SpatialGrid& grid, std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> path;
  path.reserve(length);
  while (path.size() < length) {
    auto chunk = draw_distinct(grid.num_points(), std::min(length - path.size(), grid.num_points()), rng);
    path.insert(path.end(), chunk.begin(), chunk.end());
  }
  return SensorSpec::mobile(std::move(path), "mobile");
}

}  // namespace shred
