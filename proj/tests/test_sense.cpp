#include <cmath>
#include <set>

#include "doctest.h"
#include "shred/errors.hpp"
#include "shred/sense.hpp"

using namespace shred;

namespace {

SnapshotMatrix ramp(std::size_t m, std::size_t nt) {
  Eigen::MatrixXd v(m, nt);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < nt; ++j) v(i, j) = 100.0 * i + j;
  return SnapshotMatrix(v, SpatialGrid(1.0, m, BoundaryKind::periodic), TimeGrid::uniform(0.0, 1.0, nt));
}

}  // namespace

TEST_SUITE("sense") {

TEST_CASE("sampling gathers exact grid values") {
  const SnapshotMatrix s = ramp(10, 4);
  const auto traj = sample(s, {SensorSpec::stationary({2, 7}), SensorSpec::mobile({0, 1, 2, 9})});
  REQUIRE(traj.values.rows() == 3);
  CHECK(traj.values(0, 3) == 203.0);
  CHECK(traj.values(1, 0) == 700.0);
  CHECK(traj.values(2, 3) == 903.0);
  CHECK(traj.noise_sigma == 0.0);
}

TEST_CASE("sensor validation") {
  const SnapshotMatrix s = ramp(10, 4);
  CHECK_THROWS_AS(sample(s, {SensorSpec::stationary({10})}), IndexOutOfRange);
  CHECK_THROWS_AS(sample(s, {SensorSpec::mobile({1, 2, 3})}), PathLengthMismatch);
}

TEST_CASE("noise is deterministic and has the requested spread") {
  const SnapshotMatrix s(Eigen::MatrixXd::Zero(4, 20000), SpatialGrid(1.0, 4, BoundaryKind::periodic),
                         TimeGrid::uniform(0.0, 1.0, 20000));
  const auto clean = sample(s, {SensorSpec::stationary({1})});
  const auto a = add_noise(clean, 0.5, 3);
  const auto b = add_noise(clean, 0.5, 3);
  CHECK(a.values == b.values);
  CHECK(a.values != add_noise(clean, 0.5, 4).values);
  CHECK(a.noise_sigma == 0.5);
  const double mean = a.values.mean();
  const double sd = std::sqrt((a.values.array() - mean).square().mean());
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(sd - 0.5) < 0.01);
  CHECK(add_noise(clean, 0.0, 3).values == clean.values);
}

TEST_CASE("embedding marks unsensed points with NaN") {
  const auto traj = sample(ramp(5, 2), {SensorSpec::stationary({3})});
  const Eigen::MatrixXd e = embed(traj, 5);
  CHECK(e(3, 1) == 301.0);
  CHECK(std::isnan(e(0, 0)));
}

TEST_CASE("random sensor configurations") {
  const SpatialGrid g(1.0, 64, BoundaryKind::periodic);
  const auto configs = random_sensor_configs(g, 3, 10, 8);
  REQUIRE(configs.size() == 10);
  for (const auto& c : configs) {
    REQUIRE(c.size() == 3);
    std::set<std::size_t> locs;
    for (const auto& s : c) {
      CHECK(s.indices.size() == 1);
      CHECK(s.indices[0] < 64);
      locs.insert(s.indices[0]);
    }
    CHECK(locs.size() == 3);
    CHECK(c[0].indices[0] < c[1].indices[0]);
  }
  CHECK(random_sensor_configs(g, 3, 10, 8) == configs);
  CHECK_THROWS_AS(random_sensor_configs(g, 65, 1, 8), ValidationError);

  const SensorSpec path = random_mobile_path(g, 17, 2);
  CHECK(path.kind == SensorKind::mobile);
  CHECK(std::set<std::size_t>(path.indices.begin(), path.indices.end()).size() == 17);
}

}  // TEST_SUITE
