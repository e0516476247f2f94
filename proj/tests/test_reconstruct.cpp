#include <cmath>
#include <numbers>

#include "doctest.h"
#include "shred/errors.hpp"
#include "shred/reconstruct.hpp"
#include "shred/rom.hpp"

using namespace shred;
using std::numbers::pi;

namespace {

struct Problem {
  ModalBasis basis;
  Eigen::VectorXcd a0;
};

Problem heat(BoundaryKind kind, std::size_t modes, std::size_t m = 128, double L = 2 * pi) {
  const SpatialGrid g(L, m, kind);
  ModalBasis b = build_basis(g, OperatorSpec::diffusion(1.0), modes);
  Eigen::VectorXcd a = random_real_coefficients(b, 21);
  return {std::move(b), std::move(a)};
}

SnapshotMatrix truth(const Problem& p, const TimeGrid& t) {
  return make_snapshots(evolve_linear(p.a0.cwiseProduct((p.basis.eigenvalues() * t.start()).array().exp().matrix()),
                                      p.basis, t),
                        p.basis, t);
}

double recover(const Problem& p, const std::vector<SensorSpec>& sensors, const TimeGrid& times,
               const TimeGrid& eval) {
  const auto traj = sample(truth(p, times), sensors);
  const auto sol = solve_coefficients(attach_measurements(build_system(p.basis, sensors, times), traj));
  return relative_error(reconstruct_field(sol.coefficients, p.basis, eval).values, truth(p, eval).values);
}

}  // namespace

TEST_SUITE("reconstruct") {

TEST_CASE("trajectory length and default spacing") {
  CHECK(required_trajectory_length(17, 1) == 17);
  CHECK(required_trajectory_length(17, 2) == 9);
  CHECK(required_trajectory_length(17, 3) == 6);
  Eigen::VectorXcd lam(2);
  lam << cplx(-4.0, 0.0), cplx(0.0, 2.0);
  const TimeGrid t = default_measurement_times(lam, 3);
  CHECK(t[1] == doctest::Approx(pi / 8));
  CHECK(default_measurement_times(Eigen::VectorXcd::Zero(2), 2)[1] == 1.0);
}

TEST_CASE("system layout is time major with surplus rows trimmed") {
  const Problem p = heat(BoundaryKind::periodic, 5, 32);
  const std::vector<SensorSpec> sensors{SensorSpec::stationary({1, 9})};
  const TimeGrid t = TimeGrid::uniform(0.0, 0.2, 3);
  const TrajectorySystem sys = build_system(p.basis, sensors, t);
  REQUIRE(sys.rows.size() == 5);
  CHECK(sys.rows[0] == RowLabel{0, 0});
  CHECK(sys.rows[1] == RowLabel{1, 0});
  CHECK(sys.rows[4] == RowLabel{0, 2});
  const cplx expected = std::exp(p.basis.mode(3).eigenvalue * 0.2) * p.basis.matrix()(1, 3);
  CHECK(std::abs(sys.matrix(4, 3) - expected) < 1e-15);
  CHECK_THROWS_AS(build_system(p.basis, sensors, TimeGrid::uniform(0.0, 0.2, 2)), CountMismatch);
  CHECK_THROWS_AS(build_system(p.basis, sensors, TimeGrid::uniform(0.0, 0.2, 4)), CountMismatch);
}

TEST_CASE("single sensor recovery with distinct eigenvalues") {
  const Problem p = heat(BoundaryKind::dirichlet0, 8, 128, pi);
  const std::vector<SensorSpec> s{SensorSpec::stationary({37})};
  const TimeGrid times = default_measurement_times(p.basis.eigenvalues(), 8);
  CHECK(recover(p, s, times, TimeGrid::uniform(0.0, 1.0, 11)) < 1e-8);
}

TEST_CASE("periodic heat: one sensor cannot separate +n and -n") {
  const Problem p = heat(BoundaryKind::periodic, 17);
  const std::vector<SensorSpec> s{SensorSpec::stationary({5})};
  const TimeGrid times = default_measurement_times(p.basis.eigenvalues(), 17);
  const auto traj = sample(truth(p, times), s);
  CHECK_THROWS_AS(solve_coefficients(attach_measurements(build_system(p.basis, s, times), traj)), IllConditioned);
}

TEST_CASE("several stationary sensors and a mobile sensor recover the field") {
  const Problem p = heat(BoundaryKind::periodic, 17);
  const TimeGrid eval = TimeGrid::uniform(0.0, 1.0, 11);
  const std::vector<SensorSpec> two{SensorSpec::stationary({11}), SensorSpec::stationary({52})};
  CHECK(recover(p, two, default_measurement_times(p.basis.eigenvalues(), 9), eval) < 1e-8);
  const std::vector<SensorSpec> three{SensorSpec::stationary({11, 52, 90})};
  CHECK(recover(p, three, default_measurement_times(p.basis.eigenvalues(), 6), eval) < 1e-8);
  const std::vector<SensorSpec> mobile{random_mobile_path(p.basis.grid(), 17, 4)};
  CHECK(recover(p, mobile, default_measurement_times(p.basis.eigenvalues(), 17), eval) < 1e-8);
}

TEST_CASE("coefficients are global in time") {
  const Problem p = heat(BoundaryKind::periodic, 9, 64);
  const std::vector<SensorSpec> s{SensorSpec::stationary({3, 40})};
  CHECK(recover(p, s, TimeGrid::uniform(0.0, 1.0, 5), TimeGrid::from_list({2.0})) < 1e-6);
}

TEST_CASE("a sensor on an eigenfunction node is rejected") {
  // dirichlet0 on [0, 1] with 63 interior points: x_32 = 0.5 is a node of sin(2 pi x).
  const Problem p = heat(BoundaryKind::dirichlet0, 3, 63, 1.0);
  const std::vector<SensorSpec> s{SensorSpec::stationary({31})};
  const TimeGrid times = default_measurement_times(p.basis.eigenvalues(), 3);
  const auto traj = sample(truth(p, times), s);
  CHECK_THROWS_AS(solve_coefficients(attach_measurements(build_system(p.basis, s, times), traj)), IllConditioned);
}

TEST_CASE("measurement layout must match the system") {
  const Problem p = heat(BoundaryKind::periodic, 5, 32);
  const std::vector<SensorSpec> s{SensorSpec::stationary({1, 9})};
  const TimeGrid t = TimeGrid::uniform(0.0, 0.2, 3);
  const TrajectorySystem sys = build_system(p.basis, s, t);
  CHECK_THROWS_AS(attach_measurements(sys, sample(truth(p, t), {SensorSpec::stationary({1})})), LayoutMismatch);
  CHECK_THROWS_AS(attach_measurements(sys, sample(truth(p, TimeGrid::uniform(0.0, 0.3, 3)), s)), LayoutMismatch);
  CHECK_THROWS_AS(solve_coefficients(sys), ValidationError);
}

TEST_CASE("coupled fields from u-only measurements") {
  const SpatialGrid g(1.0, 64, BoundaryKind::dirichlet0);
  const ModalBasis b = coupled_basis(g, 4);
  const CoupledOperators ops{OperatorSpec::diffusion(0.1), OperatorSpec::identity(1.0),
                             OperatorSpec::identity(-1.0), OperatorSpec::diffusion(0.05)};
  const Eigen::VectorXcd a0 = random_real_coefficients(b, 1), b0 = random_real_coefficients(b, 2);
  Eigen::VectorXcd lam(8);
  for (std::size_t k = 0; k < 4; ++k) lam.segment(2 * k, 2) = coupled_generator(ops, b.mode(k)).eigenvalues();
  const TimeGrid times = default_measurement_times(lam, 8);
  const CoupledTrajectory tr = evolve_coupled_coefficients(ops, b, a0, b0, times);
  const SensorSpec sensor = SensorSpec::stationary({17});
  const auto traj = sample(make_snapshots(tr.a, b, times), {sensor});
  const auto sol = solve_coefficients(attach_measurements(build_coupled_system(ops, b, sensor, times), traj));
  const auto [a, bb] = split_coupled(sol.coefficients);
  CHECK((a - a0).norm() / a0.norm() < 1e-6);
  CHECK((bb - b0).norm() / b0.norm() < 1e-6);

  const TimeGrid eval = TimeGrid::uniform(0.0, 2.0, 5);
  const auto [u, v] = reconstruct_coupled_fields(ops, b, a, bb, eval);
  const CoupledTrajectory ref = evolve_coupled_coefficients(ops, b, a0, b0, eval);
  CHECK(relative_error(v.values, make_snapshots(ref.b, b, eval).values) < 1e-6);

  const CoupledOperators decoupled{ops.op1, OperatorSpec::zero(), OperatorSpec::zero(), ops.op4};
  CHECK_THROWS_AS(solve_coefficients(attach_measurements(build_coupled_system(decoupled, b, sensor, times), traj)),
                  IllConditioned);
  CHECK_THROWS_AS(build_coupled_system(ops, b, sensor, TimeGrid::uniform(0.0, 1.0, 7)), CountMismatch);
}

}  // TEST_SUITE
