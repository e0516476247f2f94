#include "shred/reconstruct.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "shred/errors.hpp"

namespace shred {

namespace {

std::string scientific(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

std::size_t required_trajectory_length(std::size_t num_modes, std::size_t num_sensors) {
  if (num_sensors == 0) throw ValidationError("need at least one sensor");
  return (num_modes + num_sensors - 1) / num_sensors;
}

TimeGrid default_measurement_times(const Eigen::VectorXcd& eigenvalues, std::size_t count, double t_start) {
  if (count == 0) throw ValidationError("need at least one measurement time");
  const double peak = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double dt = peak > 0.0 ? 0.5 * std::numbers::pi / peak : 1.0;
  std::vector<double> t(count);
  for (std::size_t j = 0; j < count; ++j) t[j] = t_start + dt * static_cast<double>(j);
  return TimeGrid::from_list(std::move(t));
}

TrajectorySystem build_system(const ModalBasis& basis, const std::vector<SensorSpec>& sensors,
                              const TimeGrid& times) {
  validate_sensors(sensors, basis.grid().num_points(), times.size());
  const std::size_t n = basis.size();
  const std::size_t channels = total_channels(sensors);
  const std::size_t total = channels * times.size();
  if (channels == 0 || total < n || total - n >= channels)
    throw CountMismatch(std::to_string(channels) + " channels x " + std::to_string(times.size()) +
                        " instants do not give " + std::to_string(n) +
                        " measurements (need ceil(N/m) instants)");

  // (sensor, channel) -> flattened channel
  std::vector<std::pair<const SensorSpec*, std::size_t>> flat;
  for (const auto& s : sensors)
    for (std::size_t c = 0; c < s.channels(); ++c) flat.emplace_back(&s, c);

  const Eigen::VectorXcd lambda = basis.eigenvalues();
  TrajectorySystem sys{Eigen::MatrixXcd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)),
                       std::nullopt, {}, channels, times, 0.0};
  sys.rows.reserve(n);
  for (std::size_t j = 0; j < times.size() && sys.rows.size() < n; ++j) {
    const Eigen::VectorXcd decay = (lambda * times[j]).array().exp().matrix();
    for (std::size_t c = 0; c < channels && sys.rows.size() < n; ++c) {
      const std::size_t loc = flat[c].first->location(flat[c].second, j);
      const auto r = static_cast<Eigen::Index>(sys.rows.size());
      sys.matrix.row(r) = decay.transpose().cwiseProduct(basis.matrix().row(static_cast<Eigen::Index>(loc)));
      sys.rows.push_back(RowLabel{c, j});
    }
  }
  return sys;
}

TrajectorySystem attach_measurements(TrajectorySystem sys, const MeasurementTrajectory& traj) {
  if (static_cast<std::size_t>(traj.values.rows()) != sys.num_channels)
    throw LayoutMismatch("trajectory has " + std::to_string(traj.values.rows()) + " channels, system expects " +
                         std::to_string(sys.num_channels));
  if (traj.times.size() != sys.times.size())
    throw LayoutMismatch("trajectory has " + std::to_string(traj.times.size()) +
                         " instants, system expects " + std::to_string(sys.times.size()));
  for (std::size_t j = 0; j < sys.times.size(); ++j)
    if (std::abs(traj.times[j] - sys.times[j]) > 1e-12 * (1.0 + std::abs(sys.times[j])))
      throw LayoutMismatch("trajectory instants differ from the system's");

  Eigen::VectorXcd b(static_cast<Eigen::Index>(sys.rows.size()));
  for (std::size_t r = 0; r < sys.rows.size(); ++r)
    b[static_cast<Eigen::Index>(r)] = traj.values(static_cast<Eigen::Index>(sys.rows[r].channel),
                                                  static_cast<Eigen::Index>(sys.rows[r].time_index));
  sys.rhs = std::move(b);
  return sys;
}

SolveResult solve_coefficients(const TrajectorySystem& sys) {
  const auto& a = sys.matrix;
  if (a.rows() != a.cols() || a.rows() == 0) throw DimensionMismatch("trajectory system must be square");
  if (!sys.rhs) throw ValidationError("measurements not attached");
  const auto& b = *sys.rhs;
  if (b.size() != a.rows()) throw DimensionMismatch("rhs length does not match the system");

  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  const auto& sv = svd.singularValues();
  const double smax = sv[0];
  const double smin = sv[sv.size() - 1];
  if (smax == 0.0 || smin == 0.0)
    throw SingularSystem("trajectory matrix is exactly rank deficient (sensor at an eigenfunction node, "
                         "repeated eigenvalues, or an unobservable coupled component)");
  const double cond = smax / smin;
  if (!(cond <= kConditionLimit))
    throw IllConditioned("condition estimate " + scientific(cond) + " exceeds 1e12 (sensor at an "
                         "eigenfunction node, repeated eigenvalues seen by one location, degenerate time "
                         "spacing, or an unobservable coupled component)");

  const Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
  SolveResult out;
  out.coefficients = qr.solve(b);
  out.diagnostics.condition_estimate = cond;
  const double bnorm = b.norm();
  const double rnorm = (a * out.coefficients - b).norm();
  out.diagnostics.residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
  return out;
}

SnapshotMatrix reconstruct_field(const Eigen::VectorXcd& coeffs, const ModalBasis& basis,
                                 const TimeGrid& eval_times, std::string field_name) {
  if (static_cast<std::size_t>(coeffs.size()) != basis.size())
    throw DimensionMismatch("coefficient count does not match the basis");
  const Eigen::VectorXcd lambda = basis.eigenvalues();
  Eigen::MatrixXcd traj(coeffs.size(), static_cast<Eigen::Index>(eval_times.size()));
  for (std::size_t j = 0; j < eval_times.size(); ++j)
    traj.col(static_cast<Eigen::Index>(j)) = coeffs.cwiseProduct((lambda * eval_times[j]).array().exp().matrix());
  return make_snapshots(traj, basis, eval_times, std::move(field_name));
}

TrajectorySystem build_coupled_system(const CoupledOperators& ops, const ModalBasis& basis,
                                      const SensorSpec& sensor, const TimeGrid& times) {
  for (const auto* op : {&ops.op1, &ops.op2, &ops.op3, &ops.op4}) check_admissible(basis.grid(), *op);
  validate_sensors({sensor}, basis.grid().num_points(), times.size());
  const std::size_t n = basis.size();
  const std::size_t total = sensor.channels() * times.size();
  if (total != 2 * n)
    throw CountMismatch(std::to_string(total) + " u-measurements supplied, the coupled system needs exactly " +
                        std::to_string(2 * n));

  std::vector<Eigen::Matrix2cd> generators;
  generators.reserve(n);
  for (std::size_t k = 0; k < n; ++k) generators.push_back(coupled_generator(ops, basis.mode(k)));

  const auto nn = static_cast<Eigen::Index>(n);
  TrajectorySystem sys{Eigen::MatrixXcd(2 * nn, 2 * nn), std::nullopt, {}, sensor.channels(), times, 0.0};
  sys.rows.reserve(2 * n);
  for (std::size_t j = 0; j < times.size(); ++j) {
    std::vector<Eigen::Matrix2cd> e(n);
    for (std::size_t k = 0; k < n; ++k) e[k] = mode_propagator(generators[k], times[j]);
    for (std::size_t c = 0; c < sensor.channels(); ++c) {
      const auto loc = static_cast<Eigen::Index>(sensor.location(c, j));
      const auto r = static_cast<Eigen::Index>(sys.rows.size());
      for (std::size_t k = 0; k < n; ++k) {
        const cplx phi = basis.matrix()(loc, static_cast<Eigen::Index>(k));
        sys.matrix(r, static_cast<Eigen::Index>(k)) = e[k](0, 0) * phi;
        sys.matrix(r, nn + static_cast<Eigen::Index>(k)) = e[k](0, 1) * phi;
      }
      sys.rows.push_back(RowLabel{c, j});
    }
  }
  return sys;
}

std::pair<Eigen::VectorXcd, Eigen::VectorXcd> split_coupled(const Eigen::VectorXcd& stacked) {
  if (stacked.size() % 2 != 0) throw DimensionMismatch("stacked coupled solution has odd length");
  const Eigen::Index n = stacked.size() / 2;
  return {stacked.head(n), stacked.tail(n)};
}

std::pair<SnapshotMatrix, SnapshotMatrix> reconstruct_coupled_fields(const CoupledOperators& ops,
                                                                     const ModalBasis& basis,
                                                                     const Eigen::VectorXcd& a,
                                                                     const Eigen::VectorXcd& b,
                                                                     const TimeGrid& eval_times) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (a.size() != n || b.size() != n) throw DimensionMismatch("coefficient count does not match the basis");
  const auto nt = static_cast<Eigen::Index>(eval_times.size());
  Eigen::MatrixXcd ua(n, nt), vb(n, nt);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Matrix2cd g = coupled_generator(ops, basis.mode(static_cast<std::size_t>(k)));
    for (Eigen::Index j = 0; j < nt; ++j) {
      const Eigen::Vector2cd ab =
          mode_propagator(g, eval_times[static_cast<std::size_t>(j)]) * Eigen::Vector2cd(a[k], b[k]);
      ua(k, j) = ab[0];
      vb(k, j) = ab[1];
    }
  }
  return {make_snapshots(ua, basis, eval_times, "u"), make_snapshots(vb, basis, eval_times, "v")};
}

}  // namespace shred
