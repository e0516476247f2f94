#include "shred/simulate.hpp"

#include <cmath>
#include <cstdint>
#include <random>

#include "shred/errors.hpp"

namespace shred {

// ---------------------------------------------------------------------------
// TimeGrid

TimeGrid TimeGrid::uniform(double t_start, double t_end, std::size_t count) {
  if (count == 0) throw ValidationError("time grid needs at least one instant");
  if (!std::isfinite(t_start) || !std::isfinite(t_end))
    throw ValidationError("time grid bounds must be finite");
  if (count == 1) return TimeGrid({t_start}, true);
  if (!(t_end > t_start)) throw ValidationError("time grid requires t_end > t_start");
  std::vector<double> t(count);
  const double dt = (t_end - t_start) / static_cast<double>(count - 1);
  for (std::size_t j = 0; j < count; ++j) t[j] = t_start + dt * static_cast<double>(j);
  t.back() = t_end;
  return TimeGrid(std::move(t), true);
}

TimeGrid TimeGrid::from_list(std::vector<double> instants) {
  if (instants.empty()) throw ValidationError("time grid needs at least one instant");
  for (std::size_t j = 0; j < instants.size(); ++j) {
    if (!std::isfinite(instants[j])) throw ValidationError("time instants must be finite");
    if (j > 0 && !(instants[j] > instants[j - 1]))
      throw ValidationError("time instants must be strictly increasing");
  }
  return TimeGrid(std::move(instants), false);
}

TimeGrid TimeGrid::slice(std::size_t begin, std::size_t end) const {
  if (begin >= end || end > t_.size()) throw IndexOutOfRange("time grid slice out of range");
  return TimeGrid(std::vector<double>(t_.begin() + static_cast<std::ptrdiff_t>(begin),
                                      t_.begin() + static_cast<std::ptrdiff_t>(end)),
                  uniform_);
}

SnapshotMatrix::SnapshotMatrix(Eigen::MatrixXd v, SpatialGrid g, TimeGrid t, std::string name)
    : values(std::move(v)), grid(g), times(std::move(t)), field_name(std::move(name)) {
  if (static_cast<std::size_t>(values.rows()) != grid.num_points())
    throw DimensionMismatch("snapshot rows " + std::to_string(values.rows()) + " != grid points " +
                            std::to_string(grid.num_points()));
  if (static_cast<std::size_t>(values.cols()) != times.size())
    throw DimensionMismatch("snapshot columns " + std::to_string(values.cols()) +
                            " != time instants " + std::to_string(times.size()));
  if (!values.allFinite()) throw ValidationError("snapshot matrix has non-finite entries");
}

// ---------------------------------------------------------------------------
// Galerkin systems

GalerkinSystem GalerkinSystem::linear(Eigen::VectorXcd lambda) {
  const double bound = lambda.size() ? lambda.cwiseAbs().maxCoeff() : 0.0;
  const auto n = static_cast<std::size_t>(lambda.size());
  return GalerkinSystem(
      "linear", n,
      [lambda = std::move(lambda)](const Eigen::VectorXcd& a) -> Eigen::VectorXcd {
        return lambda.cwiseProduct(a);
      },
      bound);
}

GalerkinSystem GalerkinSystem::linear(const ModalBasis& basis) {
  return linear(basis.eigenvalues());
}

GalerkinSystem GalerkinSystem::burgers(const ModalBasis& basis, double nu) {
  if (basis.grid().boundary() != BoundaryKind::periodic)
    throw UnsupportedBoundaryOperator("burgers requires a periodic basis");
  if (!(nu >= 0.0)) throw ValidationError("viscosity must be non-negative");

  const auto n = static_cast<Eigen::Index>(basis.size());
  const auto m = static_cast<int>(basis.grid().num_points());
  Eigen::VectorXcd lambda(n);
  Eigen::VectorXcd ik(n);
  Eigen::VectorXd keep(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Mode& md = basis.mode(static_cast<std::size_t>(j));
    lambda[j] = -nu * md.wavenumber * md.wavenumber;
    ik[j] = cplx{0.0, md.wavenumber};
    keep[j] = 3 * std::abs(md.index) < m ? 1.0 : 0.0;
  }
  const double bound = n ? lambda.cwiseAbs().maxCoeff() : 0.0;
  const Eigen::MatrixXcd phi = basis.matrix();
  const double w = basis.grid().weight();

  auto rhs = [lambda, ik, keep, phi, w](const Eigen::VectorXcd& a) -> Eigen::VectorXcd {
    const Eigen::VectorXcd kept = a.cwiseProduct(keep.cast<cplx>());
    const Eigen::VectorXd u = (phi * kept).real();
    const Eigen::VectorXd ux = (phi * ik.cwiseProduct(kept)).real();
    const Eigen::VectorXcd prod = u.cwiseProduct(ux).cast<cplx>();
    const Eigen::VectorXcd nonlinear = (w * (phi.adjoint() * prod)).cwiseProduct(keep.cast<cplx>());
    return lambda.cwiseProduct(a) - nonlinear;
  };
  return GalerkinSystem("burgers", basis.size(), std::move(rhs), bound);
}

GalerkinSystem GalerkinSystem::custom(std::size_t dimension, Rhs rhs, double linear_bound) {
  if (!rhs) throw ValidationError("custom Galerkin system needs a callable");
  return GalerkinSystem("custom", dimension, std::move(rhs), linear_bound);
}

// ---------------------------------------------------------------------------
// Evolution

Eigen::MatrixXcd evolve_linear(const Eigen::VectorXcd& a0, const Eigen::VectorXcd& lambda,
                               const TimeGrid& times) {
  if (a0.size() != lambda.size())
    throw DimensionMismatch("initial coefficients " + std::to_string(a0.size()) + " != modes " +
                            std::to_string(lambda.size()));
  Eigen::MatrixXcd out(a0.size(), static_cast<Eigen::Index>(times.size()));
  const double t0 = times.start();
  for (std::size_t j = 0; j < times.size(); ++j) {
    const double dt = times[j] - t0;
    out.col(static_cast<Eigen::Index>(j)) = a0.cwiseProduct((lambda * dt).array().exp().matrix());
  }
  return out;
}

Eigen::MatrixXcd evolve_linear(const Eigen::VectorXcd& a0, const ModalBasis& basis, const TimeGrid& times) {
  return evolve_linear(a0, basis.eigenvalues(), times);
}

Eigen::MatrixXcd evolve_galerkin(const GalerkinSystem& sys, const Eigen::VectorXcd& a0,
                                 const TimeGrid& times, double dt) {
  if (static_cast<std::size_t>(a0.size()) != sys.dimension())
    throw DimensionMismatch("initial coefficients do not match system dimension");
  if (!(dt > 0.0)) throw ValidationError("dt_internal must be positive");
  if (sys.linear_bound() * dt >= 2.5)
    throw StepTooLarge("|lambda_max| * dt = " + std::to_string(sys.linear_bound() * dt) +
                       " exceeds the RK4 stability heuristic 2.5");

  std::vector<long> steps(times.size(), 0);
  for (std::size_t j = 1; j < times.size(); ++j) {
    const double interval = times[j] - times[j - 1];
    const double ratio = interval / dt;
    const long count = std::lround(ratio);
    if (count < 1 || std::abs(ratio - static_cast<double>(count)) > 1e-9 * std::max(1.0, ratio))
      throw ValidationError("dt_internal does not divide the sampling interval " +
                            std::to_string(interval));
    steps[j] = count;
  }

  Eigen::MatrixXcd out(a0.size(), static_cast<Eigen::Index>(times.size()));
  Eigen::VectorXcd a = a0;
  out.col(0) = a;
  for (std::size_t j = 1; j < times.size(); ++j) {
    const double h = (times[j] - times[j - 1]) / static_cast<double>(steps[j]);
    for (long s = 0; s < steps[j]; ++s) {
      const Eigen::VectorXcd k1 = sys(a);
      const Eigen::VectorXcd k2 = sys(a + 0.5 * h * k1);
      const Eigen::VectorXcd k3 = sys(a + 0.5 * h * k2);
      const Eigen::VectorXcd k4 = sys(a + h * k3);
      a += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const double peak = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
      if (!(peak <= 1e12))
        throw BlowUp("modal amplitude exceeded 1e12 at t = " +
                     std::to_string(times[j - 1] + h * static_cast<double>(s + 1)));
    }
    out.col(static_cast<Eigen::Index>(j)) = a;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Coupled linear systems

ModalBasis coupled_basis(const SpatialGrid& grid, std::size_t num_modes) {
  // -k^2 orders modes exactly as the canonical wavenumber list.
  return build_basis(grid, OperatorSpec::diffusion(1.0), num_modes);
}

Eigen::Matrix2cd coupled_generator(const CoupledOperators& ops, const Mode& mode) {
  Eigen::Matrix2cd g;
  g << ops.op1.symbol(mode.wavenumber), ops.op2.symbol(mode.wavenumber),
      ops.op3.symbol(mode.wavenumber), ops.op4.symbol(mode.wavenumber);
  return g;
}

Eigen::Matrix2cd mode_propagator(const Eigen::Matrix2cd& g, double t) {
  // exp(G t) = e^{tau t} [cosh(d t) I + sinh(d t)/d (G - tau I)],
  // tau = tr/2, d^2 = tau^2 - det.
  const cplx tau = 0.5 * g.trace();
  const cplx d = std::sqrt(tau * tau - g.determinant());
  const cplx z = d * t;
  cplx sinhc;  // sinh(z)/d
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    sinhc = t * (1.0 + z2 / 6.0 + z2 * z2 / 120.0);
  } else {
    sinhc = std::sinh(z) / d;
  }
  const Eigen::Matrix2cd shifted = g - tau * Eigen::Matrix2cd::Identity();
  return std::exp(tau * t) * (std::cosh(z) * Eigen::Matrix2cd::Identity() + sinhc * shifted);
}

CoupledTrajectory evolve_coupled_coefficients(const CoupledOperators& ops, const ModalBasis& basis,
                                              const Eigen::VectorXcd& a0, const Eigen::VectorXcd& b0,
                                              const TimeGrid& times) {
  for (const auto* op : {&ops.op1, &ops.op2, &ops.op3, &ops.op4}) check_admissible(basis.grid(), *op);
  const auto n = static_cast<Eigen::Index>(basis.size());
  if (a0.size() != n || b0.size() != n)
    throw DimensionMismatch("coupled initial coefficients do not match the basis");

  CoupledTrajectory out{Eigen::MatrixXcd(n, static_cast<Eigen::Index>(times.size())),
                        Eigen::MatrixXcd(n, static_cast<Eigen::Index>(times.size()))};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Matrix2cd g = coupled_generator(ops, basis.mode(static_cast<std::size_t>(k)));
    for (std::size_t j = 0; j < times.size(); ++j) {
      const Eigen::Matrix2cd e = mode_propagator(g, times[j] - times.start());
      const Eigen::Vector2cd ab = e * Eigen::Vector2cd(a0[k], b0[k]);
      out.a(k, static_cast<Eigen::Index>(j)) = ab[0];
      out.b(k, static_cast<Eigen::Index>(j)) = ab[1];
    }
  }
  return out;
}

std::pair<SnapshotMatrix, SnapshotMatrix> evolve_coupled_linear(const CoupledOperators& ops,
                                                                const Eigen::VectorXd& u0,
                                                                const Eigen::VectorXd& v0,
                                                                const SpatialGrid& grid,
                                                                std::size_t num_modes,
                                                                const TimeGrid& times) {
  for (const auto* op : {&ops.op1, &ops.op2, &ops.op3, &ops.op4}) check_admissible(grid, *op);
  const ModalBasis basis = coupled_basis(grid, num_modes);
  const auto traj = evolve_coupled_coefficients(ops, basis, project(u0, basis), project(v0, basis), times);
  return {make_snapshots(traj.a, basis, times, "u"), make_snapshots(traj.b, basis, times, "v")};
}

SnapshotMatrix make_snapshots(const Eigen::MatrixXcd& trajectory, const ModalBasis& basis,
                              const TimeGrid& times, std::string field_name) {
  if (static_cast<std::size_t>(trajectory.cols()) != times.size())
    throw DimensionMismatch("trajectory columns do not match the time grid");
  Eigen::MatrixXd values(static_cast<Eigen::Index>(basis.grid().num_points()), trajectory.cols());
  for (Eigen::Index j = 0; j < trajectory.cols(); ++j)
    values.col(j) = synthesize(trajectory.col(j), basis);
  return SnapshotMatrix(std::move(values), basis.grid(), times, std::move(field_name));
}

Eigen::VectorXcd random_real_coefficients(const ModalBasis& basis, std::uint64_t seed, double amplitude,
                                          double decay) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n);
  const bool periodic = basis.grid().boundary() == BoundaryKind::periodic;
  const int m = static_cast<int>(basis.grid().num_points());

  auto find_index = [&](int index) -> Eigen::Index {
    for (Eigen::Index j = 0; j < n; ++j)
      if (basis.mode(static_cast<std::size_t>(j)).index == index) return j;
    return -1;
  };

  for (Eigen::Index j = 0; j < n; ++j) {
    const int idx = basis.mode(static_cast<std::size_t>(j)).index;
    const double scale = amplitude / std::pow(1.0 + std::abs(idx), decay);
    if (!periodic || idx == 0 || 2 * idx == m) {
      a[j] = scale * normal(rng);
      continue;
    }
    if (idx < 0) continue;  // filled from its +n partner
    const cplx value = scale * cplx{normal(rng), normal(rng)} / std::sqrt(2.0);
    const Eigen::Index partner = find_index(-idx);
    if (partner < 0) continue;  // an unpaired mode cannot carry a real field
    a[j] = value;
    a[partner] = std::conj(value);
  }
  return a;
}

}  // namespace shred
