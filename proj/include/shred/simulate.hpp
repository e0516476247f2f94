#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shred/spectral.hpp"

namespace shred {

/// Strictly increasing list of sample instants.
class TimeGrid {
 public:
  /// `count` instants from t_start to t_end inclusive.
  static TimeGrid uniform(double t_start, double t_end, std::size_t count);
  static TimeGrid from_list(std::vector<double> instants);

  std::size_t size() const noexcept { return t_.size(); }
  double operator[](std::size_t j) const { return t_[j]; }
  double start() const { return t_.front(); }
  double end() const { return t_.back(); }
  const std::vector<double>& values() const noexcept { return t_; }
  bool is_uniform() const noexcept { return uniform_; }

  /// Instants [begin, end).
  TimeGrid slice(std::size_t begin, std::size_t end) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  TimeGrid(std::vector<double> t, bool uniform) : t_(std::move(t)), uniform_(uniform) {}
  std::vector<double> t_;
  bool uniform_ = false;
};

/// Full-order field samples: rows are spatial DOF, columns are time instants.
struct SnapshotMatrix {
  Eigen::MatrixXd values;
  SpatialGrid grid;
  TimeGrid times;
  std::string field_name = "u";

  SnapshotMatrix(Eigen::MatrixXd values, SpatialGrid grid, TimeGrid times, std::string field_name = "u");

  Eigen::Index rows() const noexcept { return values.rows(); }
  Eigen::Index cols() const noexcept { return values.cols(); }
};

/// Right-hand side family for  da_n/dt = f_n(a_1, ..., a_N).
class GalerkinSystem {
 public:
  using Rhs = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

  /// f_n = lambda_n a_n.
  static GalerkinSystem linear(Eigen::VectorXcd eigenvalues);
  static GalerkinSystem linear(const ModalBasis& basis);
  /// Viscous Burgers  u_t = -u u_x + nu u_xx  on a periodic Fourier basis.
  /// The quadratic term is evaluated pseudo-spectrally on the grid with
  /// 2/3-rule dealiasing (modes with 3|n| >= M are excluded from it).
  static GalerkinSystem burgers(const ModalBasis& basis, double nu);
  /// Arbitrary table/callable; `linear_bound` is |lambda_max| of its stiff
  /// linear part, used by the step-size guard.
  static GalerkinSystem custom(std::size_t dimension, Rhs rhs, double linear_bound);

  std::size_t dimension() const noexcept { return dimension_; }
  const std::string& family() const noexcept { return family_; }
  double linear_bound() const noexcept { return linear_bound_; }

  Eigen::VectorXcd operator()(const Eigen::VectorXcd& a) const { return rhs_(a); }

 private:
  GalerkinSystem(std::string family, std::size_t dimension, Rhs rhs, double linear_bound)
      : family_(std::move(family)), dimension_(dimension), rhs_(std::move(rhs)),
        linear_bound_(linear_bound) {}

  std::string family_;
  std::size_t dimension_ = 0;
  Rhs rhs_;
  double linear_bound_ = 0.0;
};

/// Closed form: column j is a0_n exp(lambda_n (t_j - t_start)). `a0` is the
/// modal state at times.start(); with t_start = 0 this matches the
/// representation u = sum a_n exp(lambda_n t) phi_n used by `reconstruct`.
Eigen::MatrixXcd evolve_linear(const Eigen::VectorXcd& a0, const ModalBasis& basis, const TimeGrid& times);
Eigen::MatrixXcd evolve_linear(const Eigen::VectorXcd& a0, const Eigen::VectorXcd& eigenvalues,
                               const TimeGrid& times);

/// Fixed-step classical RK4. dt_internal must divide every sampling interval
/// and satisfy linear_bound * dt < 2.5 (StepTooLarge otherwise). Throws
/// BlowUp when any |a_n| exceeds 1e12.
Eigen::MatrixXcd evolve_galerkin(const GalerkinSystem& sys, const Eigen::VectorXcd& a0,
                                 const TimeGrid& times, double dt_internal);

/// Four operators of the coupled system  u_t = L1 u + L2 v,  v_t = L3 u + L4 v.
struct CoupledOperators {
  OperatorSpec op1 = OperatorSpec::zero();
  OperatorSpec op2 = OperatorSpec::zero();
  OperatorSpec op3 = OperatorSpec::zero();
  OperatorSpec op4 = OperatorSpec::zero();
};

/// Basis in canonical wavenumber order, shared by both coupled fields.
ModalBasis coupled_basis(const SpatialGrid& grid, std::size_t num_modes);

/// Per-mode generator [[s1, s2], [s3, s4]] with s_i the symbol of op_i at mode n.
Eigen::Matrix2cd coupled_generator(const CoupledOperators& ops, const Mode& mode);

/// exp(G t) for a 2x2 complex matrix.
Eigen::Matrix2cd mode_propagator(const Eigen::Matrix2cd& generator, double t);

struct CoupledTrajectory {
  Eigen::MatrixXcd a;  // u coefficients, N x N_t
  Eigen::MatrixXcd b;  // v coefficients, N x N_t
};

/// Evolves the initial modal states (at t = times.start()) by per-mode
/// matrix exponentials.
CoupledTrajectory evolve_coupled_coefficients(const CoupledOperators& ops, const ModalBasis& basis,
                                              const Eigen::VectorXcd& a0, const Eigen::VectorXcd& b0,
                                              const TimeGrid& times);

std::pair<SnapshotMatrix, SnapshotMatrix> evolve_coupled_linear(const CoupledOperators& ops,
                                                                const Eigen::VectorXd& u0,
                                                                const Eigen::VectorXd& v0,
                                                                const SpatialGrid& grid,
                                                                std::size_t num_modes,
                                                                const TimeGrid& times);

/// Synthesizes every column; propagates NonRealField.
SnapshotMatrix make_snapshots(const Eigen::MatrixXcd& trajectory, const ModalBasis& basis,
                              const TimeGrid& times, std::string field_name = "u");

/// Random coefficients of a real field: a_{-n} = conj(a_n), a_0 and any
/// self-conjugate (Nyquist) mode real. Magnitudes scale as
/// amplitude / (1 + |n|)^decay.
Eigen::VectorXcd random_real_coefficients(const ModalBasis& basis, std::uint64_t seed,
                                          double amplitude = 1.0, double decay = 0.0);

}  // namespace shred
