#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shred/sense.hpp"
#include "shred/simulate.hpp"
#include "shred/spectral.hpp"

namespace shred {

/// Condition estimates above this abort the solve with IllConditioned.
inline constexpr double kConditionLimit = 1e12;

struct RowLabel {
  std::size_t channel = 0;     // flattened sensor channel
  std::size_t time_index = 0;  // index into the measurement TimeGrid

  bool operator==(const RowLabel&) const = default;
};

/// Square system A x = b for the modal coefficients.
///
/// Orientation: row r is one scalar measurement (channel c at t_j), column n
/// is one unknown coefficient, A(r, n) = exp(lambda_n t_j) phi_n(x_c(t_j)).
/// Rows are time-major (all channels at t_0, then t_1, ...); when the channel
/// count does not divide N the surplus rows at the last instant are dropped.
struct TrajectorySystem {
  Eigen::MatrixXcd matrix;
  std::optional<Eigen::VectorXcd> rhs;
  std::vector<RowLabel> rows;
  std::size_t num_channels = 0;
  TimeGrid times;
  double condition_estimate = 0.0;  // filled in by solve_coefficients
};

struct SolveDiagnostics {
  double condition_estimate = 0.0;
  double residual = 0.0;  // ||A x - b|| / ||b||
};

struct SolveResult {
  Eigen::VectorXcd coefficients;
  SolveDiagnostics diagnostics;
};

/// ceil(N / m).
std::size_t required_trajectory_length(std::size_t num_modes, std::size_t num_sensors);

/// `count` instants starting at t_start with spacing dt = (pi/2) / max|lambda|
/// (dt = 1 when every eigenvalue is zero).
TimeGrid default_measurement_times(const Eigen::VectorXcd& eigenvalues, std::size_t count,
                                   double t_start = 0.0);

TrajectorySystem build_system(const ModalBasis& basis, const std::vector<SensorSpec>& sensors,
                              const TimeGrid& times);

/// Fills b in row order; throws LayoutMismatch when the trajectory does not
/// match the system's channels or instants.
TrajectorySystem attach_measurements(TrajectorySystem sys, const MeasurementTrajectory& traj);

/// Column-pivoted QR solve guarded by an SVD condition estimate.
/// Throws SingularSystem (exact rank deficiency) or IllConditioned.
SolveResult solve_coefficients(const TrajectorySystem& sys);

/// u(x, t) = sum_n a_n exp(lambda_n t) phi_n(x) at every evaluation instant.
SnapshotMatrix reconstruct_field(const Eigen::VectorXcd& coeffs, const ModalBasis& basis,
                                 const TimeGrid& eval_times, std::string field_name = "u");

/// Stacked unknowns [a; b] for the coupled system, observed through u only.
/// Row (c, t_j) holds [E(t_j)]_11 phi_n(x) in the a-block and
/// [E(t_j)]_12 phi_n(x) in the b-block. Requires exactly 2N measurements.
TrajectorySystem build_coupled_system(const CoupledOperators& ops, const ModalBasis& basis,
                                      const SensorSpec& sensor, const TimeGrid& times);

/// Splits a stacked [a; b] solution.
std::pair<Eigen::VectorXcd, Eigen::VectorXcd> split_coupled(const Eigen::VectorXcd& stacked);

/// Both fields from the coefficients at t = 0, evaluated at absolute times.
std::pair<SnapshotMatrix, SnapshotMatrix> reconstruct_coupled_fields(const CoupledOperators& ops,
                                                                     const ModalBasis& basis,
                                                                     const Eigen::VectorXcd& a,
                                                                     const Eigen::VectorXcd& b,
                                                                     const TimeGrid& eval_times);

}  // namespace shred
