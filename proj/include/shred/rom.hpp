#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shred/simulate.hpp"

namespace shred {

/// Truncated SVD of a snapshot matrix  X ~= U V_latent,  V_latent = U^T X.
struct SvdBundle {
  Eigen::MatrixXd basis;            // U, N_h x r, orthonormal columns
  Eigen::VectorXd singular_values;  // length r, non-increasing
  Eigen::MatrixXd latent;           // diag(sigma) W^T = U^T X, r x N_t
  double discarded_energy = 0.0;    // sum of sigma_k^2 over dropped triples

  std::size_t rank() const noexcept { return static_cast<std::size_t>(singular_values.size()); }
};

/// Thin SVD (r = min(rows, cols)) by one-sided Jacobi rotations.
/// Each U column's largest-magnitude entry is made positive.
SvdBundle thin_svd(const Eigen::MatrixXd& x);
inline SvdBundle thin_svd(const SnapshotMatrix& x) { return thin_svd(x.values); }

/// Keeps the leading r triples, 1 <= r <= bundle.rank().
SvdBundle truncate(const SvdBundle& bundle, std::size_t r);

/// U^T X.
Eigen::MatrixXd compress(const Eigen::MatrixXd& x, const SvdBundle& bundle);
/// U V.
Eigen::MatrixXd decompress(const Eigen::MatrixXd& latent, const SvdBundle& bundle);
SnapshotMatrix decompress(const Eigen::MatrixXd& latent, const SvdBundle& bundle, const SpatialGrid& grid,
                          const TimeGrid& times, std::string field_name = "u");

/// Column-wise concatenation of per-parameter snapshot matrices.
struct ParametricStack {
  SnapshotMatrix stacked;  // times are column indices 0..N_total-1
  std::vector<std::pair<std::size_t, std::size_t>> ranges;  // [begin, end) per parameter
  std::vector<TimeGrid> original_times;

  SnapshotMatrix block(std::size_t p) const;
};

ParametricStack stack_parametric(const std::vector<SnapshotMatrix>& matrices);
std::vector<SnapshotMatrix> unstack(const ParametricStack& stack);

/// ||X_hat - X||_F / ||X||_F (0 when both vanish).
double relative_error(const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x);
/// Per-column relative l2 error.
Eigen::VectorXd relative_error_series(const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x);

}  // namespace shred
