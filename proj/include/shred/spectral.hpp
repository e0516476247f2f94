#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shred {

using cplx = std::complex<double>;

enum class BoundaryKind { periodic, dirichlet0 };

std::string to_string(BoundaryKind kind);
BoundaryKind boundary_from_string(const std::string& name);

/// Uniform 1-D grid on [0, L].
///
/// periodic:   x_i = i L / M,        i = 0..M-1 (no duplicated endpoint)
/// dirichlet0: x_i = i L / (M + 1),  i = 1..M   (interior points only)
class SpatialGrid {
 public:
  SpatialGrid(double length, std::size_t num_points, BoundaryKind kind);

  double length() const noexcept { return length_; }
  std::size_t num_points() const noexcept { return num_points_; }
  BoundaryKind boundary() const noexcept { return kind_; }

  double point(std::size_t i) const;
  Eigen::VectorXd points() const;
  /// Trapezoidal quadrature weight; uniform for both boundary kinds.
  double weight() const noexcept;

  bool operator==(const SpatialGrid&) const = default;

 private:
  double length_;
  std::size_t num_points_;
  BoundaryKind kind_;
};

/// Constant-coefficient operator  L = sum_m c_m d^m/dx^m,  m = 0..4.
class OperatorSpec {
 public:
  static constexpr std::size_t kMaxOrder = 4;

  explicit OperatorSpec(std::vector<cplx> coefficients);

  static OperatorSpec zero() { return OperatorSpec(std::vector<cplx>{cplx{}}); }
  static OperatorSpec identity(cplx c = 1.0) { return OperatorSpec(std::vector<cplx>{c}); }
  static OperatorSpec advection(cplx c) { return OperatorSpec(std::vector<cplx>{0.0, c}); }
  static OperatorSpec diffusion(cplx kappa) { return OperatorSpec(std::vector<cplx>{0.0, 0.0, kappa}); }

  const std::vector<cplx>& coefficients() const noexcept { return coefficients_; }
  std::size_t max_order() const noexcept;
  bool is_zero() const noexcept;
  bool has_odd_orders() const noexcept;

  /// Fourier symbol: sum_m c_m (i k)^m.
  cplx symbol(double wavenumber) const;

  OperatorSpec operator+(const OperatorSpec& other) const;

 private:
  std::vector<cplx> coefficients_;
};

/// One eigenpair sampled on the grid.
struct Mode {
  int index = 0;            // signed n for periodic, n >= 1 for dirichlet0
  double wavenumber = 0.0;  // k_n = 2 pi n / L (periodic) or n pi / L (dirichlet0)
  cplx eigenvalue;
  double norm = 0.0;        // 1/sqrt(L) or sqrt(2/L)
  Eigen::VectorXcd samples;
};

/// Orthonormal eigenbasis of an OperatorSpec on a SpatialGrid.
class ModalBasis {
 public:
  ModalBasis(SpatialGrid grid, std::vector<Mode> modes);

  const SpatialGrid& grid() const noexcept { return grid_; }
  const std::vector<Mode>& modes() const noexcept { return modes_; }
  std::size_t size() const noexcept { return modes_.size(); }
  const Mode& mode(std::size_t i) const { return modes_.at(i); }

  Eigen::VectorXcd eigenvalues() const;
  /// M x N matrix whose column n holds phi_n on the grid.
  const Eigen::MatrixXcd& matrix() const noexcept { return phi_; }
  /// Analytic eigenfunction value at an arbitrary coordinate.
  cplx evaluate(std::size_t mode, double x) const;

 private:
  SpatialGrid grid_;
  std::vector<Mode> modes_;
  Eigen::MatrixXcd phi_;
};

/// Signed wavenumber indices in canonical order: 0, +1, -1, +2, -2, ...
/// (periodic) or 1, 2, 3, ... (dirichlet0), M entries in total.
std::vector<int> canonical_indices(const SpatialGrid& grid);

double wavenumber(const SpatialGrid& grid, int index);

/// The first N modes ordered by |lambda| ascending, ties broken by the
/// canonical wavenumber order.
ModalBasis build_basis(const SpatialGrid& grid, const OperatorSpec& op, std::size_t num_modes);

/// Throws UnsupportedBoundaryOperator when `op` has odd orders on a
/// dirichlet0 grid.
void check_admissible(const SpatialGrid& grid, const OperatorSpec& op);

/// a_n = <f, phi_n> with trapezoidal weights.
Eigen::VectorXcd project(const Eigen::Ref<const Eigen::VectorXd>& field, const ModalBasis& basis);

/// Re(sum a_n phi_n). Throws NonRealField when the imaginary residue exceeds
/// 1e-8 * (1 + max|Re|).
Eigen::VectorXd synthesize(const Eigen::Ref<const Eigen::VectorXcd>& coeffs, const ModalBasis& basis);

/// Complex synthesis without the realness check.
Eigen::VectorXcd synthesize_complex(const Eigen::Ref<const Eigen::VectorXcd>& coeffs,
                                    const ModalBasis& basis);

}  // namespace shred
