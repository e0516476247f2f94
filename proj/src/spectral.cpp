#include "shred/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "shred/errors.hpp"

namespace shred {

std::string to_string(BoundaryKind kind) {
  return kind == BoundaryKind::periodic ? "periodic" : "dirichlet0";
}

BoundaryKind boundary_from_string(const std::string& name) {
  if (name == "periodic") return BoundaryKind::periodic;
  if (name == "dirichlet0") return BoundaryKind::dirichlet0;
  throw ValidationError("unknown boundary kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// SpatialGrid

SpatialGrid::SpatialGrid(double length, std::size_t num_points, BoundaryKind kind)
    : length_(length), num_points_(num_points), kind_(kind) {
  if (!(length > 0.0) || !std::isfinite(length))
    throw ValidationError("grid length must be positive and finite");
  if (num_points < 4) throw ValidationError("grid needs at least 4 points");
}

double SpatialGrid::point(std::size_t i) const {
  if (i >= num_points_) throw IndexOutOfRange("grid index " + std::to_string(i));
  const double m = static_cast<double>(num_points_);
  if (kind_ == BoundaryKind::periodic) return static_cast<double>(i) * length_ / m;
  return static_cast<double>(i + 1) * length_ / (m + 1.0);
}

Eigen::VectorXd SpatialGrid::points() const {
  Eigen::VectorXd x(static_cast<Eigen::Index>(num_points_));
  for (std::size_t i = 0; i < num_points_; ++i) x[static_cast<Eigen::Index>(i)] = point(i);
  return x;
}

double SpatialGrid::weight() const noexcept {
  const double m = static_cast<double>(num_points_);
  return kind_ == BoundaryKind::periodic ? length_ / m : length_ / (m + 1.0);
}

// ---------------------------------------------------------------------------
// OperatorSpec

OperatorSpec::OperatorSpec(std::vector<cplx> coefficients) : coefficients_(std::move(coefficients)) {
  if (coefficients_.empty()) throw ValidationError("operator needs at least one coefficient");
  while (coefficients_.size() > 1 && coefficients_.back() == cplx{0.0, 0.0}) coefficients_.pop_back();
  if (coefficients_.size() > kMaxOrder + 1)
    throw ValidationError("operator order exceeds " + std::to_string(kMaxOrder));
  for (const auto& c : coefficients_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
      throw ValidationError("operator coefficients must be finite");
}

std::size_t OperatorSpec::max_order() const noexcept {
  return coefficients_.empty() ? 0 : coefficients_.size() - 1;
}

bool OperatorSpec::is_zero() const noexcept {
  return std::all_of(coefficients_.begin(), coefficients_.end(),
                     [](const cplx& c) { return c == cplx{0.0, 0.0}; });
}

bool OperatorSpec::has_odd_orders() const noexcept {
  for (std::size_t m = 1; m < coefficients_.size(); m += 2)
    if (coefficients_[m] != cplx{0.0, 0.0}) return true;
  return false;
}

cplx OperatorSpec::symbol(double k) const {
  const cplx ik{0.0, k};
  cplx power{1.0, 0.0};
  cplx sum{0.0, 0.0};
  for (const auto& c : coefficients_) {
    sum += c * power;
    power *= ik;
  }
  return sum;
}

OperatorSpec OperatorSpec::operator+(const OperatorSpec& other) const {
  std::vector<cplx> c(std::max(coefficients_.size(), other.coefficients_.size()), cplx{});
  for (std::size_t m = 0; m < coefficients_.size(); ++m) c[m] += coefficients_[m];
  for (std::size_t m = 0; m < other.coefficients_.size(); ++m) c[m] += other.coefficients_[m];
  return OperatorSpec(std::move(c));
}

// ---------------------------------------------------------------------------
// ModalBasis

ModalBasis::ModalBasis(SpatialGrid grid, std::vector<Mode> modes)
    : grid_(grid), modes_(std::move(modes)) {
  const auto m = static_cast<Eigen::Index>(grid_.num_points());
  phi_.resize(m, static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t n = 0; n < modes_.size(); ++n) {
    if (modes_[n].samples.size() != m) throw DimensionMismatch("mode samples do not match grid");
    phi_.col(static_cast<Eigen::Index>(n)) = modes_[n].samples;
  }
}

Eigen::VectorXcd ModalBasis::eigenvalues() const {
  Eigen::VectorXcd lambda(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t n = 0; n < modes_.size(); ++n)
    lambda[static_cast<Eigen::Index>(n)] = modes_[n].eigenvalue;
  return lambda;
}

cplx ModalBasis::evaluate(std::size_t n, double x) const {
  const Mode& md = modes_.at(n);
  if (grid_.boundary() == BoundaryKind::periodic)
    return md.norm * std::exp(cplx{0.0, md.wavenumber * x});
  return md.norm * std::sin(md.wavenumber * x);
}

std::vector<int> canonical_indices(const SpatialGrid& grid) {
  const int m = static_cast<int>(grid.num_points());
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(m));
  if (grid.boundary() == BoundaryKind::dirichlet0) {
    for (int n = 1; n <= m; ++n) out.push_back(n);
    return out;
  }
  out.push_back(0);
  for (int n = 1; static_cast<int>(out.size()) < m; ++n) {
    out.push_back(n);
    if (static_cast<int>(out.size()) < m) out.push_back(-n);
  }
  return out;
}

double wavenumber(const SpatialGrid& grid, int index) {
  const double scale = grid.boundary() == BoundaryKind::periodic ? 2.0 * std::numbers::pi
                                                                 : std::numbers::pi;
  return scale * static_cast<double>(index) / grid.length();
}

void check_admissible(const SpatialGrid& grid, const OperatorSpec& op) {
  if (grid.boundary() == BoundaryKind::dirichlet0 && op.has_odd_orders())
    throw UnsupportedBoundaryOperator(
        "odd-order derivatives are not admissible with dirichlet0 boundaries");
}

ModalBasis build_basis(const SpatialGrid& grid, const OperatorSpec& op, std::size_t num_modes) {
  check_admissible(grid, op);
  if (op.is_zero()) throw ValidationError("operator has no nonzero coefficient");
  if (num_modes > grid.num_points())
    throw TooManyModes(std::to_string(num_modes) + " modes requested on a " +
                       std::to_string(grid.num_points()) + "-point grid");

  const auto indices = canonical_indices(grid);
  std::vector<cplx> lambda(indices.size());
  for (std::size_t j = 0; j < indices.size(); ++j)
    lambda[j] = op.symbol(wavenumber(grid, indices[j]));

  std::vector<std::size_t> order(indices.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(lambda[a]) < std::abs(lambda[b]);
  });

  const bool periodic = grid.boundary() == BoundaryKind::periodic;
  const double norm = periodic ? 1.0 / std::sqrt(grid.length()) : std::sqrt(2.0 / grid.length());
  const Eigen::VectorXd x = grid.points();

  std::vector<Mode> modes;
  modes.reserve(num_modes);
  for (std::size_t j = 0; j < num_modes; ++j) {
    const std::size_t pick = order[j];
    Mode md;
    md.index = indices[pick];
    md.wavenumber = wavenumber(grid, md.index);
    md.eigenvalue = lambda[pick];
    md.norm = norm;
    md.samples.resize(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      md.samples[i] = periodic ? norm * std::exp(cplx{0.0, md.wavenumber * x[i]})
                               : cplx{norm * std::sin(md.wavenumber * x[i]), 0.0};
    }
    modes.push_back(std::move(md));
  }
  return ModalBasis(grid, std::move(modes));
}

Eigen::VectorXcd project(const Eigen::Ref<const Eigen::VectorXd>& field, const ModalBasis& basis) {
  if (static_cast<std::size_t>(field.size()) != basis.grid().num_points())
    throw DimensionMismatch("field length " + std::to_string(field.size()) + " != grid size " +
                            std::to_string(basis.grid().num_points()));
  const Eigen::VectorXcd f = field.cast<cplx>();
  return basis.grid().weight() * (basis.matrix().adjoint() * f);
}

Eigen::VectorXcd synthesize_complex(const Eigen::Ref<const Eigen::VectorXcd>& coeffs,
                                    const ModalBasis& basis) {
  if (static_cast<std::size_t>(coeffs.size()) != basis.size())
    throw DimensionMismatch("coefficient count " + std::to_string(coeffs.size()) +
                            " != mode count " + std::to_string(basis.size()));
  return basis.matrix() * coeffs;
}

Eigen::VectorXd synthesize(const Eigen::Ref<const Eigen::VectorXcd>& coeffs, const ModalBasis& basis) {
  const Eigen::VectorXcd u = synthesize_complex(coeffs, basis);
  const double re_max = u.size() ? u.real().cwiseAbs().maxCoeff() : 0.0;
  const double im_max = u.size() ? u.imag().cwiseAbs().maxCoeff() : 0.0;
  if (im_max > 1e-8 * (1.0 + re_max))
    throw NonRealField("imaginary residue " + std::to_string(im_max) +
                       " (coefficients are not conjugate-symmetric)");
  return u.real();
}

}  // namespace shred
