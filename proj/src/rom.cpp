#include "shred/rom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shred/errors.hpp"

namespace shred {

namespace {

struct JacobiResult {
  Eigen::MatrixXd u;  // m x n
  Eigen::VectorXd s;  // n
  Eigen::MatrixXd w;  // n x n
};

// Hestenes one-sided Jacobi for a tall (m >= n) matrix.
JacobiResult one_sided_jacobi(Eigen::MatrixXd a) {
  const Eigen::Index m = a.rows();
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd w = Eigen::MatrixXd::Identity(n, n);
  const double tol = std::numeric_limits<double>::epsilon() * std::sqrt(static_cast<double>(std::max<Eigen::Index>(m, 1)));
  constexpr int max_sweeps = 80;

  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (Eigen::Index i = 0; i < m; ++i) {
          const double ap = a(i, p);
          const double aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
        }
        for (Eigen::Index i = 0; i < n; ++i) {
          const double wp = w(i, p);
          const double wq = w(i, q);
          w(i, p) = c * wp - s * wq;
          w(i, q) = s * wp + c * wq;
        }
      }
    }
    if (!rotated) break;
  }

  Eigen::VectorXd s(n);
  for (Eigen::Index j = 0; j < n; ++j) s[j] = a.col(j).norm();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return s[i] > s[j]; });

  JacobiResult out{Eigen::MatrixXd::Zero(m, n), Eigen::VectorXd(n), Eigen::MatrixXd(n, n)};
  const double smax = n ? s[order[0]] : 0.0;
  const double floor = smax * std::numeric_limits<double>::epsilon() * static_cast<double>(std::max(m, n));
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    out.s[k] = s[j];
    out.w.col(k) = w.col(j);
    if (s[j] > floor && s[j] > 0.0) {
      out.u.col(k) = a.col(j) / s[j];
      continue;
    }
    // Numerically null direction: complete U with a unit vector orthogonal
    // to the columns found so far (two Gram-Schmidt passes).
    if (s[j] == 0.0 || smax == 0.0) out.s[k] = 0.0;
    for (Eigen::Index e = 0; e < m; ++e) {
      Eigen::VectorXd v = Eigen::VectorXd::Unit(m, e);
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index c = 0; c < k; ++c) v -= out.u.col(c).dot(v) * out.u.col(c);
      const double norm = v.norm();
      if (norm > 0.5) {
        out.u.col(k) = v / norm;
        break;
      }
    }
  }
  return out;
}

}  // namespace

SvdBundle thin_svd(const Eigen::MatrixXd& x) {
  if (!x.allFinite()) throw ValidationError("SVD input has non-finite entries");
  if (x.size() == 0) throw ValidationError("SVD input is empty");
  const bool tall = x.rows() >= x.cols();
  JacobiResult jr = one_sided_jacobi(tall ? x : Eigen::MatrixXd(x.transpose()));
  // Wide input: X^T = U' S W'^T  =>  X = W' S U'^T.
  Eigen::MatrixXd u = tall ? jr.u : jr.w;
  Eigen::MatrixXd w = tall ? jr.w : jr.u;

  for (Eigen::Index k = 0; k < u.cols(); ++k) {
    Eigen::Index imax = 0;
    u.col(k).cwiseAbs().maxCoeff(&imax);
    if (u(imax, k) < 0.0) {
      u.col(k) *= -1.0;
      w.col(k) *= -1.0;
    }
  }

  SvdBundle out;
  out.basis = std::move(u);
  out.singular_values = jr.s;
  out.latent = out.basis.transpose() * x;
  out.discarded_energy = 0.0;
  return out;
}

SvdBundle truncate(const SvdBundle& bundle, std::size_t r) {
  if (r == 0) throw ValidationError("truncation rank must be at least 1");
  if (r > bundle.rank())
    throw ValidationError("truncation rank " + std::to_string(r) + " exceeds bundle rank " +
                          std::to_string(bundle.rank()));
  const auto rr = static_cast<Eigen::Index>(r);
  SvdBundle out;
  out.basis = bundle.basis.leftCols(rr);
  out.singular_values = bundle.singular_values.head(rr);
  out.latent = bundle.latent.topRows(rr);
  out.discarded_energy = bundle.discarded_energy + bundle.singular_values.tail(bundle.singular_values.size() - rr).squaredNorm();
  return out;
}

Eigen::MatrixXd compress(const Eigen::MatrixXd& x, const SvdBundle& bundle) {
  if (x.rows() != bundle.basis.rows()) throw DimensionMismatch("snapshot rows do not match the SVD basis");
  return bundle.basis.transpose() * x;
}

Eigen::MatrixXd decompress(const Eigen::MatrixXd& latent, const SvdBundle& bundle) {
  if (latent.rows() != bundle.basis.cols()) throw DimensionMismatch("latent rows do not match the SVD rank");
  return bundle.basis * latent;
}

SnapshotMatrix decompress(const Eigen::MatrixXd& latent, const SvdBundle& bundle, const SpatialGrid& grid,
                          const TimeGrid& times, std::string field_name) {
  return SnapshotMatrix(decompress(latent, bundle), grid, times, std::move(field_name));
}

SnapshotMatrix ParametricStack::block(std::size_t p) const {
  const auto [begin, end] = ranges.at(p);
  return SnapshotMatrix(stacked.values.middleCols(static_cast<Eigen::Index>(begin),
                                                  static_cast<Eigen::Index>(end - begin)),
                        stacked.grid, original_times.at(p), stacked.field_name);
}

ParametricStack stack_parametric(const std::vector<SnapshotMatrix>& matrices) {
  if (matrices.empty()) throw ValidationError("nothing to stack");
  const SpatialGrid& grid = matrices.front().grid;
  Eigen::Index total = 0;
  for (const auto& m : matrices) {
    if (!(m.grid == grid)) throw GridMismatch("parametric snapshots live on different spatial grids");
    total += m.cols();
  }
  Eigen::MatrixXd values(static_cast<Eigen::Index>(grid.num_points()), total);
  std::vector<std::pair<std::size_t, std::size_t>> ranges;
  std::vector<TimeGrid> times;
  Eigen::Index col = 0;
  for (const auto& m : matrices) {
    values.middleCols(col, m.cols()) = m.values;
    ranges.emplace_back(static_cast<std::size_t>(col), static_cast<std::size_t>(col + m.cols()));
    times.push_back(m.times);
    col += m.cols();
  }
  const auto n = static_cast<std::size_t>(total);
  TimeGrid index_grid = n == 1 ? TimeGrid::uniform(0.0, 0.0, 1) : TimeGrid::uniform(0.0, static_cast<double>(n - 1), n);
  return ParametricStack{SnapshotMatrix(std::move(values), grid, std::move(index_grid), matrices.front().field_name),
                         std::move(ranges), std::move(times)};
}

std::vector<SnapshotMatrix> unstack(const ParametricStack& stack) {
  std::vector<SnapshotMatrix> out;
  out.reserve(stack.ranges.size());
  for (std::size_t p = 0; p < stack.ranges.size(); ++p) out.push_back(stack.block(p));
  return out;
}

double relative_error(const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x) {
  if (x_hat.rows() != x.rows() || x_hat.cols() != x.cols())
    throw DimensionMismatch("relative_error operands differ in shape");
  const double denom = x.norm();
  const double num = (x_hat - x).norm();
  if (denom == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return num / denom;
}

Eigen::VectorXd relative_error_series(const Eigen::MatrixXd& x_hat, const Eigen::MatrixXd& x) {
  if (x_hat.rows() != x.rows() || x_hat.cols() != x.cols())
    throw DimensionMismatch("relative_error operands differ in shape");
  Eigen::VectorXd out(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) out[j] = relative_error(x_hat.col(j), x.col(j));
  return out;
}

}  // namespace shred
