#include "shred/net/dataset.hpp"

#include <algorithm>

#include "shred/errors.hpp"

namespace shred::net {

Eigen::MatrixXd WindowDataset::window(std::size_t s) const {
  Eigen::MatrixXd w(static_cast<Eigen::Index>(lag), static_cast<Eigen::Index>(features));
  for (std::size_t t = 0; t < lag; ++t)
    for (std::size_t f = 0; f < features; ++f)
      w(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(f)) =
          inputs(static_cast<Eigen::Index>(t * features + f), static_cast<Eigen::Index>(s));
  return w;
}

WindowDataset WindowDataset::subset(std::span<const std::size_t> indices) const {
  WindowDataset out{lag, features, outputs, Eigen::MatrixXd(inputs.rows(), static_cast<Eigen::Index>(indices.size())),
                    Eigen::MatrixXd(targets.rows(), static_cast<Eigen::Index>(indices.size())), {}};
  out.samples.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const auto s = static_cast<Eigen::Index>(indices[k]);
    if (indices[k] >= size()) throw IndexOutOfRange("dataset subset index out of range");
    out.inputs.col(static_cast<Eigen::Index>(k)) = inputs.col(s);
    out.targets.col(static_cast<Eigen::Index>(k)) = targets.col(s);
    out.samples.push_back(samples[indices[k]]);
  }
  return out;
}

WindowDataset build_windows(const MeasurementTrajectory& traj, const Eigen::MatrixXd& latent, std::size_t lag,
                            const std::optional<Eigen::VectorXd>& params, ParameterRole role,
                            std::size_t trajectory_id) {
  const auto nt = static_cast<std::size_t>(traj.values.cols());
  if (latent.cols() != traj.values.cols())
    throw GridMismatch("trajectory has " + std::to_string(nt) + " instants, latent has " +
                       std::to_string(latent.cols()));
  if (lag == 0) throw ValidationError("lag window must be at least 1");
  if (lag > nt) throw ValidationError("lag window longer than the trajectory");
  if (role != ParameterRole::none && !params) throw ValidationError("parameter role set without parameters");

  const auto channels = static_cast<std::size_t>(traj.values.rows());
  const std::size_t extra_in = role == ParameterRole::input ? static_cast<std::size_t>(params->size()) : 0;
  const std::size_t extra_out = role == ParameterRole::output ? static_cast<std::size_t>(params->size()) : 0;

  WindowDataset ds;
  ds.lag = lag;
  ds.features = channels + extra_in;
  ds.outputs = static_cast<std::size_t>(latent.rows()) + extra_out;
  ds.inputs.resize(static_cast<Eigen::Index>(lag * ds.features), static_cast<Eigen::Index>(nt));
  ds.targets.resize(static_cast<Eigen::Index>(ds.outputs), static_cast<Eigen::Index>(nt));
  ds.samples.reserve(nt);

  for (std::size_t j = 0; j < nt; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    for (std::size_t t = 0; t < lag; ++t) {
      // Window step t observes instant j - (lag - 1) + t, clamped at 0.
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(j + t) - static_cast<std::ptrdiff_t>(lag - 1);
      const auto k = static_cast<Eigen::Index>(std::max<std::ptrdiff_t>(src, 0));
      const auto row = static_cast<Eigen::Index>(t * ds.features);
      ds.inputs.block(row, col, static_cast<Eigen::Index>(channels), 1) = traj.values.col(k);
      if (extra_in) ds.inputs.block(row + static_cast<Eigen::Index>(channels), col, params->size(), 1) = *params;
    }
    ds.targets.block(0, col, latent.rows(), 1) = latent.col(col);
    if (extra_out) ds.targets.block(latent.rows(), col, params->size(), 1) = *params;
    ds.samples.push_back(WindowSample{trajectory_id, j, j + 1 < lag});
  }
  return ds;
}

WindowDataset concat(const std::vector<WindowDataset>& parts) {
  if (parts.empty()) throw ValidationError("nothing to concatenate");
  const auto& head = parts.front();
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (p.lag != head.lag || p.features != head.features || p.outputs != head.outputs)
      throw DimensionMismatch("datasets differ in window shape");
    total += static_cast<Eigen::Index>(p.size());
  }
  WindowDataset out{head.lag, head.features, head.outputs, Eigen::MatrixXd(head.inputs.rows(), total),
                    Eigen::MatrixXd(head.targets.rows(), total), {}};
  Eigen::Index col = 0;
  for (const auto& p : parts) {
    const auto n = static_cast<Eigen::Index>(p.size());
    out.inputs.middleCols(col, n) = p.inputs;
    out.targets.middleCols(col, n) = p.targets;
    out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
    col += n;
  }
  return out;
}

}  // namespace shred::net
