#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shred/sense.hpp"

namespace shred::net {

/// How known parameters mu enter the dataset.
enum class ParameterRole {
  none,
  input,   // appended as constant channels to every window row
  output,  // appended to the target vector (parameter estimation)
};

struct WindowSample {
  std::size_t trajectory = 0;
  std::size_t time_index = 0;
  bool padded = false;  // window reaches before the first instant

  bool operator==(const WindowSample&) const = default;
};

/// Lagged sensor windows and their latent targets.
///
/// Sample s occupies column s of `inputs`; window step t (oldest first) and
/// feature f live at row t * features + f.
struct WindowDataset {
  std::size_t lag = 0;
  std::size_t features = 0;
  std::size_t outputs = 0;
  Eigen::MatrixXd inputs;
  Eigen::MatrixXd targets;  // outputs x samples
  std::vector<WindowSample> samples;

  std::size_t size() const noexcept { return samples.size(); }
  /// The window of sample s as a lag x features matrix.
  Eigen::MatrixXd window(std::size_t s) const;
  WindowDataset subset(std::span<const std::size_t> indices) const;
};

/// One sample per time index j; windows cover instants j-lag+1 .. j and are
/// front-padded by repeating the first measurement.
WindowDataset build_windows(const MeasurementTrajectory& traj, const Eigen::MatrixXd& latent, std::size_t lag,
                            const std::optional<Eigen::VectorXd>& params = std::nullopt,
                            ParameterRole role = ParameterRole::none, std::size_t trajectory_id = 0);

WindowDataset concat(const std::vector<WindowDataset>& parts);

}  // namespace shred::net
