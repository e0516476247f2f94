#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "shred/net/dataset.hpp"
#include "shred/net/decoder.hpp"
#include "shred/net/lstm.hpp"

namespace shred::net {

struct Architecture {
  std::size_t inputs = 3;   // sensor channels (+ known parameters)
  std::size_t outputs = 10; // latent rank (+ estimated parameters)
  std::vector<std::size_t> lstm_hidden{64, 64};
  std::vector<std::size_t> decoder_hidden{350, 400};
  std::size_t lag = 50;

  bool operator==(const Architecture&) const = default;
};

/// Every trainable tensor of the network. Also used for gradients and Adam
/// moments.
struct NetworkParams {
  std::vector<LstmLayer> lstm;
  Decoder decoder;

  NetworkParams zeros_like() const;
  /// Flat views over every tensor, in checkpoint order: for each LSTM layer
  /// W, U, b; then for each dense layer W, b (column-major).
  std::vector<Eigen::Map<Eigen::VectorXd>> blocks();
  std::vector<Eigen::Map<const Eigen::VectorXd>> blocks() const;
  std::size_t count() const;
};

/// Per-feature min-max scaling to [0, 1]. Degenerate ranges are widened to 1
/// so the map stays invertible.
struct MinMaxScaler {
  Eigen::VectorXd min;
  Eigen::VectorXd span;

  static MinMaxScaler identity(Eigen::Index features);
  /// Columns of `data` are observations.
  static MinMaxScaler fit(const Eigen::MatrixXd& data);

  Eigen::MatrixXd transform(const Eigen::MatrixXd& data) const;
  Eigen::MatrixXd inverse(const Eigen::MatrixXd& data) const;
  /// Applies the feature scaling to stacked window columns (row t*F + f).
  Eigen::MatrixXd transform_windows(const Eigen::MatrixXd& windows) const;

  bool operator==(const MinMaxScaler&) const = default;
};

/// LSTM stack + shallow decoder + normalization constants.
class ShredModel {
 public:
  ShredModel(Architecture arch, std::uint64_t seed);
  ShredModel(Architecture arch, NetworkParams params, MinMaxScaler input_scaler, MinMaxScaler output_scaler,
             std::uint64_t seed);

  const Architecture& architecture() const noexcept { return arch_; }
  NetworkParams& params() noexcept { return params_; }
  const NetworkParams& params() const noexcept { return params_; }
  const MinMaxScaler& input_scaler() const noexcept { return input_scaler_; }
  const MinMaxScaler& output_scaler() const noexcept { return output_scaler_; }
  void set_scalers(MinMaxScaler input, MinMaxScaler output);
  std::uint64_t seed() const noexcept { return seed_; }

  /// Network output in normalized space. `steps[t]` is features x batch,
  /// oldest step first; the last layer's final hidden state feeds the decoder.
  Eigen::MatrixXd forward(const std::vector<Eigen::MatrixXd>& steps) const;

  /// scale * mean squared error over every entry of `targets`, with exact
  /// reverse-mode gradients accumulated into `grad` when non-null.
  double loss_and_gradient(const std::vector<Eigen::MatrixXd>& steps, const Eigen::MatrixXd& targets,
                           NetworkParams* grad, double scale = 1.0) const;

  /// Denormalized predictions for every sample (outputs x samples).
  Eigen::MatrixXd predict(const WindowDataset& data, std::size_t batch_size = 256) const;

 private:
  Architecture arch_;
  NetworkParams params_;
  MinMaxScaler input_scaler_;
  MinMaxScaler output_scaler_;
  std::uint64_t seed_ = 0;
};

/// Splits stacked window columns into per-step feature x batch matrices.
std::vector<Eigen::MatrixXd> to_steps(const Eigen::MatrixXd& windows, std::size_t lag, std::size_t features);

}  // namespace shred::net
