#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace shred::net {

enum class Gate : int { input = 0, forget = 1, cell = 2, output = 3 };

/// One LSTM layer. Gate blocks are stacked row-wise in the order
/// input, forget, cell, output:
///
///   z = W x_t + U h_{t-1} + b
///   i = sigmoid(z_i), f = sigmoid(z_f), g = tanh(z_g), o = sigmoid(z_o)
///   c_t = f * c_{t-1} + i * g,   h_t = o * tanh(c_t)
struct LstmLayer {
  Eigen::MatrixXd w;  // 4H x in
  Eigen::MatrixXd u;  // 4H x H
  Eigen::VectorXd b;  // 4H

  /// Uniform in +-1/sqrt(in + H).
  static LstmLayer init(Eigen::Index inputs, Eigen::Index hidden, std::mt19937_64& rng);
  static LstmLayer zeros(Eigen::Index inputs, Eigen::Index hidden);

  Eigen::Index hidden() const noexcept { return u.cols(); }
  Eigen::Index inputs() const noexcept { return w.cols(); }

  auto input_weights(Gate g) { return w.middleRows(static_cast<int>(g) * hidden(), hidden()); }
  auto recurrent_weights(Gate g) { return u.middleRows(static_cast<int>(g) * hidden(), hidden()); }
  auto bias(Gate g) { return b.segment(static_cast<int>(g) * hidden(), hidden()); }
};

/// Per-step activations kept for backpropagation through time.
struct LstmCache {
  std::vector<Eigen::MatrixXd> gates;  // activated [i; f; g; o], 4H x B
  std::vector<Eigen::MatrixXd> c;      // cell state, H x B
  std::vector<Eigen::MatrixXd> tc;     // tanh(c)
  std::vector<Eigen::MatrixXd> h;      // hidden state
};

/// Runs the layer over `inputs` (one in x B matrix per step) from a zero
/// initial state.
void lstm_forward(const LstmLayer& layer, const std::vector<Eigen::MatrixXd>& inputs, LstmCache& cache);

/// Backpropagation through time. `dh[t]` is the upstream gradient on h_t
/// (an empty matrix means zero). Gradients are accumulated into `grad`; the
/// return value holds dL/dx_t for every step.
std::vector<Eigen::MatrixXd> lstm_backward(const LstmLayer& layer, const std::vector<Eigen::MatrixXd>& inputs,
                                           const LstmCache& cache, const std::vector<Eigen::MatrixXd>& dh,
                                           LstmLayer& grad);

}  // namespace shred::net
