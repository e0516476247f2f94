#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

namespace shred::net {

struct DenseLayer {
  Eigen::MatrixXd w;  // out x in
  Eigen::VectorXd b;  // out
};

/// Shallow decoder: ReLU on every hidden layer, identity on the output.
struct Decoder {
  std::vector<DenseLayer> layers;

  /// Uniform in +-1/sqrt(fan_in) per layer.
  static Decoder init(Eigen::Index inputs, const std::vector<std::size_t>& hidden, Eigen::Index outputs,
                      std::mt19937_64& rng);
  Decoder zeros_like() const;

  Eigen::Index inputs() const { return layers.front().w.cols(); }
  Eigen::Index outputs() const { return layers.back().w.rows(); }
};

struct DecoderCache {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] is the decoder input
  std::vector<Eigen::MatrixXd> pre;          // pre-activation of every layer
};

Eigen::MatrixXd decoder_forward(const Decoder& dec, const Eigen::MatrixXd& input, DecoderCache* cache = nullptr);

/// Accumulates parameter gradients into `grad` and returns dL/d(input).
Eigen::MatrixXd decoder_backward(const Decoder& dec, const DecoderCache& cache, const Eigen::MatrixXd& dout,
                                 Decoder& grad);

}  // namespace shred::net
