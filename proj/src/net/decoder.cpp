#include "shred/net/decoder.hpp"

#include <cmath>

namespace shred::net {

Decoder Decoder::init(Eigen::Index inputs, const std::vector<std::size_t>& hidden, Eigen::Index outputs,
                      std::mt19937_64& rng) {
  Decoder dec;
  Eigen::Index fan_in = inputs;
  auto add = [&](Eigen::Index out) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    DenseLayer layer{Eigen::MatrixXd(out, fan_in), Eigen::VectorXd(out)};
    for (Eigen::Index j = 0; j < fan_in; ++j)
      for (Eigen::Index i = 0; i < out; ++i) layer.w(i, j) = dist(rng);
    for (Eigen::Index i = 0; i < out; ++i) layer.b[i] = dist(rng);
    dec.layers.push_back(std::move(layer));
    fan_in = out;
  };
  for (auto width : hidden) add(static_cast<Eigen::Index>(width));
  add(outputs);
  return dec;
}

Decoder Decoder::zeros_like() const {
  Decoder dec;
  for (const auto& l : layers)
    dec.layers.push_back({Eigen::MatrixXd::Zero(l.w.rows(), l.w.cols()), Eigen::VectorXd::Zero(l.b.size())});
  return dec;
}

Eigen::MatrixXd decoder_forward(const Decoder& dec, const Eigen::MatrixXd& input, DecoderCache* cache) {
  if (cache) {
    cache->activations.assign(1, input);
    cache->pre.clear();
  }
  Eigen::MatrixXd a = input;
  for (std::size_t k = 0; k < dec.layers.size(); ++k) {
    Eigen::MatrixXd z = dec.layers[k].w * a;
    z.colwise() += dec.layers[k].b;
    const bool last = k + 1 == dec.layers.size();
    a = last ? z : Eigen::MatrixXd(z.cwiseMax(0.0));
    if (cache) {
      cache->pre.push_back(std::move(z));
      cache->activations.push_back(a);
    }
  }
  return a;
}

Eigen::MatrixXd decoder_backward(const Decoder& dec, const DecoderCache& cache, const Eigen::MatrixXd& dout,
                                 Decoder& grad) {
  Eigen::MatrixXd delta = dout;
  for (std::size_t k = dec.layers.size(); k-- > 0;) {
    if (k + 1 != dec.layers.size())
      delta = (delta.array() * (cache.pre[k].array() > 0.0).cast<double>()).matrix();
    grad.layers[k].w.noalias() += delta * cache.activations[k].transpose();
    grad.layers[k].b.noalias() += delta.rowwise().sum();
    delta = dec.layers[k].w.transpose() * delta;
  }
  return delta;
}

}  // namespace shred::net
