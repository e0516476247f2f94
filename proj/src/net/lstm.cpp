#include "shred/net/lstm.hpp"

#include <cmath>

namespace shred::net {

namespace {

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  return m;
}

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& z) { return 1.0 / (1.0 + (-z).exp()); }

}  // namespace

LstmLayer LstmLayer::init(Eigen::Index inputs, Eigen::Index hidden, std::mt19937_64& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(inputs + hidden));
  LstmLayer layer;
  layer.w = uniform_matrix(4 * hidden, inputs, bound, rng);
  layer.u = uniform_matrix(4 * hidden, hidden, bound, rng);
  layer.b = uniform_matrix(4 * hidden, 1, bound, rng);
  return layer;
}

LstmLayer LstmLayer::zeros(Eigen::Index inputs, Eigen::Index hidden) {
  return LstmLayer{Eigen::MatrixXd::Zero(4 * hidden, inputs), Eigen::MatrixXd::Zero(4 * hidden, hidden),
                   Eigen::VectorXd::Zero(4 * hidden)};
}

void lstm_forward(const LstmLayer& layer, const std::vector<Eigen::MatrixXd>& inputs, LstmCache& cache) {
  const Eigen::Index hd = layer.hidden();
  const std::size_t steps = inputs.size();
  const Eigen::Index batch = steps ? inputs.front().cols() : 0;
  cache.gates.resize(steps);
  cache.c.resize(steps);
  cache.tc.resize(steps);
  cache.h.resize(steps);

  Eigen::MatrixXd z(4 * hd, batch);
  for (std::size_t t = 0; t < steps; ++t) {
    z.noalias() = layer.w * inputs[t];
    if (t > 0) z.noalias() += layer.u * cache.h[t - 1];
    z.colwise() += layer.b;

    Eigen::MatrixXd& g = cache.gates[t];
    g.resize(4 * hd, batch);
    g.topRows(2 * hd) = sigmoid(z.topRows(2 * hd).array()).matrix();
    g.middleRows(2 * hd, hd) = z.middleRows(2 * hd, hd).array().tanh().matrix();
    g.bottomRows(hd) = sigmoid(z.bottomRows(hd).array()).matrix();

    const auto i = g.topRows(hd).array();
    const auto f = g.middleRows(hd, hd).array();
    const auto gg = g.middleRows(2 * hd, hd).array();
    const auto o = g.bottomRows(hd).array();
    if (t > 0)
      cache.c[t] = (f * cache.c[t - 1].array() + i * gg).matrix();
    else
      cache.c[t] = (i * gg).matrix();
    cache.tc[t] = cache.c[t].array().tanh().matrix();
    cache.h[t] = (o * cache.tc[t].array()).matrix();
  }
}

std::vector<Eigen::MatrixXd> lstm_backward(const LstmLayer& layer, const std::vector<Eigen::MatrixXd>& inputs,
                                           const LstmCache& cache, const std::vector<Eigen::MatrixXd>& dh_up,
                                           LstmLayer& grad) {
  const Eigen::Index hd = layer.hidden();
  const std::size_t steps = inputs.size();
  const Eigen::Index batch = steps ? inputs.front().cols() : 0;
  std::vector<Eigen::MatrixXd> dx(steps);

  Eigen::MatrixXd dh_rec = Eigen::MatrixXd::Zero(hd, batch);
  Eigen::MatrixXd dc_next = Eigen::MatrixXd::Zero(hd, batch);
  Eigen::MatrixXd dz(4 * hd, batch);

  for (std::size_t s = steps; s-- > 0;) {
    Eigen::MatrixXd dh = dh_rec;
    if (s < dh_up.size() && dh_up[s].size() > 0) dh += dh_up[s];

    const Eigen::MatrixXd& g = cache.gates[s];
    const auto i = g.topRows(hd).array();
    const auto f = g.middleRows(hd, hd).array();
    const auto gg = g.middleRows(2 * hd, hd).array();
    const auto o = g.bottomRows(hd).array();
    const auto tc = cache.tc[s].array();

    const Eigen::ArrayXXd dc = dc_next.array() + dh.array() * o * (1.0 - tc * tc);
    dz.bottomRows(hd) = (dh.array() * tc * o * (1.0 - o)).matrix();
    dz.topRows(hd) = (dc * gg * i * (1.0 - i)).matrix();
    dz.middleRows(2 * hd, hd) = (dc * i * (1.0 - gg * gg)).matrix();
    if (s > 0) {
      dz.middleRows(hd, hd) = (dc * cache.c[s - 1].array() * f * (1.0 - f)).matrix();
    } else {
      dz.middleRows(hd, hd).setZero();
    }
    dc_next = (dc * f).matrix();

    grad.w.noalias() += dz * inputs[s].transpose();
    if (s > 0) grad.u.noalias() += dz * cache.h[s - 1].transpose();
    grad.b.noalias() += dz.rowwise().sum();

    dx[s].noalias() = layer.w.transpose() * dz;
    dh_rec.noalias() = layer.u.transpose() * dz;
  }
  return dx;
}

}  // namespace shred::net
