#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shred/net/model.hpp"

namespace shred::testing {

struct GradCheck {
  double worst = 0.0;        // max |a - n| / max(|a|, |n|, 1e-4)
  std::size_t checked = 0;
};

/// Central differences over every parameter of `model` against the analytic
/// gradient of loss_and_gradient.
inline GradCheck gradient_check(net::ShredModel model, const std::vector<Eigen::MatrixXd>& steps,
                                const Eigen::MatrixXd& targets, double h = 1e-5) {
  net::NetworkParams grad = model.params().zeros_like();
  model.loss_and_gradient(steps, targets, &grad);
  GradCheck out;
  auto pblocks = model.params().blocks();
  const auto gblocks = std::as_const(grad).blocks();
  for (std::size_t b = 0; b < pblocks.size(); ++b) {
    for (Eigen::Index i = 0; i < pblocks[b].size(); ++i) {
      const double saved = pblocks[b][i];
      pblocks[b][i] = saved + h;
      const double up = model.loss_and_gradient(steps, targets, nullptr);
      pblocks[b][i] = saved - h;
      const double down = model.loss_and_gradient(steps, targets, nullptr);
      pblocks[b][i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = gblocks[b][i];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
      out.worst = std::max(out.worst, std::abs(analytic - numeric) / denom);
      ++out.checked;
    }
  }
  return out;
}

/// Random steps (features x batch per step) and targets in [-1, 1].
inline std::pair<std::vector<Eigen::MatrixXd>, Eigen::MatrixXd> random_batch(const net::Architecture& arch,
                                                                            Eigen::Index batch,
                                                                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto fill = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
    return m;
  };
  std::vector<Eigen::MatrixXd> steps;
  for (std::size_t t = 0; t < arch.lag; ++t) steps.push_back(fill(static_cast<Eigen::Index>(arch.inputs), batch));
  return {std::move(steps), fill(static_cast<Eigen::Index>(arch.outputs), batch)};
}

}  // namespace shred::testing
