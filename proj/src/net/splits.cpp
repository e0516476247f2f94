#include "shred/net/splits.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "shred/errors.hpp"

namespace shred::net {
namespace {

void check_ratios(const SplitRatios& r) {
  for (double v : r)
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("split ratios must lie in [0, 1]");
  if (std::abs(r[0] + r[1] + r[2] - 1.0) > 1e-9) throw ValidationError("split ratios must sum to 1");
  if (r[0] == 0.0) throw ValidationError("train ratio must be positive");
}

}  // namespace

ParametricSplit split_parametric(std::size_t num_params, const SplitRatios& ratios, std::uint64_t seed) {
  check_ratios(ratios);
  const double n = static_cast<double>(num_params);
  const auto n_valid = static_cast<std::size_t>(std::lround(n * ratios[1]));
  const auto n_test = static_cast<std::size_t>(std::lround(n * ratios[2]));
  if ((ratios[1] > 0.0 && n_valid == 0) || (ratios[2] > 0.0 && n_test == 0) || n_valid + n_test >= num_params)
    throw ValidationError("too few parameter values to split");

  std::vector<std::size_t> order(num_params);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  ParametricSplit out;
  const auto vb = order.begin();
  const auto tb = vb + static_cast<std::ptrdiff_t>(n_valid);
  const auto rb = tb + static_cast<std::ptrdiff_t>(n_test);
  out.valid.assign(vb, tb);
  out.test.assign(tb, rb);
  out.train.assign(rb, order.end());
  for (auto* v : {&out.train, &out.valid, &out.test}) std::sort(v->begin(), v->end());
  return out;
}

TemporalSplit split_temporal(std::size_t num_instants, const SplitRatios& ratios) {
  check_ratios(ratios);
  const double n = static_cast<double>(num_instants);
  // The small offset keeps exact products such as 0.9 * 10 from flooring to 8.
  const auto b1 = static_cast<std::size_t>(std::floor(ratios[0] * n + 1e-9));
  const auto b2 = std::min(num_instants, static_cast<std::size_t>(std::floor((ratios[0] + ratios[1]) * n + 1e-9)));
  if (b1 == 0) throw ValidationError("temporal split leaves the training range empty");
  return TemporalSplit{{0, b1}, {b1, b2}, {b2, num_instants}};
}

TemporalSplit split_temporal(const TimeGrid& times, const SplitRatios& ratios) {
  return split_temporal(times.size(), ratios);
}

}  // namespace shred::net
