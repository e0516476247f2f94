#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <utility>
#include <vector>

#include "shred/simulate.hpp"

namespace shred::net {

using SplitRatios = std::array<double, 3>;  // train, valid, test

inline constexpr SplitRatios kParametricRatios{0.75, 0.125, 0.125};
inline constexpr SplitRatios kTemporalRatios{0.75, 0.15, 0.10};

struct ParametricSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
  std::vector<std::size_t> test;
};

/// Whole parameter values are assigned to one split. Valid and test sizes
/// are round(n * ratio); train takes the remainder. Each list is sorted.
ParametricSplit split_parametric(std::size_t num_params, const SplitRatios& ratios, std::uint64_t seed);

/// Half-open index ranges [begin, end).
struct TemporalSplit {
  std::pair<std::size_t, std::size_t> train;
  std::pair<std::size_t, std::size_t> valid;
  std::pair<std::size_t, std::size_t> test;
};

/// Contiguous ranges over the instants of `times`: train ends at
/// floor(r_train * N_t), valid at floor((r_train + r_valid) * N_t).
TemporalSplit split_temporal(const TimeGrid& times, const SplitRatios& ratios = kTemporalRatios);
TemporalSplit split_temporal(std::size_t num_instants, const SplitRatios& ratios = kTemporalRatios);

}  // namespace shred::net
