#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "shred/net/dataset.hpp"
#include "shred/net/model.hpp"

namespace shred::net {

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t max_epochs = 2000;
  std::size_t patience = 50;  // non-improving epochs tolerated before stopping
  double validation_fraction = 0.125;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

struct TrainHistory {
  std::vector<double> train_loss;  // normalized-space MSE per epoch
  std::vector<double> valid_loss;
  std::size_t best_epoch = 0;      // 0-based

  /// `epoch,train_loss,valid_loss` rows with shortest round-trip doubles.
  std::string to_csv() const;
};

struct TrainResult {
  ShredModel model;
  TrainHistory history;
};

/// Adam (beta1 0.9, beta2 0.999, eps 1e-8) on the latent MSE with min-max
/// scaling fitted on `train_set` only. Early stopping on validation MSE
/// restores the best weights. Throws Diverged on a non-finite loss.
TrainResult train(ShredModel model, const WindowDataset& train_set, const WindowDataset& valid_set,
                  const TrainConfig& config);

/// Random split of samples into (train, valid) using config.validation_fraction.
std::pair<WindowDataset, WindowDataset> holdout_split(const WindowDataset& data, const TrainConfig& config);

}  // namespace shred::net
