#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "shred/net/dataset.hpp"
#include "shred/net/model.hpp"
#include "shred/net/train.hpp"
#include "shred/rom.hpp"
#include "shred/sense.hpp"

namespace shred::net {

struct MemberData {
  WindowDataset train;
  WindowDataset valid;
  WindowDataset test;
};

/// Builds the datasets seen by one member from its sensor configuration.
/// Called concurrently when more than one worker is used.
using DatasetBuilder = std::function<MemberData(const std::vector<SensorSpec>& sensors, std::size_t member)>;

struct EnsembleResult {
  std::vector<ShredModel> models;
  std::vector<TrainHistory> histories;
  std::vector<Eigen::MatrixXd> test_latent;  // per member, r x test samples
  Eigen::MatrixXd mean_latent;
  Eigen::MatrixXd mean_field;  // N_h x test samples
  Eigen::MatrixXd std_field;   // population std across members
};

/// splitmix64 of the master seed and member index.
std::uint64_t member_seed(std::uint64_t master, std::size_t member);

/// Trains one model per sensor configuration. Member k uses
/// member_seed(config.seed, k) for both initialization and shuffling, so
/// results do not depend on `workers`.
EnsembleResult ensemble_train(const DatasetBuilder& builder, const std::vector<std::vector<SensorSpec>>& configs,
                              const Architecture& arch, const TrainConfig& config, const SvdBundle& bundle,
                              std::size_t workers = 1);

/// Per-entry mean and population standard deviation of equally shaped fields.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> mean_and_std(const std::vector<Eigen::MatrixXd>& fields);

}  // namespace shred::net
