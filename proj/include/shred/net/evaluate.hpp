#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "shred/net/dataset.hpp"
#include "shred/net/model.hpp"
#include "shred/rom.hpp"

namespace shred::net {

struct EvalMetrics {
  double latent_error = 0.0;      // relative l2 over the first r target rows
  double field_error = 0.0;       // relative_error(decompressed prediction, truth)
  Eigen::MatrixXd latent_prediction;  // r x samples
  Eigen::MatrixXd field_prediction;   // N_h x samples
  Eigen::MatrixXd sensor_truth;       // locations x samples
  Eigen::MatrixXd sensor_prediction;  // locations x samples
};

/// Scores latent predictions against the dataset targets and the ground-truth
/// snapshots (one column per sample). Extra output rows beyond the SVD rank
/// (estimated parameters) are ignored here.
EvalMetrics evaluate_latent(const Eigen::MatrixXd& prediction, const SvdBundle& bundle, const WindowDataset& data,
                            const Eigen::MatrixXd& truth, const std::vector<std::size_t>& sensor_locations = {});

EvalMetrics evaluate(const ShredModel& model, const SvdBundle& bundle, const WindowDataset& data,
                     const Eigen::MatrixXd& truth, const std::vector<std::size_t>& sensor_locations = {});

}  // namespace shred::net
