#include "shred/net/evaluate.hpp"

#include "shred/errors.hpp"

namespace shred::net {

EvalMetrics evaluate_latent(const Eigen::MatrixXd& prediction, const SvdBundle& bundle, const WindowDataset& data,
                            const Eigen::MatrixXd& truth, const std::vector<std::size_t>& sensor_locations) {
  const auto r = static_cast<Eigen::Index>(bundle.rank());
  if (prediction.rows() < r || data.targets.rows() < r)
    throw DimensionMismatch("predictions have fewer rows than the SVD rank");
  if (prediction.cols() != data.targets.cols() || truth.cols() != prediction.cols())
    throw DimensionMismatch("prediction, target, and truth sample counts differ");
  if (truth.rows() != bundle.basis.rows()) throw DimensionMismatch("truth rows do not match the SVD basis");

  EvalMetrics m;
  m.latent_prediction = prediction.topRows(r);
  m.latent_error = relative_error(m.latent_prediction, data.targets.topRows(r));
  m.field_prediction = decompress(m.latent_prediction, bundle);
  m.field_error = relative_error(m.field_prediction, truth);

  const auto ns = static_cast<Eigen::Index>(sensor_locations.size());
  m.sensor_truth.resize(ns, truth.cols());
  m.sensor_prediction.resize(ns, truth.cols());
  for (Eigen::Index s = 0; s < ns; ++s) {
    const auto loc = static_cast<Eigen::Index>(sensor_locations[static_cast<std::size_t>(s)]);
    if (loc >= truth.rows()) throw IndexOutOfRange("sensor location outside the grid");
    m.sensor_truth.row(s) = truth.row(loc);
    m.sensor_prediction.row(s) = m.field_prediction.row(loc);
  }
  return m;
}

EvalMetrics evaluate(const ShredModel& model, const SvdBundle& bundle, const WindowDataset& data,
                     const Eigen::MatrixXd& truth, const std::vector<std::size_t>& sensor_locations) {
  return evaluate_latent(model.predict(data), bundle, data, truth, sensor_locations);
}

}  // namespace shred::net
