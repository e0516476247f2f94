#include "shred/net/train.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>

#include "shred/errors.hpp"

namespace shred::net {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ValidationError("learning rate must be positive");
  if (batch_size == 0) throw ValidationError("batch size must be positive");
  if (max_epochs == 0) throw ValidationError("max epochs must be positive");
  if (patience >= max_epochs) throw ValidationError("patience must be smaller than max epochs");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0))
    throw ValidationError("validation fraction must lie in (0, 1)");
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

struct Adam {
  NetworkParams m;
  NetworkParams v;
  std::size_t step = 0;
  double lr;
  static constexpr double beta1 = 0.9;
  static constexpr double beta2 = 0.999;
  static constexpr double eps = 1e-8;

  Adam(const NetworkParams& like, double learning_rate)
      : m(like.zeros_like()), v(like.zeros_like()), lr(learning_rate) {}

  void update(NetworkParams& params, const NetworkParams& grad) {
    ++step;
    const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
    const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
    auto p = params.blocks();
    auto g = grad.blocks();
    auto mb = m.blocks();
    auto vb = v.blocks();
    for (std::size_t k = 0; k < p.size(); ++k) {
      mb[k] = beta1 * mb[k] + (1.0 - beta1) * g[k];
      vb[k] = beta2 * vb[k] + (1.0 - beta2) * g[k].cwiseAbs2();
      p[k].array() -= lr * (mb[k].array() / c1) / ((vb[k].array() / c2).sqrt() + eps);
    }
  }
};

double dataset_loss(const ShredModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets,
                    std::size_t lag, std::size_t features, std::size_t batch) {
  const Eigen::Index n = inputs.cols();
  if (n == 0) return 0.0;
  double sum = 0.0;
  const auto bs = static_cast<Eigen::Index>(batch);
  for (Eigen::Index start = 0; start < n; start += bs) {
    const Eigen::Index len = std::min(bs, n - start);
    const Eigen::MatrixXd out = model.forward(to_steps(inputs.middleCols(start, len), lag, features));
    sum += (out - targets.middleCols(start, len)).squaredNorm();
  }
  return sum / static_cast<double>(n * targets.rows());
}

}  // namespace

std::string TrainHistory::to_csv() const {
  std::string out = "epoch,train_loss,valid_loss\n";
  for (std::size_t e = 0; e < train_loss.size(); ++e)
    out += std::to_string(e) + "," + format_double(train_loss[e]) + "," + format_double(valid_loss[e]) + "\n";
  return out;
}

TrainResult train(ShredModel model, const WindowDataset& train_set, const WindowDataset& valid_set,
                  const TrainConfig& config) {
  config.validate();
  const auto& arch = model.architecture();
  if (train_set.size() == 0 || valid_set.size() == 0) throw ValidationError("train and valid sets must be non-empty");
  for (const auto* ds : {&train_set, &valid_set})
    if (ds->features != arch.inputs || ds->outputs != arch.outputs || ds->lag != arch.lag)
      throw DimensionMismatch("dataset shape does not match the model architecture");

  // Scaling is fitted on the training split only.
  const Eigen::Index f = static_cast<Eigen::Index>(arch.inputs);
  Eigen::MatrixXd observations(f, train_set.inputs.cols() * static_cast<Eigen::Index>(arch.lag));
  for (Eigen::Index t = 0; t < static_cast<Eigen::Index>(arch.lag); ++t)
    observations.middleCols(t * train_set.inputs.cols(), train_set.inputs.cols()) =
        train_set.inputs.middleRows(t * f, f);
  model.set_scalers(MinMaxScaler::fit(observations), MinMaxScaler::fit(train_set.targets));

  const Eigen::MatrixXd x_train = model.input_scaler().transform_windows(train_set.inputs);
  const Eigen::MatrixXd y_train = model.output_scaler().transform(train_set.targets);
  const Eigen::MatrixXd x_valid = model.input_scaler().transform_windows(valid_set.inputs);
  const Eigen::MatrixXd y_valid = model.output_scaler().transform(valid_set.targets);

  std::mt19937_64 rng(config.seed);
  Adam adam(model.params(), config.learning_rate);
  NetworkParams grad = model.params().zeros_like();
  NetworkParams best = model.params();
  double best_valid = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  TrainHistory history;

  const auto n = static_cast<std::size_t>(x_train.cols());
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Eigen::MatrixXd xb, yb;

  for (std::size_t epoch = 0; epoch < config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < n; start += config.batch_size) {
      const std::size_t len = std::min(config.batch_size, n - start);
      xb.resize(x_train.rows(), static_cast<Eigen::Index>(len));
      yb.resize(y_train.rows(), static_cast<Eigen::Index>(len));
      for (std::size_t k = 0; k < len; ++k) {
        xb.col(static_cast<Eigen::Index>(k)) = x_train.col(static_cast<Eigen::Index>(order[start + k]));
        yb.col(static_cast<Eigen::Index>(k)) = y_train.col(static_cast<Eigen::Index>(order[start + k]));
      }
      for (auto& b : grad.blocks()) b.setZero();
      const double loss = model.loss_and_gradient(to_steps(xb, arch.lag, arch.inputs), yb, &grad);
      if (!std::isfinite(loss)) throw Diverged("training loss became non-finite at epoch " + std::to_string(epoch));
      epoch_loss += loss * static_cast<double>(len);
      adam.update(model.params(), grad);
    }
    const double valid = dataset_loss(model, x_valid, y_valid, arch.lag, arch.inputs, 256);
    if (!std::isfinite(valid)) throw Diverged("validation loss became non-finite at epoch " + std::to_string(epoch));
    history.train_loss.push_back(epoch_loss / static_cast<double>(n));
    history.valid_loss.push_back(valid);

    if (valid < best_valid) {
      best_valid = valid;
      best = model.params();
      history.best_epoch = epoch;
      stale = 0;
    } else if (++stale > config.patience) {
      break;
    }
  }
  model.params() = std::move(best);
  return TrainResult{std::move(model), std::move(history)};
}

std::pair<WindowDataset, WindowDataset> holdout_split(const WindowDataset& data, const TrainConfig& config) {
  config.validate();
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(config.seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto n_valid = static_cast<std::size_t>(
      std::max<long>(1, std::lround(config.validation_fraction * static_cast<double>(data.size()))));
  if (n_valid >= data.size()) throw ValidationError("dataset too small for a holdout split");
  std::vector<std::size_t> valid(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_valid));
  std::vector<std::size_t> tr(order.begin() + static_cast<std::ptrdiff_t>(n_valid), order.end());
  std::sort(valid.begin(), valid.end());
  std::sort(tr.begin(), tr.end());
  return {data.subset(tr), data.subset(valid)};
}

}  // namespace shred::net
