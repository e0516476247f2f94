#include <algorithm>
#include <numeric>
#include <cmath>
#include <random>

#include "doctest.h"
#include "shred/errors.hpp"
#include "shred/net/ensemble.hpp"
#include "shred/net/evaluate.hpp"
#include "shred/net/splits.hpp"
#include "shred/net/train.hpp"
#include "support/gradcheck.hpp"

using namespace shred;
using namespace shred::net;

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

MeasurementTrajectory trajectory(const Eigen::MatrixXd& values) {
  const auto nt = static_cast<std::size_t>(values.cols());
  return MeasurementTrajectory{values, {SensorSpec::stationary({0})}, TimeGrid::uniform(0.0, 1.0, nt), 0.0};
}

// Target equals the sensor reading at the window's last instant.
WindowDataset identity_dataset(std::size_t n, std::size_t lag, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  Eigen::MatrixXd v(1, static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < v.cols(); ++j) v(0, j) = u(rng);
  return build_windows(trajectory(v), v, lag);
}

double normalized_mse(const ShredModel& m, const WindowDataset& d) {
  const Eigen::MatrixXd diff = m.output_scaler().transform(m.predict(d)) - m.output_scaler().transform(d.targets);
  return diff.squaredNorm() / static_cast<double>(diff.size());
}

Architecture small_arch(std::size_t in, std::size_t out, std::size_t lag) {
  return Architecture{in, out, {8}, {16}, lag};
}

}  // namespace

TEST_SUITE("shrednet") {

TEST_CASE("one-unit LSTM step matches the gate equations") {
  LstmLayer layer = LstmLayer::zeros(1, 1);
  layer.w.setOnes();
  layer.u.setOnes();
  LstmCache cache;
  lstm_forward(layer, {Eigen::MatrixXd::Ones(1, 1)}, cache);
  const double c = sigmoid(1.0) * std::tanh(1.0);
  CHECK(c == doctest::Approx(0.556770).epsilon(1e-6));
  CHECK(cache.c[0](0, 0) == doctest::Approx(c).epsilon(1e-14));
  CHECK(cache.h[0](0, 0) == doctest::Approx(sigmoid(1.0) * std::tanh(c)).epsilon(1e-14));
  CHECK(cache.h[0](0, 0) == doctest::Approx(0.369606).epsilon(1e-5));
}

TEST_CASE("zero weights give the output bias") {
  ShredModel m(Architecture{2, 3, {4, 4}, {5}, 3}, 1);
  for (auto& b : m.params().blocks()) b.setZero();
  m.params().decoder.layers.back().b << 0.25, -1.0, 2.0;
  const Eigen::MatrixXd out = m.forward(std::vector<Eigen::MatrixXd>(3, Eigen::MatrixXd::Random(2, 4)));
  for (Eigen::Index j = 0; j < 4; ++j) CHECK(out.col(j) == m.params().decoder.layers.back().b);
}

TEST_CASE("identical windows give identical outputs") {
  const ShredModel m(Architecture{2, 3, {4}, {5}, 3}, 2);
  std::vector<Eigen::MatrixXd> steps(3, Eigen::MatrixXd(2, 2));
  for (auto& s : steps) s << 0.1, 0.1, -0.4, -0.4;
  const Eigen::MatrixXd out = m.forward(steps);
  CHECK(out.col(0) == out.col(1));
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 rng(5);
  for (const Architecture& arch : {Architecture{2, 3, {4}, {6}, 3}, Architecture{1, 2, {3, 4}, {5, 3}, 4}}) {
    const ShredModel m(arch, 9);
    const auto [steps, targets] = testing::random_batch(arch, 3, rng);
    const auto g = testing::gradient_check(m, steps, targets);
    CHECK(g.checked == m.params().count());
    CHECK(g.worst < 1e-5);
  }
}

TEST_CASE("gradient vanishes at zero loss and scales with the loss") {
  const Architecture arch{2, 2, {3}, {4}, 2};
  const ShredModel m(arch, 3);
  std::mt19937_64 rng(1);
  auto [steps, targets] = testing::random_batch(arch, 4, rng);
  NetworkParams g0 = m.params().zeros_like();
  CHECK(m.loss_and_gradient(steps, m.forward(steps), &g0) == 0.0);
  for (const auto& b : std::as_const(g0).blocks()) CHECK(b.isZero());

  NetworkParams g1 = m.params().zeros_like(), g2 = m.params().zeros_like();
  const double l1 = m.loss_and_gradient(steps, targets, &g1);
  const double l2 = m.loss_and_gradient(steps, targets, &g2, 3.0);
  CHECK(l2 == doctest::Approx(3.0 * l1));
  const auto b1 = std::as_const(g1).blocks();
  const auto b2 = std::as_const(g2).blocks();
  for (std::size_t k = 0; k < b1.size(); ++k) CHECK((b2[k] - 3.0 * b1[k]).norm() <= 1e-12 * (1.0 + b2[k].norm()));
}

TEST_CASE("windows") {
  Eigen::MatrixXd v(2, 5);
  v << 1, 2, 3, 4, 5, 10, 20, 30, 40, 50;
  MeasurementTrajectory tr = trajectory(v);
  tr.sensors = {SensorSpec::stationary({0, 1})};
  const Eigen::MatrixXd latent = 2.0 * v.topRows(1);
  const WindowDataset d = build_windows(tr, latent, 3);
  CHECK(d.size() == 5);
  CHECK(d.features == 2);
  CHECK(d.samples[1].padded);
  CHECK_FALSE(d.samples[2].padded);
  Eigen::MatrixXd w0(3, 2);
  w0 << 1, 10, 1, 10, 1, 10;
  CHECK(d.window(0) == w0);
  Eigen::MatrixXd w4(3, 2);
  w4 << 3, 30, 4, 40, 5, 50;
  CHECK(d.window(4) == w4);
  CHECK(d.targets(0, 4) == 10.0);

  const WindowDataset one = build_windows(tr, latent, 1);
  CHECK(one.window(3) == v.col(3).transpose());

  const WindowDataset with_mu = build_windows(tr, latent, 2, Eigen::VectorXd::Constant(1, 0.7), ParameterRole::input);
  CHECK(with_mu.features == 3);
  CHECK(with_mu.window(2)(1, 2) == 0.7);
  const WindowDataset est = build_windows(tr, latent, 2, Eigen::VectorXd::Constant(1, 0.7), ParameterRole::output);
  CHECK(est.outputs == 2);
  CHECK(est.targets(1, 0) == 0.7);

  CHECK_THROWS_AS(build_windows(tr, latent.leftCols(4), 2), GridMismatch);
  CHECK_THROWS_AS(build_windows(tr, latent, 0), ValidationError);
  CHECK_THROWS_AS(build_windows(tr, latent, 6), ValidationError);

  const WindowDataset both = concat({d, d});
  CHECK(both.size() == 10);
  const std::vector<std::size_t> pick{4, 0};
  CHECK(d.subset(pick).window(0) == w4);
}

TEST_CASE("min-max scaler round trip") {
  Eigen::MatrixXd x(2, 4);
  x << -3, 1, 7, 2, 5, 5, 5, 5;
  const MinMaxScaler s = MinMaxScaler::fit(x);
  const Eigen::MatrixXd y = s.transform(x);
  CHECK(y.row(0).minCoeff() == 0.0);
  CHECK(y.row(0).maxCoeff() == 1.0);
  CHECK((s.inverse(y) - x).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(y.row(1).allFinite());
}

TEST_CASE("training fits an identity map") {
  const WindowDataset tr = identity_dataset(160, 2, 1), va = identity_dataset(40, 2, 2);
  TrainConfig cfg;
  cfg.learning_rate = 5e-3;
  cfg.batch_size = 16;
  cfg.max_epochs = 500;
  cfg.patience = 100;
  cfg.seed = 4;
  const TrainResult r = train(ShredModel(small_arch(1, 1, 2), 4), tr, va, cfg);
  const double best = r.history.valid_loss[r.history.best_epoch];
  CHECK(best < 1e-4);
  CHECK(normalized_mse(r.model, va) == doctest::Approx(best).epsilon(1e-9));
  for (double v : r.history.valid_loss) CHECK(v >= best);

  const TrainResult again = train(ShredModel(small_arch(1, 1, 2), 4), tr, va, cfg);
  CHECK(again.history.to_csv() == r.history.to_csv());
}

TEST_CASE("early stopping with zero patience") {
  const WindowDataset tr = identity_dataset(40, 2, 3), va = identity_dataset(10, 2, 4);
  TrainConfig cfg;
  cfg.max_epochs = 200;
  cfg.patience = 0;
  cfg.learning_rate = 0.05;
  const TrainResult r = train(ShredModel(small_arch(1, 1, 2), 1), tr, va, cfg);
  const auto& h = r.history;
  if (h.valid_loss.size() < cfg.max_epochs) {
    CHECK(h.best_epoch + 2 == h.valid_loss.size());
    CHECK(h.valid_loss.back() >= h.valid_loss[h.best_epoch]);
  }
}

TEST_CASE("training errors") {
  const WindowDataset tr = identity_dataset(20, 2, 3), va = identity_dataset(5, 2, 4);
  TrainConfig cfg;
  cfg.max_epochs = 20;
  cfg.patience = 5;
  cfg.learning_rate = 1e300;
  CHECK_THROWS_AS(train(ShredModel(small_arch(1, 1, 2), 1), tr, va, cfg), Diverged);
  cfg.learning_rate = 1e-3;
  CHECK_THROWS_AS(train(ShredModel(small_arch(1, 1, 3), 1), tr, va, cfg), DimensionMismatch);
  cfg.patience = 20;
  CHECK_THROWS_AS(cfg.validate(), ValidationError);
}

TEST_CASE("holdout split") {
  const WindowDataset d = identity_dataset(16, 1, 1);
  TrainConfig cfg;
  const auto [tr, va] = holdout_split(d, cfg);
  CHECK(va.size() == 2);
  CHECK(tr.size() == 14);
}

TEST_CASE("parametric and temporal splits") {
  auto p = split_parametric(16, kParametricRatios, 7);
  CHECK(p.train.size() == 12);
  CHECK(p.valid.size() == 2);
  CHECK(p.test.size() == 2);
  std::vector<std::size_t> all = p.train;
  all.insert(all.end(), p.valid.begin(), p.valid.end());
  all.insert(all.end(), p.test.begin(), p.test.end());
  std::sort(all.begin(), all.end());
  for (std::size_t k = 0; k < 16; ++k) CHECK(all[k] == k);
  CHECK(std::is_sorted(p.train.begin(), p.train.end()));

  p = split_parametric(8, kParametricRatios, 7);
  CHECK(p.train.size() == 6);
  CHECK(p.valid.size() == 1);
  CHECK(p.test.size() == 1);

  const TemporalSplit t = split_temporal(8551);
  CHECK(t.train == std::pair<std::size_t, std::size_t>{0, 6413});
  CHECK(t.valid == std::pair<std::size_t, std::size_t>{6413, 7695});
  CHECK(t.test == std::pair<std::size_t, std::size_t>{7695, 8551});
  const TemporalSplit s = split_temporal(10, SplitRatios{0.7, 0.2, 0.1});
  CHECK(s.valid == std::pair<std::size_t, std::size_t>{7, 9});

  CHECK_THROWS_AS(split_temporal(10, SplitRatios{0.7, 0.2, 0.2}), ValidationError);
  CHECK_THROWS_AS(split_parametric(10, SplitRatios{-0.1, 0.6, 0.5}, 1), ValidationError);
  CHECK_THROWS_AS(split_parametric(2, kParametricRatios, 1), ValidationError);
}

TEST_CASE("evaluation metrics") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  Eigen::MatrixXd x(12, 8);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = n(rng);
  const SvdBundle full = thin_svd(x);
  const SvdBundle b = truncate(full, 3);
  const WindowDataset d = build_windows(trajectory(x.topRows(1)), b.latent, 1);

  const EvalMetrics perfect = evaluate_latent(b.latent, b, d, x, {0, 5});
  CHECK(perfect.latent_error == 0.0);
  CHECK(perfect.field_error == doctest::Approx(std::sqrt(b.discarded_energy) / x.norm()).epsilon(1e-10));
  CHECK(perfect.sensor_truth.row(1) == x.row(5));

  const EvalMetrics zero = evaluate_latent(Eigen::MatrixXd::Zero(3, 8), b, d, x);
  CHECK(zero.latent_error == 1.0);
  CHECK(zero.field_error == 1.0);
  CHECK_THROWS_AS(evaluate_latent(Eigen::MatrixXd::Zero(2, 8), b, d, x), DimensionMismatch);
}

TEST_CASE("ensemble") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n;
  Eigen::MatrixXd x(6, 60);
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    for (Eigen::Index i = 0; i < x.rows(); ++i) x(i, j) = std::sin(0.1 * static_cast<double>(j * (i + 1))) + 0.01 * n(rng);
  const SvdBundle b = truncate(thin_svd(x), 2);
  const SpatialGrid g(1.0, 6, BoundaryKind::periodic);
  const SnapshotMatrix snaps(x, g, TimeGrid::uniform(0.0, 1.0, 60));
  DatasetBuilder builder = [&](const std::vector<SensorSpec>& sensors, std::size_t) {
    const WindowDataset all = build_windows(sample(snaps, sensors), b.latent, 4);
    std::vector<std::size_t> tr(40), va(10), te(10);
    std::iota(tr.begin(), tr.end(), 0);
    std::iota(va.begin(), va.end(), 40);
    std::iota(te.begin(), te.end(), 50);
    return MemberData{all.subset(tr), all.subset(va), all.subset(te)};
  };
  TrainConfig cfg;
  cfg.max_epochs = 15;
  cfg.patience = 5;
  cfg.batch_size = 8;
  cfg.seed = 42;
  const Architecture arch{0, 0, {4}, {8}, 0};

  const auto one = ensemble_train(builder, {{SensorSpec::stationary({1})}}, arch, cfg, b);
  CHECK(one.std_field.isZero());
  CHECK(one.mean_field.cols() == 10);

  const std::vector<std::vector<SensorSpec>> configs{
      {SensorSpec::stationary({1})}, {SensorSpec::stationary({3})}, {SensorSpec::stationary({4})}};
  const auto serial = ensemble_train(builder, configs, arch, cfg, b, 1);
  const auto threaded = ensemble_train(builder, configs, arch, cfg, b, 2);
  CHECK(serial.mean_field == threaded.mean_field);
  CHECK(serial.models[2].seed() == member_seed(42, 2));
  CHECK(member_seed(42, 0) != member_seed(42, 1));
  CHECK(serial.test_latent[0] == one.test_latent[0]);

  const auto [mean, sd] = mean_and_std({Eigen::MatrixXd::Constant(1, 1, 1.0), Eigen::MatrixXd::Constant(1, 1, 3.0)});
  CHECK(mean(0, 0) == 2.0);
  CHECK(sd(0, 0) == 1.0);
}

}  // TEST_SUITE
