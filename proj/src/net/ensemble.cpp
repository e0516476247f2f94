#include "shred/net/ensemble.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "shred/errors.hpp"

namespace shred::net {

std::uint64_t member_seed(std::uint64_t master, std::size_t member) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(member) + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> mean_and_std(const std::vector<Eigen::MatrixXd>& fields) {
  if (fields.empty()) throw ValidationError("need at least one field");
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(fields[0].rows(), fields[0].cols());
  for (const auto& f : fields) {
    if (f.rows() != mean.rows() || f.cols() != mean.cols()) throw DimensionMismatch("member fields differ in shape");
    mean += f;
  }
  mean /= static_cast<double>(fields.size());
  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(mean.rows(), mean.cols());
  for (const auto& f : fields) var += (f - mean).cwiseAbs2();
  var /= static_cast<double>(fields.size());
  return {std::move(mean), var.cwiseSqrt()};
}

EnsembleResult ensemble_train(const DatasetBuilder& builder, const std::vector<std::vector<SensorSpec>>& configs,
                              const Architecture& arch, const TrainConfig& config, const SvdBundle& bundle,
                              std::size_t workers) {
  if (configs.empty()) throw ValidationError("ensemble needs at least one sensor configuration");
  const std::size_t n = configs.size();
  std::vector<std::optional<TrainResult>> results(n);
  std::vector<Eigen::MatrixXd> predictions(n);
  std::vector<std::exception_ptr> errors(n);

  auto run_member = [&](std::size_t k) {
    try {
      MemberData data = builder(configs[k], k);
      Architecture member_arch = arch;
      member_arch.inputs = data.train.features;
      member_arch.outputs = data.train.outputs;
      member_arch.lag = data.train.lag;
      TrainConfig member_cfg = config;
      member_cfg.seed = member_seed(config.seed, k);
      results[k] = train(ShredModel(member_arch, member_cfg.seed), data.train, data.valid, member_cfg);
      predictions[k] = results[k]->model.predict(data.test).topRows(static_cast<Eigen::Index>(bundle.rank()));
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };

  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t k = 0; k < n; ++k) run_member(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < n; k = next++) run_member(k);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  EnsembleResult out;
  std::vector<Eigen::MatrixXd> fields;
  const Eigen::Index samples = predictions[0].cols();
  for (std::size_t k = 0; k < n; ++k) {
    if (predictions[k].cols() != samples)
      throw DimensionMismatch("ensemble members produced different test sample counts");
    out.models.push_back(std::move(results[k]->model));
    out.histories.push_back(std::move(results[k]->history));
    fields.push_back(decompress(predictions[k], bundle));
    out.test_latent.push_back(std::move(predictions[k]));
  }
  out.mean_latent = mean_and_std(out.test_latent).first;
  std::tie(out.mean_field, out.std_field) = mean_and_std(fields);
  return out;
}

}  // namespace shred::net
