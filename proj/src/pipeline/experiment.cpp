#include "shred/pipeline/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "shred/errors.hpp"
#include "shred/net/ensemble.hpp"
#include "shred/net/evaluate.hpp"
#include "shred/net/splits.hpp"
#include "shred/pipeline/checkpoint.hpp"
#include "shred/pipeline/plot.hpp"
#include "shred/pipeline/snapshot_io.hpp"
#include "shred/reconstruct.hpp"
#include "shred/rom.hpp"

namespace shred::pipeline {

namespace fs = std::filesystem;

namespace {

constexpr std::array<std::pair<Stage, const char*>, 7> kStageNames{{
    {Stage::simulate, "simulate"},
    {Stage::sample, "sample"},
    {Stage::reconstruct, "reconstruct"},
    {Stage::svd, "svd"},
    {Stage::train, "train"},
    {Stage::eval, "eval"},
    {Stage::report, "report"},
}};

// Independent RNG streams derived from the master seed.
enum class Stream : std::size_t { initial_u = 0, initial_v, sensors, noise, split };

int stage_rank(Stage s) {
  switch (s) {
    case Stage::simulate: return 0;
    case Stage::sample: return 1;
    case Stage::reconstruct:
    case Stage::svd: return 2;
    case Stage::train: return 3;
    case Stage::eval: return 4;
    case Stage::report: return 5;
  }
  return 5;
}

bool is_exact(Scenario s) {
  return s == Scenario::linear_exact || s == Scenario::multi_sensor || s == Scenario::mobile ||
         s == Scenario::coupled;
}

bool is_shred(Scenario s) { return s == Scenario::parametric_shred || s == Scenario::forecast_shred; }

class Context {
 public:
  Context(const ExperimentConfig& cfg, Stage stop, bool write) : cfg(cfg), stop(stop), write(write) {
    report.scenario = to_string(cfg.scenario);
    report.config_hash = config_hash(cfg);
    if (write) fs::create_directories(cfg.output_dir);
  }

  const ExperimentConfig& cfg;
  const Stage stop;
  const bool write;
  RunReport report;

  bool reach(Stage s) const { return stage_rank(s) <= stage_rank(stop); }
  bool plotting() const { return write && cfg.plots && stop == Stage::report; }
  std::uint64_t seed(Stream s) const { return net::member_seed(cfg.seed, static_cast<std::size_t>(s)); }
  fs::path path(const std::string& name) const { return fs::path(cfg.output_dir) / name; }

  void metric(const std::string& name, double value) {
    if (!std::isfinite(value)) throw NumericalError("metric " + name + " is not finite");
    report.metrics.emplace_back(name, value);
  }

  template <class F>
  auto timed(const std::string& stage, F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    auto result = f();
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    report.timings.emplace_back(stage, dt.count());
    return result;
  }

  void snapshots(const std::string& name, const SnapshotMatrix& s) {
    if (!write) return;
    save_snapshots(path(name), s);
    report.artifacts.push_back(name);
  }

  void measurements(const std::string& name, const MeasurementTrajectory& traj) {
    if (!write) return;
    const auto nc = traj.values.rows();
    Eigen::MatrixXd table(traj.values.cols(), nc + 1);
    std::vector<std::string> header{"t"};
    for (Eigen::Index j = 0; j < table.rows(); ++j) table(j, 0) = traj.times[static_cast<std::size_t>(j)];
    table.rightCols(nc) = traj.values.transpose();
    for (Eigen::Index c = 0; c < nc; ++c) header.push_back("c" + std::to_string(c));
    save_matrix_csv(path(name), table, header);
    report.artifacts.push_back(name);
  }

  template <class T>
  void checkpoint(const std::string& name, const T& object) {
    if (!write) return;
    save_checkpoint(path(name), object);
    report.artifacts.push_back(name);
  }

  void text(const std::string& name, const std::string& body) {
    if (!write) return;
    std::ofstream out(path(name), std::ios::binary);
    if (!out) throw FormatError("cannot write " + path(name).string());
    out << body;
    report.artifacts.push_back(name);
  }

  void heatmaps(const std::string& prefix, const SpatialGrid& grid, const TimeGrid& times,
                const Eigen::MatrixXd& truth, const Eigen::MatrixXd& prediction) {
    if (!plotting()) return;
    const double x0 = grid.point(0);
    const double x1 = grid.point(grid.num_points() - 1);
    const Eigen::MatrixXd error = prediction - truth;
    const std::pair<const char*, const Eigen::MatrixXd*> panels[] = {
        {"truth", &truth}, {"prediction", &prediction}, {"error", &error}};
    for (const auto& [label, field] : panels) {
      const std::string name = prefix + "_" + label + ".svg";
      if (write_heatmap(path(name), prefix + " " + label, *field, x0, x1, times.start(), times.end()))
        report.artifacts.push_back(name);
    }
  }

  void traces(const std::string& name, const std::string& title, const TimeGrid& times,
              const Eigen::MatrixXd& truth, const Eigen::MatrixXd& prediction) {
    if (!plotting()) return;
    std::vector<LineSeries> series;
    for (Eigen::Index c = 0; c < truth.rows(); ++c) {
      LineSeries t{"truth c" + std::to_string(c), times.values(), {}, false};
      LineSeries p{"predicted c" + std::to_string(c), times.values(), {}, true};
      for (Eigen::Index j = 0; j < truth.cols(); ++j) {
        t.y.push_back(truth(c, j));
        p.y.push_back(prediction(c, j));
      }
      series.push_back(std::move(t));
      series.push_back(std::move(p));
    }
    if (write_line_plot(path(name), title, series)) report.artifacts.push_back(name);
  }
};

TimeGrid eval_times(const ExperimentConfig& cfg) {
  return TimeGrid::uniform(cfg.time.start, cfg.time.end, cfg.time.count);
}

SpatialGrid make_grid(const ExperimentConfig& cfg) {
  return SpatialGrid(cfg.pde.length, cfg.pde.grid_points, cfg.pde.boundary);
}

// Modal trajectory of u = sum a_n exp(lambda_n t) phi_n at absolute times.
Eigen::MatrixXcd linear_from_zero(const Eigen::VectorXcd& a0, const ModalBasis& basis, const TimeGrid& times) {
  const Eigen::VectorXcd start = a0.cwiseProduct((basis.eigenvalues() * times.start()).array().exp().matrix());
  return evolve_linear(start, basis, times);
}

std::vector<SensorSpec> stationary_sensors(const ExperimentConfig& cfg, const SpatialGrid& grid,
                                           std::size_t default_count, std::uint64_t seed) {
  if (cfg.sensors.locations.empty())
    return random_sensor_configs(grid, cfg.sensors.num_sensors.value_or(default_count), 1, seed).front();
  std::vector<SensorSpec> out;
  for (std::size_t s = 0; s < cfg.sensors.locations.size(); ++s)
    out.push_back(SensorSpec::stationary({cfg.sensors.locations[s]}, "s" + std::to_string(s)));
  return out;
}

TimeGrid measurement_times(const ExperimentConfig& cfg, const Eigen::VectorXcd& eigenvalues, std::size_t count) {
  if (cfg.measurement.start) return TimeGrid::uniform(*cfg.measurement.start, *cfg.measurement.end, count);
  return default_measurement_times(eigenvalues, count, 0.0);
}

OperatorSpec scaled_operator(const std::vector<double>& coefficients, double mu) {
  std::vector<cplx> c(coefficients.begin(), coefficients.end());
  for (auto& v : c) v *= mu;
  return OperatorSpec(std::move(c));
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void svd_only(Context& ctx, const SnapshotMatrix& truth) {
  const SvdBundle full = ctx.timed("svd", [&] { return thin_svd(truth); });
  const SvdBundle bundle = truncate(full, std::min(ctx.cfg.svd_rank, full.rank()));
  ctx.metric("svd_rank", static_cast<double>(bundle.rank()));
  ctx.metric("truncation_error", relative_error(decompress(bundle.latent, bundle), truth.values));
  ctx.checkpoint("svd.shrd", bundle);
}

// --- exact reconstruction scenarios ---------------------------------------

void run_linear(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SpatialGrid grid = make_grid(cfg);
  const ModalBasis basis = build_basis(grid, make_operator(cfg.pde.op), cfg.pde.num_modes);
  const Eigen::VectorXcd a0 = random_real_coefficients(basis, ctx.seed(Stream::initial_u),
                                                       cfg.initial_condition.amplitude, cfg.initial_condition.decay);
  const TimeGrid eval = eval_times(cfg);
  const SnapshotMatrix truth =
      ctx.timed("simulate", [&] { return make_snapshots(linear_from_zero(a0, basis, eval), basis, eval); });
  ctx.snapshots("snapshots.csv", truth);
  ctx.metric("num_modes", static_cast<double>(basis.size()));
  if (ctx.stop == Stage::svd) return svd_only(ctx, truth);
  if (!ctx.reach(Stage::sample)) return;

  const bool mobile = cfg.scenario == Scenario::mobile;
  std::vector<SensorSpec> sensors;
  std::size_t count = 0;
  if (mobile) {
    count = cfg.measurement.count.value_or(cfg.sensors.mobile_path.empty() ? basis.size()
                                                                           : cfg.sensors.mobile_path.size());
    sensors.push_back(cfg.sensors.mobile_path.empty() ? random_mobile_path(grid, count, ctx.seed(Stream::sensors))
                                                      : SensorSpec::mobile(cfg.sensors.mobile_path, "mobile"));
  } else {
    sensors = stationary_sensors(cfg, grid, cfg.scenario == Scenario::multi_sensor ? 2 : 1, ctx.seed(Stream::sensors));
    count = cfg.measurement.count.value_or(required_trajectory_length(basis.size(), total_channels(sensors)));
  }
  const TimeGrid times = measurement_times(cfg, basis.eigenvalues(), count);
  const SnapshotMatrix at_times = make_snapshots(linear_from_zero(a0, basis, times), basis, times);
  MeasurementTrajectory traj = sample(at_times, sensors);
  if (cfg.noise_sigma > 0.0) traj = add_noise(traj, cfg.noise_sigma, ctx.seed(Stream::noise));
  ctx.measurements("measurements.csv", traj);
  ctx.metric("num_channels", static_cast<double>(total_channels(sensors)));
  ctx.metric("num_measurements", static_cast<double>(total_channels(sensors) * times.size()));
  if (!ctx.reach(Stage::reconstruct)) return;

  const SolveResult solved = ctx.timed("reconstruct", [&] {
    return solve_coefficients(attach_measurements(build_system(basis, sensors, times), traj));
  });
  const SnapshotMatrix recon = reconstruct_field(solved.coefficients, basis, eval);
  ctx.snapshots("reconstruction.csv", recon);
  ctx.metric("condition_estimate", solved.diagnostics.condition_estimate);
  ctx.metric("residual", solved.diagnostics.residual);
  ctx.metric("coefficient_error", (solved.coefficients - a0).norm() / a0.norm());
  ctx.metric("field_error", relative_error(recon.values, truth.values));

  const MeasurementTrajectory fitted =
      sample(reconstruct_field(solved.coefficients, basis, times), sensors);
  ctx.heatmaps("field", grid, eval, truth.values, recon.values);
  ctx.traces("sensors.svg", "sensor measurements vs reconstruction", times, traj.values, fitted.values);
}

void run_coupled(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.pde.coupled) throw ConfigError("/pde: the coupled scenario needs 'coupled' operators");
  const CoupledOperators ops{make_operator((*cfg.pde.coupled)[0]), make_operator((*cfg.pde.coupled)[1]),
                             make_operator((*cfg.pde.coupled)[2]), make_operator((*cfg.pde.coupled)[3])};
  const SpatialGrid grid = make_grid(cfg);
  const ModalBasis basis = coupled_basis(grid, cfg.pde.num_modes);
  const Eigen::VectorXcd a0 = random_real_coefficients(basis, ctx.seed(Stream::initial_u),
                                                       cfg.initial_condition.amplitude, cfg.initial_condition.decay);
  const Eigen::VectorXcd b0 = random_real_coefficients(basis, ctx.seed(Stream::initial_v),
                                                       cfg.initial_condition.amplitude, cfg.initial_condition.decay);
  const auto n = static_cast<Eigen::Index>(basis.size());

  auto fields_at = [&](const TimeGrid& times) {
    Eigen::VectorXcd a = a0, b = b0;
    for (Eigen::Index k = 0; k < n; ++k) {
      const Eigen::Vector2cd ab =
          mode_propagator(coupled_generator(ops, basis.mode(static_cast<std::size_t>(k))), times.start()) *
          Eigen::Vector2cd(a0[k], b0[k]);
      a[k] = ab[0];
      b[k] = ab[1];
    }
    const CoupledTrajectory tr = evolve_coupled_coefficients(ops, basis, a, b, times);
    return std::pair{make_snapshots(tr.a, basis, times, "u"), make_snapshots(tr.b, basis, times, "v")};
  };

  const TimeGrid eval = eval_times(cfg);
  const auto truth = ctx.timed("simulate", [&] { return fields_at(eval); });
  ctx.snapshots("snapshots_u.csv", truth.first);
  ctx.snapshots("snapshots_v.csv", truth.second);
  ctx.metric("num_modes", static_cast<double>(basis.size()));
  if (ctx.stop == Stage::svd) return svd_only(ctx, truth.first);
  if (!ctx.reach(Stage::sample)) return;

  const SensorSpec sensor = cfg.sensors.locations.empty()
                                ? random_sensor_configs(grid, 1, 1, ctx.seed(Stream::sensors)).front().front()
                                : SensorSpec::stationary(cfg.sensors.locations, "u");
  const std::size_t count =
      cfg.measurement.count.value_or(required_trajectory_length(2 * basis.size(), sensor.channels()));
  Eigen::VectorXcd lambdas(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Vector2cd ev = coupled_generator(ops, basis.mode(static_cast<std::size_t>(k))).eigenvalues();
    lambdas[2 * k] = ev[0];
    lambdas[2 * k + 1] = ev[1];
  }
  const TimeGrid times = measurement_times(cfg, lambdas, count);
  MeasurementTrajectory traj = sample(fields_at(times).first, {sensor});
  if (cfg.noise_sigma > 0.0) traj = add_noise(traj, cfg.noise_sigma, ctx.seed(Stream::noise));
  ctx.measurements("measurements.csv", traj);
  ctx.metric("num_channels", static_cast<double>(sensor.channels()));
  ctx.metric("num_measurements", static_cast<double>(sensor.channels() * times.size()));
  if (!ctx.reach(Stage::reconstruct)) return;

  const SolveResult solved = ctx.timed("reconstruct", [&] {
    return solve_coefficients(attach_measurements(build_coupled_system(ops, basis, sensor, times), traj));
  });
  const auto [a, b] = split_coupled(solved.coefficients);
  const auto [u, v] = reconstruct_coupled_fields(ops, basis, a, b, eval);
  ctx.snapshots("reconstruction_u.csv", u);
  ctx.snapshots("reconstruction_v.csv", v);
  ctx.metric("condition_estimate", solved.diagnostics.condition_estimate);
  ctx.metric("residual", solved.diagnostics.residual);
  ctx.metric("u_error", relative_error(u.values, truth.first.values));
  ctx.metric("v_error", relative_error(v.values, truth.second.values));
  ctx.heatmaps("u", grid, eval, truth.first.values, u.values);
  ctx.heatmaps("v", grid, eval, truth.second.values, v.values);
}

// --- nonlinear Galerkin --------------------------------------------------

void run_nonlinear(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.pde.nu) throw ConfigError("/pde: the nonlinear_galerkin scenario needs 'nu'");
  const SpatialGrid grid = make_grid(cfg);
  const ModalBasis basis = build_basis(grid, make_operator(cfg.pde.op), cfg.pde.num_modes);
  const GalerkinSystem sys = GalerkinSystem::burgers(basis, *cfg.pde.nu);
  const Eigen::VectorXcd a0 = random_real_coefficients(basis, ctx.seed(Stream::initial_u),
                                                       cfg.initial_condition.amplitude, cfg.initial_condition.decay);
  const TimeGrid eval = eval_times(cfg);
  double dt = 0.0;
  if (cfg.time.dt_internal) {
    dt = *cfg.time.dt_internal;
  } else {
    const double h = eval.size() > 1 ? eval[1] - eval[0] : 1.0;
    const double steps = std::max(1.0, std::ceil(h * std::max(sys.linear_bound(), 1.0)));
    dt = h / steps;
  }
  const Eigen::MatrixXcd modal = ctx.timed("simulate", [&] { return evolve_galerkin(sys, a0, eval, dt); });
  const SnapshotMatrix truth = make_snapshots(modal, basis, eval);
  ctx.snapshots("snapshots.csv", truth);
  ctx.metric("num_modes", static_cast<double>(basis.size()));
  ctx.metric("dt_internal", dt);
  ctx.metric("energy_initial", modal.col(0).squaredNorm());
  ctx.metric("energy_final", modal.col(modal.cols() - 1).squaredNorm());
  ctx.metric("max_abs_field", truth.values.cwiseAbs().maxCoeff());
  if (!ctx.reach(Stage::sample)) return;

  const auto sensors = stationary_sensors(cfg, grid, 3, ctx.seed(Stream::sensors));
  MeasurementTrajectory traj = sample(truth, sensors);
  if (cfg.noise_sigma > 0.0) traj = add_noise(traj, cfg.noise_sigma, ctx.seed(Stream::noise));
  ctx.measurements("measurements.csv", traj);
  ctx.metric("num_channels", static_cast<double>(total_channels(sensors)));
  if (!ctx.reach(Stage::svd)) return;

  svd_only(ctx, truth);
  if (ctx.plotting()) {
    const SvdBundle full = thin_svd(truth);
    const SvdBundle b = truncate(full, std::min(cfg.svd_rank, full.rank()));
    const SnapshotMatrix approx = decompress(b.latent, b, grid, eval);
    ctx.heatmaps("field", grid, eval, truth.values, approx.values);
    ctx.traces("sensors.svg", "measurements vs rank-r approximation", eval, traj.values,
               sample(approx, sensors).values);
  }
}

// --- SHRED scenarios -------------------------------------------------------

net::TrainConfig train_config(const ExperimentConfig& cfg) {
  net::TrainConfig t = cfg.train;
  t.seed = cfg.seed;
  return t;
}

void emit_members(Context& ctx, const net::EnsembleResult& ens) {
  for (std::size_t k = 0; k < ens.models.size(); ++k) {
    ctx.checkpoint("member_" + std::to_string(k) + ".shrd", ens.models[k]);
    ctx.text("history_" + std::to_string(k) + ".csv", ens.histories[k].to_csv());
  }
}

void run_parametric(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<double> params = cfg.parameters;
  if (params.empty())
    for (int p = 0; p < 16; ++p) params.push_back(0.5 + p / 15.0);
  const std::size_t np = params.size();
  const SpatialGrid grid = make_grid(cfg);
  const TimeGrid eval = eval_times(cfg);

  // One physical initial field shared by every parameter value.
  const ModalBasis base = build_basis(grid, make_operator(cfg.pde.op), cfg.pde.num_modes);
  const Eigen::VectorXd u0 = synthesize(random_real_coefficients(base, ctx.seed(Stream::initial_u),
                                                                 cfg.initial_condition.amplitude,
                                                                 cfg.initial_condition.decay),
                                        base);
  const std::vector<SnapshotMatrix> truth = ctx.timed("simulate", [&] {
    std::vector<SnapshotMatrix> out;
    for (double mu : params) {
      const ModalBasis basis = build_basis(grid, scaled_operator(cfg.pde.op, mu), cfg.pde.num_modes);
      out.push_back(make_snapshots(linear_from_zero(project(u0, basis), basis, eval), basis, eval));
    }
    return out;
  });
  for (std::size_t p = 0; p < np; ++p) ctx.snapshots("snapshots_p" + std::to_string(p) + ".csv", truth[p]);
  ctx.metric("num_parameters", static_cast<double>(np));
  if (!ctx.reach(Stage::sample)) return;

  const auto configs = random_sensor_configs(grid, cfg.sensors.num_sensors.value_or(3),
                                             cfg.sensors.num_configs.value_or(10), ctx.seed(Stream::sensors));
  const std::uint64_t noise_seed = ctx.seed(Stream::noise);
  auto measure = [&](const std::vector<SensorSpec>& sensors, std::size_t member, std::size_t p) {
    MeasurementTrajectory traj = sample(truth[p], sensors);
    if (cfg.noise_sigma > 0.0)
      traj = add_noise(traj, cfg.noise_sigma, net::member_seed(noise_seed, member * np + p));
    return traj;
  };
  for (std::size_t p = 0; p < np; ++p) ctx.measurements("measurements_p" + std::to_string(p) + ".csv",
                                                        measure(configs.front(), 0, p));
  ctx.metric("num_configs", static_cast<double>(configs.size()));
  if (!ctx.reach(Stage::svd)) return;

  const ParametricStack stack = stack_parametric(truth);
  const SvdBundle bundle = ctx.timed("svd", [&] {
    const SvdBundle full = thin_svd(stack.stacked);
    return truncate(full, std::min(cfg.svd_rank, full.rank()));
  });
  ctx.checkpoint("svd.shrd", bundle);
  ctx.metric("svd_rank", static_cast<double>(bundle.rank()));
  if (!ctx.reach(Stage::train)) return;

  auto latent_of = [&](std::size_t p) {
    return Eigen::MatrixXd(bundle.latent.middleCols(static_cast<Eigen::Index>(stack.ranges[p].first),
                                                    static_cast<Eigen::Index>(eval.size())));
  };
  const net::ParametricSplit split = net::split_parametric(np, net::kParametricRatios, ctx.seed(Stream::split));
  const net::DatasetBuilder builder = [&](const std::vector<SensorSpec>& sensors, std::size_t member) {
    auto part = [&](const std::vector<std::size_t>& ids) {
      std::vector<net::WindowDataset> pieces;
      for (std::size_t p : ids)
        pieces.push_back(net::build_windows(measure(sensors, member, p), latent_of(p), cfg.network.lag,
                                            std::nullopt, net::ParameterRole::none, p));
      return net::concat(pieces);
    };
    return net::MemberData{part(split.train), part(split.valid), part(split.test)};
  };
  const net::EnsembleResult ens = ctx.timed("train", [&] {
    return net::ensemble_train(builder, configs, cfg.network, train_config(cfg), bundle, cfg.workers);
  });
  emit_members(ctx, ens);
  if (!ctx.reach(Stage::eval)) return;

  const auto nt = static_cast<Eigen::Index>(eval.size());
  std::vector<double> latent_err, field_err, floor_err;
  std::vector<std::vector<double>> member_err(ens.models.size());
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    const std::size_t p = split.test[i];
    const Eigen::MatrixXd target = latent_of(p);
    const Eigen::MatrixXd pred = ens.mean_latent.middleCols(static_cast<Eigen::Index>(i) * nt, nt);
    latent_err.push_back(relative_error(pred, target));
    field_err.push_back(relative_error(decompress(pred, bundle), truth[p].values));
    floor_err.push_back(relative_error(decompress(target, bundle), truth[p].values));
    for (std::size_t k = 0; k < ens.models.size(); ++k)
      member_err[k].push_back(
          relative_error(ens.test_latent[k].middleCols(static_cast<Eigen::Index>(i) * nt, nt), target));
    ctx.metric("latent_error_p" + std::to_string(p), latent_err.back());
  }
  std::vector<double> member_mean;
  for (const auto& e : member_err) member_mean.push_back(mean(e));
  ctx.metric("latent_error", mean(latent_err));
  ctx.metric("field_error", mean(field_err));
  ctx.metric("truncation_floor", mean(floor_err));
  ctx.metric("member_latent_error_median", median(member_mean));
  ctx.metric("member_latent_error_min", *std::min_element(member_mean.begin(), member_mean.end()));
  ctx.metric("member_latent_error_max", *std::max_element(member_mean.begin(), member_mean.end()));
  ctx.metric("ensemble_std_mean", ens.std_field.mean());
  for (std::size_t k = 0; k < ens.histories.size(); ++k)
    ctx.metric("best_epoch_" + std::to_string(k), static_cast<double>(ens.histories[k].best_epoch));

  if (ctx.plotting() && !split.test.empty()) {
    const std::size_t p = split.test.front();
    const Eigen::MatrixXd pred = decompress(ens.mean_latent.leftCols(nt), bundle);
    ctx.heatmaps("test_p" + std::to_string(p), grid, eval, truth[p].values, pred);
    std::vector<std::size_t> locs;
    for (const auto& s : configs.front()) locs.push_back(s.indices.front());
    Eigen::MatrixXd t(locs.size(), nt), q(locs.size(), nt);
    for (std::size_t s = 0; s < locs.size(); ++s) {
      t.row(static_cast<Eigen::Index>(s)) = truth[p].values.row(static_cast<Eigen::Index>(locs[s]));
      q.row(static_cast<Eigen::Index>(s)) = pred.row(static_cast<Eigen::Index>(locs[s]));
    }
    ctx.traces("test_p" + std::to_string(p) + "_sensors.svg", "ensemble mean at member 0 sensors", eval, t, q);
  }
}

void run_forecast(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const SpatialGrid grid = make_grid(cfg);
  const ModalBasis basis = build_basis(grid, make_operator(cfg.pde.op), cfg.pde.num_modes);
  const Eigen::VectorXcd a0 = random_real_coefficients(basis, ctx.seed(Stream::initial_u),
                                                       cfg.initial_condition.amplitude, cfg.initial_condition.decay);
  const TimeGrid eval = eval_times(cfg);
  const SnapshotMatrix truth =
      ctx.timed("simulate", [&] { return make_snapshots(linear_from_zero(a0, basis, eval), basis, eval); });
  ctx.snapshots("snapshots.csv", truth);
  if (!ctx.reach(Stage::sample)) return;

  const auto configs = random_sensor_configs(grid, cfg.sensors.num_sensors.value_or(3),
                                             cfg.sensors.num_configs.value_or(1), ctx.seed(Stream::sensors));
  const std::uint64_t noise_seed = ctx.seed(Stream::noise);
  auto measure = [&](const std::vector<SensorSpec>& sensors, std::size_t member) {
    MeasurementTrajectory traj = sample(truth, sensors);
    if (cfg.noise_sigma > 0.0) traj = add_noise(traj, cfg.noise_sigma, net::member_seed(noise_seed, member));
    return traj;
  };
  ctx.measurements("measurements.csv", measure(configs.front(), 0));
  ctx.metric("num_configs", static_cast<double>(configs.size()));
  if (!ctx.reach(Stage::svd)) return;

  const SvdBundle bundle = ctx.timed("svd", [&] {
    const SvdBundle full = thin_svd(truth);
    return truncate(full, std::min(cfg.svd_rank, full.rank()));
  });
  ctx.checkpoint("svd.shrd", bundle);
  ctx.metric("svd_rank", static_cast<double>(bundle.rank()));
  if (!ctx.reach(Stage::train)) return;

  const net::TemporalSplit split = net::split_temporal(eval);
  auto range = [](std::pair<std::size_t, std::size_t> r) {
    std::vector<std::size_t> idx(r.second - r.first);
    std::iota(idx.begin(), idx.end(), r.first);
    return idx;
  };
  const net::DatasetBuilder builder = [&](const std::vector<SensorSpec>& sensors, std::size_t member) {
    const net::WindowDataset all = net::build_windows(measure(sensors, member), bundle.latent, cfg.network.lag);
    return net::MemberData{all.subset(range(split.train)), all.subset(range(split.valid)),
                           all.subset(range(split.test))};
  };
  const net::EnsembleResult ens = ctx.timed("train", [&] {
    return net::ensemble_train(builder, configs, cfg.network, train_config(cfg), bundle, cfg.workers);
  });
  emit_members(ctx, ens);
  if (!ctx.reach(Stage::eval)) return;

  const auto t0 = static_cast<Eigen::Index>(split.test.first);
  const auto nt = static_cast<Eigen::Index>(split.test.second - split.test.first);
  const Eigen::MatrixXd x_test = truth.values.middleCols(t0, nt);
  ctx.metric("test_instants", static_cast<double>(nt));
  ctx.metric("test_latent_error", relative_error(ens.mean_latent, bundle.latent.middleCols(t0, nt)));
  ctx.metric("test_field_error", relative_error(ens.mean_field, x_test));
  ctx.metric("truncation_floor",
             relative_error(decompress(bundle.latent.middleCols(t0, nt), bundle), x_test));

  std::vector<double> vs_measured, vs_truth;
  for (std::size_t k = 0; k < configs.size(); ++k) {
    const MeasurementTrajectory traj = measure(configs[k], k);
    const Eigen::MatrixXd pred = decompress(ens.test_latent[k], bundle);
    double sm = 0.0, st = 0.0;
    Eigen::Index count = 0;
    for (Eigen::Index c = 0; c < traj.values.rows(); ++c) {
      const auto loc = static_cast<Eigen::Index>(configs[k][static_cast<std::size_t>(c)].indices.front());
      sm += (pred.row(loc) - traj.values.row(c).segment(t0, nt)).squaredNorm();
      st += (pred.row(loc) - x_test.row(loc)).squaredNorm();
      count += nt;
    }
    vs_measured.push_back(std::sqrt(sm / static_cast<double>(count)));
    vs_truth.push_back(std::sqrt(st / static_cast<double>(count)));
  }
  ctx.metric("sensor_rms_vs_measurement", mean(vs_measured));
  ctx.metric("sensor_rms_vs_truth", mean(vs_truth));
  ctx.metric("noise_sigma", cfg.noise_sigma);
  ctx.metric("ensemble_std_mean", ens.std_field.mean());
  for (std::size_t k = 0; k < ens.histories.size(); ++k)
    ctx.metric("best_epoch_" + std::to_string(k), static_cast<double>(ens.histories[k].best_epoch));

  if (ctx.plotting()) {
    const TimeGrid test_times = eval.slice(split.test.first, split.test.second);
    ctx.heatmaps("test", grid, test_times, x_test, ens.mean_field);
    const MeasurementTrajectory traj = measure(configs.front(), 0);
    const Eigen::MatrixXd pred = decompress(ens.test_latent.front(), bundle);
    Eigen::MatrixXd q(traj.values.rows(), nt);
    for (Eigen::Index c = 0; c < q.rows(); ++c)
      q.row(c) = pred.row(static_cast<Eigen::Index>(configs.front()[static_cast<std::size_t>(c)].indices.front()));
    ctx.traces("test_sensors.svg", "forecast at the input sensors", test_times, traj.values.middleCols(t0, nt), q);
  }
}

}  // namespace

std::string to_string(Stage s) {
  for (const auto& [value, name] : kStageNames)
    if (value == s) return name;
  throw ValidationError("unknown stage value");
}

Stage stage_from_string(const std::string& name) {
  for (const auto& [value, n] : kStageNames)
    if (name == n) return value;
  throw ConfigError("unknown stage '" + name + "'");
}

double RunReport::metric(const std::string& name) const {
  for (const auto& [n, v] : metrics)
    if (n == name) return v;
  throw ValidationError("no metric named '" + name + "'");
}

bool RunReport::has_metric(const std::string& name) const {
  return std::any_of(metrics.begin(), metrics.end(), [&](const auto& m) { return m.first == name; });
}

std::string RunReport::metrics_csv() const {
  std::string out = "metric,value\n";
  for (const auto& [name, value] : metrics) out += name + "," + format_double(value) + "\n";
  return out;
}

nlohmann::json RunReport::to_json() const {
  nlohmann::json metrics_obj = nlohmann::json::object();
  for (const auto& [name, value] : metrics) metrics_obj[name] = value;
  nlohmann::json timing_obj = nlohmann::json::object();
  for (const auto& [name, value] : timings) timing_obj[name] = value;
  return {{"scenario", scenario},
          {"config_hash", config_hash},
          {"timings_seconds", timing_obj},
          {"metrics", metrics_obj},
          {"artifacts", artifacts}};
}

RunReport run_experiment(const ExperimentConfig& config, Stage stop, bool write_files) {
  const Scenario s = config.scenario;
  if (stop == Stage::reconstruct && !is_exact(s))
    throw ConfigError("stage 'reconstruct' does not apply to scenario " + to_string(s));
  if (stop == Stage::train && !is_shred(s))
    throw ConfigError("stage 'train' does not apply to scenario " + to_string(s));

  Context ctx(config, stop, write_files);
  switch (s) {
    case Scenario::linear_exact:
    case Scenario::multi_sensor:
    case Scenario::mobile: run_linear(ctx); break;
    case Scenario::coupled: run_coupled(ctx); break;
    case Scenario::nonlinear_galerkin: run_nonlinear(ctx); break;
    case Scenario::parametric_shred: run_parametric(ctx); break;
    case Scenario::forecast_shred: run_forecast(ctx); break;
  }

  if (write_files) {
    ctx.text("config.json", to_json(config).dump(2) + "\n");
    ctx.text("metrics.csv", ctx.report.metrics_csv());
    ctx.report.artifacts.push_back("report.json");
    std::ofstream out(ctx.path("report.json"), std::ios::binary);
    if (!out) throw FormatError("cannot write " + ctx.path("report.json").string());
    out << ctx.report.to_json().dump(2) << "\n";
  }
  return ctx.report;
}

}  // namespace shred::pipeline
