// Acceptance suite: one PASS/FAIL line per criterion. Criterion 10 reruns
// 1-9 and compares the metric CSVs byte for byte.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "shred/errors.hpp"
#include "shred/pipeline/config.hpp"
#include "shred/pipeline/experiment.hpp"
#include "shred/pipeline/snapshot_io.hpp"
#include "shred/reconstruct.hpp"
#include "shred/rom.hpp"
#include "support/gradcheck.hpp"

using namespace shred;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kTwoPi = 6.283185307179586;

struct Outcome {
  bool pass = false;
  std::string detail;
  std::vector<std::pair<std::string, double>> metrics;  // excludes wall-clock timings

  void add(const std::string& name, double value) { metrics.emplace_back(name, value); }
  std::string csv() const {
    std::string out = "metric,value\n";
    for (const auto& [k, v] : metrics) out += k + "," + pipeline::format_double(v) + "\n";
    return out;
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Linear {
  ModalBasis basis;
  Eigen::VectorXcd a0;
};

Linear periodic_heat(std::uint64_t seed) {
  const SpatialGrid g(kTwoPi, 128, BoundaryKind::periodic);
  ModalBasis b = build_basis(g, OperatorSpec::diffusion(1.0), 17);
  Eigen::VectorXcd a = random_real_coefficients(b, seed);
  return {std::move(b), std::move(a)};
}

SnapshotMatrix field(const Linear& p, const TimeGrid& t) {
  Eigen::MatrixXcd traj(p.a0.size(), static_cast<Eigen::Index>(t.size()));
  for (std::size_t j = 0; j < t.size(); ++j)
    traj.col(static_cast<Eigen::Index>(j)) =
        p.a0.cwiseProduct((p.basis.eigenvalues() * t[j]).array().exp().matrix());
  return make_snapshots(traj, p.basis, t);
}

struct Recovery {
  bool ok = false;
  double error = 0.0;
  double cond = 0.0;
  std::string failure;
};

Recovery recover(const Linear& p, const std::vector<SensorSpec>& sensors, const TimeGrid& times,
                 const TimeGrid& eval) {
  Recovery r;
  try {
    const auto sys = attach_measurements(build_system(p.basis, sensors, times), sample(field(p, times), sensors));
    const SolveResult sol = solve_coefficients(sys);
    r.cond = sol.diagnostics.condition_estimate;
    r.error = relative_error(reconstruct_field(sol.coefficients, p.basis, eval).values, field(p, eval).values);
    r.ok = true;
  } catch (const IllConditioned& e) {
    r.failure = std::string("IllConditioned: ") + e.what();
  }
  return r;
}

void record(Outcome& o, const std::string& prefix, const Recovery& r) {
  o.add(prefix + "_solved", r.ok ? 1.0 : 0.0);
  if (r.ok) {
    o.add(prefix + "_error", r.error);
    o.add(prefix + "_condition", r.cond);
  }
}

const TimeGrid kEval = TimeGrid::uniform(0.0, 1.0, 21);

Outcome criterion1() {
  Outcome o;
  const auto t0 = Clock::now();
  const Linear p = periodic_heat(101);
  const TimeGrid times = default_measurement_times(p.basis.eigenvalues(), 17);
  const Recovery r = recover(p, {SensorSpec::stationary({37})}, times, kEval);
  const double secs = seconds_since(t0);
  record(o, "periodic_m1", r);
  o.pass = r.ok && r.error < 1e-8 && secs < 1.0;
  o.detail = r.ok ? "error " + fmt("%.3e", r.error) + ", cond " + fmt("%.3e", r.cond) : r.failure;
  o.detail += ", " + fmt("%.3f", secs) + " s";

  // Same construction where the spectrum is simple (sine basis).
  const SpatialGrid g(3.141592653589793, 128, BoundaryKind::dirichlet0);
  const ModalBasis b = build_basis(g, OperatorSpec::diffusion(1.0), 8);
  const Linear d{b, random_real_coefficients(b, 101)};
  const Recovery rd =
      recover(d, {SensorSpec::stationary({37})}, default_measurement_times(b.eigenvalues(), 8), kEval);
  record(o, "dirichlet_n8", rd);
  o.detail += "\n      note: dirichlet0 N=8 single sensor: " +
              (rd.ok ? "error " + fmt("%.3e", rd.error) + ", cond " + fmt("%.3e", rd.cond) : rd.failure);
  return o;
}

Outcome criterion2() {
  Outcome o;
  const Linear p = periodic_heat(202);
  const std::vector<std::vector<SensorSpec>> layouts{
      {SensorSpec::stationary({37})}, {SensorSpec::stationary({11, 52})}, {SensorSpec::stationary({11, 52, 90})}};
  o.pass = true;
  for (std::size_t m = 1; m <= 3; ++m) {
    const std::size_t count = required_trajectory_length(17, m);
    const Recovery r = recover(p, layouts[m - 1], default_measurement_times(p.basis.eigenvalues(), count), kEval);
    record(o, "m" + std::to_string(m), r);
    o.pass = o.pass && r.ok && r.error < 1e-8;
    o.detail += (m > 1 ? "; " : "") + std::string("m=") + std::to_string(m) + " (" + std::to_string(count) +
                " instants): " + (r.ok ? fmt("%.3e", r.error) : "IllConditioned");
  }
  return o;
}

Outcome criterion3() {
  Outcome o;
  const Linear p = periodic_heat(303);
  const SensorSpec path = random_mobile_path(p.basis.grid(), 17, 303);
  const Recovery r = recover(p, {path}, default_measurement_times(p.basis.eigenvalues(), 17), kEval);
  record(o, "mobile", r);
  o.pass = r.ok && r.error < 1e-8;
  o.detail = r.ok ? "error " + fmt("%.3e", r.error) + ", cond " + fmt("%.3e", r.cond) : r.failure;
  return o;
}

Outcome criterion4() {
  Outcome o;
  const SpatialGrid g(1.0, 64, BoundaryKind::dirichlet0);
  const ModalBasis b = coupled_basis(g, 4);
  const CoupledOperators ops{OperatorSpec::diffusion(0.1), OperatorSpec::identity(1.0),
                             OperatorSpec::identity(-1.0), OperatorSpec::diffusion(0.05)};
  const Eigen::VectorXcd a0 = random_real_coefficients(b, 41), b0 = random_real_coefficients(b, 42);
  Eigen::VectorXcd lam(8);
  for (std::size_t k = 0; k < 4; ++k) lam.segment(2 * static_cast<Eigen::Index>(k), 2) =
      coupled_generator(ops, b.mode(k)).eigenvalues();
  const TimeGrid times = default_measurement_times(lam, 8);
  const SensorSpec sensor = SensorSpec::stationary({17});
  const auto traj = sample(make_snapshots(evolve_coupled_coefficients(ops, b, a0, b0, times).a, b, times), {sensor});

  double eu = INFINITY, ev = INFINITY;
  try {
    const auto sol = solve_coefficients(attach_measurements(build_coupled_system(ops, b, sensor, times), traj));
    const auto [a, bb] = split_coupled(sol.coefficients);
    const auto [u, v] = reconstruct_coupled_fields(ops, b, a, bb, kEval);
    const CoupledTrajectory ref = evolve_coupled_coefficients(ops, b, a0, b0, kEval);
    eu = relative_error(u.values, make_snapshots(ref.a, b, kEval).values);
    ev = relative_error(v.values, make_snapshots(ref.b, b, kEval).values);
    o.add("condition", sol.diagnostics.condition_estimate);
  } catch (const IllConditioned& e) {
    o.detail = std::string("coupled solve: ") + e.what() + "; ";
  }
  o.add("u_error", eu);
  o.add("v_error", ev);

  bool decoupled_rejected = false;
  try {
    const CoupledOperators off{ops.op1, OperatorSpec::zero(), OperatorSpec::zero(), ops.op4};
    solve_coefficients(attach_measurements(build_coupled_system(off, b, sensor, times), traj));
  } catch (const IllConditioned&) {
    decoupled_rejected = true;
  }
  o.add("decoupled_rejected", decoupled_rejected ? 1.0 : 0.0);
  o.pass = eu < 1e-6 && ev < 1e-6 && decoupled_rejected;
  o.detail += "u " + fmt("%.3e", eu) + ", v " + fmt("%.3e", ev) +
              (decoupled_rejected ? ", decoupled -> IllConditioned" : ", decoupled case NOT rejected");
  return o;
}

Outcome criterion5() {
  Outcome o;
  // Advection-diffusion on a periodic domain: one sensor, instants in [0, 1].
  const SpatialGrid g(kTwoPi, 128, BoundaryKind::periodic);
  const ModalBasis b = build_basis(g, OperatorSpec(std::vector<cplx>{0.0, -1.0, 0.05}), 9);
  const Linear p{b, random_real_coefficients(b, 505)};
  const Recovery r = recover(p, {SensorSpec::stationary({23})}, TimeGrid::uniform(0.0, 1.0, 9),
                             TimeGrid::from_list({2.0}));
  record(o, "t2", r);
  o.pass = r.ok && r.error < 1e-6;
  o.detail = r.ok ? "error at t=2: " + fmt("%.3e", r.error) + ", cond " + fmt("%.3e", r.cond) : r.failure;
  return o;
}

Outcome criterion6() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::uniform_int_distribution<int> dim(2, 40);
  std::normal_distribution<double> n;
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const int rows = dim(rng), cols = dim(rng);
    Eigen::MatrixXd x(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
      for (Eigen::Index i = 0; i < rows; ++i) x(i, j) = n(rng);
    const int full = std::min(rows, cols);
    const auto r = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, full)(rng));
    // Oracle tail from an independent SVD.
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(x).singularValues();
    const double tail = std::sqrt(sv.tail(full - static_cast<int>(r)).squaredNorm());
    const SvdBundle t = truncate(thin_svd(x), r);
    worst = std::max(worst, std::abs((x - decompress(compress(x, t), t)).norm() - tail));
  }
  o.add("worst_abs_deviation", worst);
  o.pass = worst <= 1e-10;
  o.detail = "50 matrices, worst |err - tail| " + fmt("%.3e", worst);
  return o;
}

Outcome criterion7() {
  Outcome o;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(707);
  auto pick = [&](int lo, int hi) { return static_cast<std::size_t>(std::uniform_int_distribution<int>(lo, hi)(rng)); };
  double worst = 0.0;
  std::size_t params = 0;
  for (int k = 0; k < 20; ++k) {
    net::Architecture arch;
    arch.inputs = pick(1, 3);
    arch.outputs = pick(1, 4);
    arch.lstm_hidden.assign(pick(1, 2), 0);
    for (auto& h : arch.lstm_hidden) h = pick(2, 5);
    arch.decoder_hidden.assign(pick(1, 2), 0);
    for (auto& h : arch.decoder_hidden) h = pick(2, 6);
    arch.lag = pick(1, 4);
    const net::ShredModel model(arch, rng());
    const auto [steps, targets] = testing::random_batch(arch, static_cast<Eigen::Index>(pick(1, 3)), rng);
    const auto g = testing::gradient_check(model, steps, targets);
    worst = std::max(worst, g.worst);
    params += g.checked;
  }
  const double secs = seconds_since(t0);
  o.add("worst_relative_deviation", worst);
  o.add("parameters_checked", static_cast<double>(params));
  o.pass = worst < 1e-5 && secs < 30.0;
  o.detail = "20 models, " + std::to_string(params) + " parameters, worst " + fmt("%.3e", worst) + ", " +
             fmt("%.2f", secs) + " s";
  return o;
}

pipeline::ExperimentConfig shipped(const std::string& name, const fs::path& out) {
  auto cfg = pipeline::load_config(fs::path(SHRED_SOURCE_DIR) / "configs" / name);
  cfg.output_dir = out.string();
  cfg.plots = false;
  return cfg;
}

void copy_metrics(Outcome& o, const pipeline::RunReport& r, const std::string& prefix = "") {
  for (const auto& [k, v] : r.metrics) o.add(prefix + k, v);
}

Outcome criterion8(const fs::path& out) {
  Outcome o;
  const auto t0 = Clock::now();
  const auto r = pipeline::run_experiment(shipped("parametric_shred.json", out / "parametric"));
  const double secs = seconds_since(t0);
  copy_metrics(o, r);
  const double latent = r.metric("latent_error"), fld = r.metric("field_error"), floor = r.metric("truncation_floor");
  const bool latent_ok = latent <= 0.10, field_ok = fld <= 2.0 * floor, time_ok = secs < 900.0;
  o.pass = latent_ok && field_ok && time_ok;
  o.detail = "latent " + fmt("%.4f", latent) + (latent_ok ? " <= 0.10" : " > 0.10") + "; field " +
             fmt("%.3e", fld) + (field_ok ? " <= " : " > ") + "2 x floor " + fmt("%.3e", 2.0 * floor) + "; " +
             fmt("%.0f", secs) + " s";
  return o;
}

Outcome criterion9(const fs::path& out) {
  Outcome o;
  const auto clean = pipeline::run_experiment(shipped("forecast_shred.json", out / "forecast_clean"));
  auto noisy_cfg = shipped("forecast_shred.json", out / "forecast_noisy");
  noisy_cfg.noise_sigma = 0.5;
  const auto noisy = pipeline::run_experiment(noisy_cfg);
  copy_metrics(o, clean, "clean_");
  copy_metrics(o, noisy, "noisy_");
  const double err = clean.metric("test_field_error");
  const double rms = noisy.metric("sensor_rms_vs_measurement");
  const bool clean_ok = err <= 0.15, noisy_ok = rms <= 2.0 * 0.5;
  o.pass = clean_ok && noisy_ok;
  o.detail = "clean test field error " + fmt("%.4f", err) + (clean_ok ? " <= 0.15" : " > 0.15") +
             "; noisy sensor RMS vs measurement " + fmt("%.4f", rms) + (noisy_ok ? " <= 1.0" : " > 1.0") +
             " (vs truth " + fmt("%.4f", noisy.metric("sensor_rms_vs_truth")) + ")";
  return o;
}

std::vector<Outcome> run_all(const fs::path& out, bool print) {
  const std::vector<std::function<Outcome()>> criteria{
      criterion1, criterion2, criterion3, criterion4, criterion5, criterion6, criterion7,
      [&] { return criterion8(out); }, [&] { return criterion9(out); }};
  std::vector<Outcome> results;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("error: ") + e.what();
    }
    if (print) {
      std::printf("criterion %zu: %s  %s\n", k + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str());
      std::fflush(stdout);
    }
    std::ofstream(out / ("criterion_" + std::to_string(k + 1) + ".csv"), std::ios::binary) << o.csv();
    results.push_back(std::move(o));
  }
  return results;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("acceptance_out");
  const fs::path first = root / "run1", second = root / "run2";
  fs::create_directories(first);
  fs::create_directories(second);

  const auto results = run_all(first, true);
  run_all(second, false);
  std::string mismatched;
  for (std::size_t k = 1; k <= 9; ++k) {
    const std::string name = "criterion_" + std::to_string(k) + ".csv";
    if (slurp(first / name) != slurp(second / name)) mismatched += " " + std::to_string(k);
  }
  const bool deterministic = mismatched.empty();
  std::printf("criterion 10: %s  %s\n", deterministic ? "PASS" : "FAIL",
              deterministic ? "metric CSVs of criteria 1-9 byte-identical across two runs"
                            : ("metric CSVs differ for criteria" + mismatched).c_str());

  std::size_t passed = deterministic ? 1 : 0;
  for (const auto& o : results) passed += o.pass ? 1 : 0;
  std::printf("summary: %zu/10 PASS\n", passed);
  return passed == 10 ? 0 : 1;
}
