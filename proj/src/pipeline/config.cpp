#include "shred/pipeline/config.hpp"

#include <cstdio>
#include <fstream>

#include "shred/errors.hpp"
#include "shred/pipeline/json_schema.hpp"

namespace shred::pipeline {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<Scenario, const char*>, 7> kScenarioNames{{
    {Scenario::linear_exact, "linear_exact"},
    {Scenario::multi_sensor, "multi_sensor"},
    {Scenario::mobile, "mobile"},
    {Scenario::coupled, "coupled"},
    {Scenario::nonlinear_galerkin, "nonlinear_galerkin"},
    {Scenario::parametric_shred, "parametric_shred"},
    {Scenario::forecast_shred, "forecast_shred"},
}};

template <class T>
void read(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

template <class T>
void read(const json& obj, const char* key, std::optional<T>& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

}  // namespace

std::string to_string(Scenario s) {
  for (const auto& [value, name] : kScenarioNames)
    if (value == s) return name;
  throw ConfigError("unknown scenario value");
}

Scenario scenario_from_string(const std::string& name) {
  for (const auto& [value, n] : kScenarioNames)
    if (name == n) return value;
  throw ConfigError("unknown scenario '" + name + "'");
}

OperatorSpec make_operator(const std::vector<double>& coefficients) {
  return OperatorSpec(std::vector<cplx>(coefficients.begin(), coefficients.end()));
}

ExperimentConfig parse_config(const json& doc) {
  const auto errors = validate_schema(doc, experiment_schema());
  if (!errors.empty()) {
    std::string msg = "invalid config: " + errors.front();
    for (std::size_t i = 1; i < errors.size(); ++i) msg += "; " + errors[i];
    throw ConfigError(msg);
  }

  ExperimentConfig c;
  c.scenario = scenario_from_string(doc.at("scenario").get<std::string>());
  read(doc, "seed", c.seed);
  read(doc, "output_dir", c.output_dir);
  read(doc, "workers", c.workers);
  read(doc, "plots", c.plots);

  const json& pde = doc.at("pde");
  c.pde.boundary = boundary_from_string(pde.at("boundary").get<std::string>());
  c.pde.length = pde.at("length").get<double>();
  c.pde.grid_points = pde.at("grid_points").get<std::size_t>();
  c.pde.num_modes = pde.at("num_modes").get<std::size_t>();
  read(pde, "operator", c.pde.op);
  read(pde, "nu", c.pde.nu);
  if (auto it = pde.find("coupled"); it != pde.end())
    c.pde.coupled = std::array<std::vector<double>, 4>{
        it->at("op1").get<std::vector<double>>(), it->at("op2").get<std::vector<double>>(),
        it->at("op3").get<std::vector<double>>(), it->at("op4").get<std::vector<double>>()};

  if (auto it = doc.find("initial_condition"); it != doc.end()) {
    read(*it, "amplitude", c.initial_condition.amplitude);
    read(*it, "decay", c.initial_condition.decay);
  }

  const json& time = doc.at("time");
  c.time.start = time.at("start").get<double>();
  c.time.end = time.at("end").get<double>();
  c.time.count = time.at("count").get<std::size_t>();
  read(time, "dt_internal", c.time.dt_internal);
  if (!(c.time.end > c.time.start) && c.time.count > 1) throw ConfigError("/time: end must exceed start");

  if (auto it = doc.find("measurement"); it != doc.end()) {
    read(*it, "start", c.measurement.start);
    read(*it, "end", c.measurement.end);
    read(*it, "count", c.measurement.count);
    if (c.measurement.start.has_value() != c.measurement.end.has_value())
      throw ConfigError("/measurement: start and end must be given together");
  }

  if (auto it = doc.find("sensors"); it != doc.end()) {
    read(*it, "locations", c.sensors.locations);
    read(*it, "mobile_path", c.sensors.mobile_path);
    read(*it, "random_mobile", c.sensors.random_mobile);
    read(*it, "num_sensors", c.sensors.num_sensors);
    read(*it, "num_configs", c.sensors.num_configs);
  }

  read(doc, "noise_sigma", c.noise_sigma);
  read(doc, "svd_rank", c.svd_rank);
  read(doc, "parameters", c.parameters);

  if (auto it = doc.find("network"); it != doc.end()) {
    read(*it, "lstm_hidden", c.network.lstm_hidden);
    read(*it, "decoder_hidden", c.network.decoder_hidden);
    read(*it, "lag", c.network.lag);
  }
  if (auto it = doc.find("train"); it != doc.end()) {
    read(*it, "learning_rate", c.train.learning_rate);
    read(*it, "batch_size", c.train.batch_size);
    read(*it, "max_epochs", c.train.max_epochs);
    read(*it, "patience", c.train.patience);
    read(*it, "validation_fraction", c.train.validation_fraction);
  }
  c.train.seed = c.seed;
  try {
    c.train.validate();
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("/train: ") + e.what());
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json pde = {{"boundary", to_string(c.pde.boundary)},
              {"length", c.pde.length},
              {"grid_points", c.pde.grid_points},
              {"num_modes", c.pde.num_modes},
              {"operator", c.pde.op}};
  if (c.pde.nu) pde["nu"] = *c.pde.nu;
  if (c.pde.coupled)
    pde["coupled"] = {{"op1", (*c.pde.coupled)[0]},
                      {"op2", (*c.pde.coupled)[1]},
                      {"op3", (*c.pde.coupled)[2]},
                      {"op4", (*c.pde.coupled)[3]}};

  json time = {{"start", c.time.start}, {"end", c.time.end}, {"count", c.time.count}};
  if (c.time.dt_internal) time["dt_internal"] = *c.time.dt_internal;

  json measurement = json::object();
  if (c.measurement.start) measurement["start"] = *c.measurement.start;
  if (c.measurement.end) measurement["end"] = *c.measurement.end;
  if (c.measurement.count) measurement["count"] = *c.measurement.count;

  json sensors = {{"locations", c.sensors.locations},
                  {"mobile_path", c.sensors.mobile_path},
                  {"random_mobile", c.sensors.random_mobile}};
  if (c.sensors.num_sensors) sensors["num_sensors"] = *c.sensors.num_sensors;
  if (c.sensors.num_configs) sensors["num_configs"] = *c.sensors.num_configs;

  json doc{{"scenario", to_string(c.scenario)},
              {"seed", c.seed},
              {"output_dir", c.output_dir},
              {"workers", c.workers},
              {"plots", c.plots},
              {"pde", pde},
              {"initial_condition", {{"amplitude", c.initial_condition.amplitude}, {"decay", c.initial_condition.decay}}},
              {"time", time},
              {"measurement", measurement},
              {"sensors", sensors},
              {"noise_sigma", c.noise_sigma},
              {"svd_rank", c.svd_rank},
              {"network",
               {{"lstm_hidden", c.network.lstm_hidden},
                {"decoder_hidden", c.network.decoder_hidden},
                {"lag", c.network.lag}}},
              {"train",
               {{"learning_rate", c.train.learning_rate},
                {"batch_size", c.train.batch_size},
                {"max_epochs", c.train.max_epochs},
                {"patience", c.train.patience},
                {"validation_fraction", c.train.validation_fraction}}}};
  if (!c.parameters.empty()) doc["parameters"] = c.parameters;
  return doc;
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace shred::pipeline
