#include "vanet/scenario.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "vanet/error.hpp"
#include "vanet/stability.hpp"

namespace vanet {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& field, const std::string& what) {
  raise(ErrorCode::config, field + ": " + what);
}

void expect_object(const json& node, const std::string& field,
                   std::initializer_list<std::string_view> allowed) {
  if (!node.is_object()) config_error(field, "expected an object");
  const std::set<std::string_view> keys(allowed);
  for (const auto& item : node.items())
    if (!keys.contains(item.key())) config_error(field + "." + item.key(), "unknown field");
}

const json& member(const json& node, const std::string& field, const char* key) {
  if (!node.contains(key)) config_error(field + "." + key, "missing");
  return node.at(key);
}

double number(const json& node, const std::string& field, const char* key) {
  const json& v = member(node, field, key);
  if (!v.is_number()) config_error(field + "." + key, "expected a number");
  return v.get<double>();
}

std::int64_t integer(const json& node, const std::string& field, const char* key) {
  const json& v = member(node, field, key);
  if (!v.is_number_integer()) config_error(field + "." + key, "expected an integer");
  return v.get<std::int64_t>();
}

std::uint64_t seed_value(const json& node, const std::string& field, const char* key) {
  const json& v = member(node, field, key);
  if (!v.is_number_unsigned()) config_error(field + "." + key, "expected a non-negative integer");
  return v.get<std::uint64_t>();
}

// Runs a module precondition and reports its failure against `field`.
template <class Fn>
void checked(const std::string& field, Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.code() == ErrorCode::config) throw;
    config_error(field, e.what());
  }
}

std::pair<std::int64_t, std::int64_t> range(const json& node, const std::string& field,
                                            const char* key) {
  const json& v = member(node, field, key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    config_error(field + "." + key, "expected [first, last] integers");
  const auto first = v[0].get<std::int64_t>();
  const auto last = v[1].get<std::int64_t>();
  if (last < first) config_error(field + "." + key, "last precedes first");
  return {first, last};
}

ClusterSpec load_cluster(const json& node, const std::string& field, int fleet_size) {
  expect_object(node, field, {"first_car", "link_count"});
  ClusterSpec cluster{static_cast<int>(integer(node, field, "first_car")),
                      static_cast<int>(integer(node, field, "link_count")), fleet_size};
  checked(field, [&] { cluster.validate(); });
  return cluster;
}

SimulationBlock load_simulation(const json& node, const std::string& field) {
  expect_object(node, field, {"trials", "seed", "horizon"});
  SimulationBlock block;
  block.trials = integer(node, field, "trials");
  if (block.trials < 1) config_error(field + ".trials", "must be at least 1");
  if (node.contains("seed")) block.seed = seed_value(node, field, "seed");
  if (node.contains("horizon")) {
    block.horizon = integer(node, field, "horizon");
    if (*block.horizon < 1) config_error(field + ".horizon", "must be at least 1");
  }
  return block;
}

ExperimentKind parse_kind(const json& node, const std::string& field) {
  const json& v = member(node, field, "type");
  if (!v.is_string()) config_error(field + ".type", "expected a string");
  const auto name = v.get<std::string>();
  for (auto kind : {ExperimentKind::link_duration, ExperimentKind::cluster_lifetime,
                    ExperimentKind::cluster_existence, ExperimentKind::omega_stable})
    if (name == to_string(kind)) return kind;
  config_error(field + ".type", "unknown experiment type '" + name + "'");
}

Experiment load_experiment(const json& node, const std::string& field, const Scenario& scenario,
                           const std::optional<ClusterSpec>& default_cluster,
                           const std::vector<ResolvedCalibration>& chains) {
  expect_object(node, field,
                {"type", "id", "cluster", "m", "l_range", "l_step", "omega", "max_bins",
                 "simulation", "ci_mass_floor", "max_violation_rate"});
  Experiment exp;
  exp.kind = parse_kind(node, field);
  exp.id = node.contains("id") ? node.at("id").get<std::string>() : std::string(to_string(exp.kind));
  if (exp.id.empty() || exp.id.find_first_of("/\\") != std::string::npos)
    config_error(field + ".id", "must be a non-empty file-name-safe string");

  const bool needs_cluster = exp.kind == ExperimentKind::cluster_lifetime ||
                             exp.kind == ExperimentKind::cluster_existence;
  if (node.contains("cluster"))
    exp.cluster = load_cluster(node.at("cluster"), field + ".cluster", scenario.fleet_size);
  else if (needs_cluster)
    exp.cluster = default_cluster;
  if (needs_cluster && !exp.cluster) config_error(field + ".cluster", "missing");

  if (node.contains("max_bins")) {
    exp.max_bins = integer(node, field, "max_bins");
    if (*exp.max_bins < 1) config_error(field + ".max_bins", "must be at least 1");
  }
  if (node.contains("simulation"))
    exp.simulation = load_simulation(node.at("simulation"), field + ".simulation");
  if (node.contains("ci_mass_floor")) exp.ci_mass_floor = number(node, field, "ci_mass_floor");
  if (node.contains("max_violation_rate")) {
    exp.max_violation_rate = number(node, field, "max_violation_rate");
    if (exp.max_violation_rate < 0.0 || exp.max_violation_rate > 1.0)
      config_error(field + ".max_violation_rate", "must lie in [0, 1]");
  }

  switch (exp.kind) {
    case ExperimentKind::link_duration:
      for (const auto& chain : chains)
        checked(field, [&] { link_duration_moments(chain.link); });
      break;
    case ExperimentKind::cluster_lifetime:
      for (const auto& chain : chains)
        checked(field, [&] { cluster_lifetime_moments(chain.link, *exp.cluster); });
      break;
    case ExperimentKind::cluster_existence: {
      exp.start = integer(node, field, "m");
      std::tie(exp.first_end, exp.last_end) = range(node, field, "l_range");
      for (const auto& chain : chains)
        checked(field, [&] {
          cluster_existence_prob(chain.link, *exp.cluster, exp.start, exp.first_end);
        });
      break;
    }
    case ExperimentKind::omega_stable: {
      exp.start = integer(node, field, "m");
      exp.window = integer(node, field, "omega");
      std::tie(exp.first_end, exp.last_end) = range(node, field, "l_range");
      if (node.contains("l_step")) exp.end_step = integer(node, field, "l_step");
      if (exp.end_step < 1) config_error(field + ".l_step", "must be at least 1");
      checked(field, [&] { StabilityQuery{exp.start, exp.first_end, exp.window}.validate(); });
      for (const auto& chain : chains)
        if (chain.link.q() <= 0.0) config_error(field, "omega_stable needs q > 0");
      break;
    }
  }
  return exp;
}

}  // namespace

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::link_duration: return "link_duration";
    case ExperimentKind::cluster_lifetime: return "cluster_lifetime";
    case ExperimentKind::cluster_existence: return "cluster_existence";
    case ExperimentKind::omega_stable: return "omega_stable";
  }
  return "unknown";
}

std::vector<std::int64_t> Experiment::simulated_ends() const {
  std::vector<std::int64_t> ends;
  const std::int64_t step = kind == ExperimentKind::omega_stable ? end_step : 1;
  for (std::int64_t l = first_end; l <= last_end; l += step) ends.push_back(l);
  return ends;
}

CalibrationEntry load_calibration(const json& node, const std::string& field) {
  expect_object(node, field, {"label", "physical", "direct", "derived"});
  CalibrationEntry entry;
  if (node.contains("label")) {
    if (!node.at("label").is_string()) config_error(field + ".label", "expected a string");
    entry.label = node.at("label").get<std::string>();
  }
  const bool physical = node.contains("physical");
  const bool direct = node.contains("direct");
  if (physical == direct)
    config_error(field, "exactly one of 'physical' or 'direct' must be present");

  if (direct) {
    const std::string sub = field + ".direct";
    const json& d = node.at("direct");
    expect_object(d, sub, {"p", "q", "dt"});
    entry.source = DirectCalibration{number(d, sub, "p"), number(d, sub, "q"), number(d, sub, "dt")};
  } else {
    const std::string sub = field + ".physical";
    const json& d = node.at("physical");
    expect_object(d, sub, {"speed_kmh", "carrier_ghz", "symbol_rate", "threshold_ratio", "timestep"});
    PhysicalCalibration phys{number(d, sub, "speed_kmh"), number(d, sub, "carrier_ghz"),
                             number(d, sub, "symbol_rate"), number(d, sub, "threshold_ratio")};
    if (d.contains("timestep")) {
      const json& t = d.at("timestep");
      if (t.is_number()) {
        phys.timestep = t.get<double>();
      } else if (t == "default") {
        phys.timestep = TimestepRule::standard;
      } else if (t == "max") {
        phys.timestep = TimestepRule::nyquist_limit;
      } else {
        config_error(sub + ".timestep", "expected seconds, \"default\" or \"max\"");
      }
    }
    entry.source = phys;
  }
  checked(field, [&] { resolve(entry); });
  return entry;
}

ResolvedCalibration resolve(const CalibrationEntry& entry) {
  if (const auto* d = std::get_if<DirectCalibration>(&entry.source))
    return {entry.label, MarkovLink(d->p, d->q, d->dt), std::nullopt};
  const auto& phys = std::get<PhysicalCalibration>(entry.source);
  const ChannelSpec spec = ChannelSpec::from_road_units(phys.speed_kmh, phys.carrier_ghz,
                                                        phys.symbol_rate, phys.threshold_ratio);
  Calibration cal = std::holds_alternative<double>(phys.timestep)
                        ? calibrate(spec, std::get<double>(phys.timestep))
                        : calibrate(spec, std::nullopt, std::get<TimestepRule>(phys.timestep));
  return {entry.label, cal.link, cal};
}

Scenario load_scenario(const json& doc) {
  expect_object(doc, "scenario",
                {"name", "description", "calibration", "fleet_size", "cluster", "seed",
                 "experiments"});
  Scenario scenario;
  scenario.name = doc.value("name", std::string("scenario"));
  scenario.description = doc.value("description", std::string());
  if (doc.contains("fleet_size")) {
    scenario.fleet_size = static_cast<int>(integer(doc, "scenario", "fleet_size"));
    if (scenario.fleet_size < 2) config_error("scenario.fleet_size", "must be at least 2");
  }
  if (doc.contains("seed")) scenario.seed = seed_value(doc, "scenario", "seed");

  const json& cal = member(doc, "scenario", "calibration");
  if (cal.is_array()) {
    if (cal.empty()) config_error("scenario.calibration", "empty list");
    for (std::size_t i = 0; i < cal.size(); ++i)
      scenario.calibrations.push_back(
          load_calibration(cal[i], "scenario.calibration[" + std::to_string(i) + "]"));
  } else {
    scenario.calibrations.push_back(load_calibration(cal, "scenario.calibration"));
  }
  std::set<std::string> labels;
  for (auto& entry : scenario.calibrations) {
    if (entry.label.empty() && scenario.calibrations.size() > 1)
      config_error("scenario.calibration", "entries need distinct labels when several are given");
    if (!labels.insert(entry.label).second)
      config_error("scenario.calibration", "duplicate label '" + entry.label + "'");
  }
  std::vector<ResolvedCalibration> chains;
  for (const auto& entry : scenario.calibrations) chains.push_back(resolve(entry));

  std::optional<ClusterSpec> cluster;
  if (doc.contains("cluster"))
    cluster = load_cluster(doc.at("cluster"), "scenario.cluster", scenario.fleet_size);

  const json& exps = member(doc, "scenario", "experiments");
  if (!exps.is_array()) config_error("scenario.experiments", "expected an array");
  if (exps.empty()) config_error("scenario.experiments", "no experiments listed");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    const std::string field = "scenario.experiments[" + std::to_string(i) + "]";
    Experiment exp = load_experiment(exps[i], field, scenario, cluster, chains);
    if (!ids.insert(exp.id).second) config_error(field + ".id", "duplicate id '" + exp.id + "'");
    scenario.experiments.push_back(std::move(exp));
  }
  return scenario;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) raise(ErrorCode::config, path.string() + ": cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::config, path.string() + ": " + e.what());
  }
  return load_scenario(doc);
}

namespace {

constexpr std::string_view kSec6 = R"({
  "name": "paper-sec6",
  "description": "Physical calibration at 30/60/90 km/h, 3.9 GHz, 1e5 symbol/s, threshold ratio 0.1",
  "calibration": [
    {"label": "v30", "physical": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}},
    {"label": "v60", "physical": {"speed_kmh": 60, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}},
    {"label": "v90", "physical": {"speed_kmh": 90, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}}
  ],
  "fleet_size": 10,
  "experiments": [{"type": "link_duration", "max_bins": 1000}]
})";

constexpr std::string_view kFig3 = R"({
  "name": "paper-fig3",
  "description": "Link-duration pmf for the calibrated chains at 30/60/90 km/h",
  "calibration": [
    {"label": "v30", "physical": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}},
    {"label": "v60", "physical": {"speed_kmh": 60, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}},
    {"label": "v90", "physical": {"speed_kmh": 90, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}}
  ],
  "fleet_size": 10,
  "experiments": [{"type": "link_duration", "max_bins": 5000}]
})";

constexpr std::string_view kFig4 = R"({
  "name": "paper-fig4",
  "description": "Lifetime pmf of the cluster of cars 2-3-4 (n = 10) at 30/60/90 km/h",
  "calibration": [
    {"label": "v30", "physical": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}},
    {"label": "v60", "physical": {"speed_kmh": 60, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}},
    {"label": "v90", "physical": {"speed_kmh": 90, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}}
  ],
  "fleet_size": 10,
  "cluster": {"first_car": 2, "link_count": 2},
  "experiments": [{"type": "cluster_lifetime", "max_bins": 2000}]
})";

constexpr std::string_view kFig5 = R"({
  "name": "paper-fig5",
  "description": "Existence of the cluster of cars 2-3-4 between steps 2 and l at 30/60/90 km/h",
  "calibration": [
    {"label": "v30", "physical": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}},
    {"label": "v60", "physical": {"speed_kmh": 60, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}},
    {"label": "v90", "physical": {"speed_kmh": 90, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}}
  ],
  "fleet_size": 10,
  "cluster": {"first_car": 2, "link_count": 2},
  "experiments": [{"type": "cluster_existence", "m": 2, "l_range": [2, 2000]}]
})";

constexpr std::string_view kFig6 = R"({
  "name": "paper-fig6",
  "description": "3-stable connection from step 2, calibrated 30 km/h chain, 5e4 simulated trials",
  "calibration": {"label": "v30", "physical": {"speed_kmh": 30, "carrier_ghz": 3.9, "symbol_rate": 1e5, "threshold_ratio": 0.1}},
  "fleet_size": 10,
  "experiments": [{
    "type": "omega_stable", "m": 2, "omega": 3, "l_range": [5, 1005], "l_step": 100,
    "max_violation_rate": 0.0,
    "simulation": {"trials": 50000}
  }]
})";

constexpr std::string_view kFig7 = R"({
  "name": "paper-fig7",
  "description": "Link-duration pmf vs simulation, p = q = 0.02, dt = 0.01 s, 1e5 trials",
  "calibration": {"direct": {"p": 0.02, "q": 0.02, "dt": 0.01}},
  "fleet_size": 10,
  "experiments": [{"type": "link_duration", "simulation": {"trials": 100000}}]
})";

constexpr std::string_view kFig8 = R"({
  "name": "paper-fig8",
  "description": "Lifetime pmf of the cluster of cars 2-3-4 vs simulation, p = q = 0.02, 1e5 trials",
  "calibration": {"direct": {"p": 0.02, "q": 0.02, "dt": 0.01}},
  "fleet_size": 10,
  "cluster": {"first_car": 2, "link_count": 2},
  "experiments": [{"type": "cluster_lifetime", "simulation": {"trials": 100000}}]
})";

constexpr std::string_view kFig9 = R"({
  "name": "paper-fig9",
  "description": "Existence of the cluster of cars 2-3-4 between steps 15 and l = 15..30, p = q = 0.05, 1e6 trials",
  "calibration": {"direct": {"p": 0.05, "q": 0.05, "dt": 0.01}},
  "fleet_size": 10,
  "cluster": {"first_car": 2, "link_count": 2},
  "experiments": [{
    "type": "cluster_existence", "m": 15, "l_range": [15, 30],
    "ci_mass_floor": 0.0, "max_violation_rate": 0.125,
    "simulation": {"trials": 1000000}
  }]
})";

}  // namespace

const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> all = [] {
    std::vector<BuiltinScenario> out;
    for (std::string_view doc : {kSec6, kFig3, kFig4, kFig5, kFig6, kFig7, kFig8, kFig9}) {
      const json parsed = json::parse(doc);
      out.push_back({parsed.at("name").get<std::string>(),
                     parsed.at("description").get<std::string>(), doc});
    }
    return out;
  }();
  return all;
}

std::optional<Scenario> find_builtin(std::string_view name) {
  for (const auto& b : builtin_scenarios())
    if (b.name == name) return load_scenario(json::parse(b.document));
  return std::nullopt;
}

}  // namespace vanet
