#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "vanet/analytics.hpp"
#include "vanet/channel.hpp"

namespace vanet {

struct PhysicalCalibration {
  double speed_kmh = 0.0;
  double carrier_ghz = 0.0;
  double symbol_rate = 0.0;
  double threshold_ratio = 0.0;
  /// Explicit dt in seconds, or a rule ("default" = 1/(10 f_D), "max" = 1/(2 f_D)).
  std::variant<TimestepRule, double> timestep = TimestepRule::standard;
};

struct DirectCalibration {
  double p = 0.0;
  double q = 0.0;
  double dt = 0.0;
};

struct CalibrationEntry {
  std::string label;
  std::variant<PhysicalCalibration, DirectCalibration> source;
};

/// A calibration entry turned into a chain. `physical` is set only when the
/// entry came from channel parameters.
struct ResolvedCalibration {
  std::string label;
  MarkovLink link;
  std::optional<Calibration> physical;
};

ResolvedCalibration resolve(const CalibrationEntry& entry);

enum class ExperimentKind { link_duration, cluster_lifetime, cluster_existence, omega_stable };

std::string_view to_string(ExperimentKind kind);

struct SimulationBlock {
  std::int64_t trials = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> horizon;
};

struct Experiment {
  std::string id;
  ExperimentKind kind = ExperimentKind::link_duration;
  std::optional<ClusterSpec> cluster;
  // cluster_existence / omega_stable
  std::int64_t start = 0;
  std::int64_t first_end = 0;
  std::int64_t last_end = 0;
  std::int64_t end_step = 1;  // spacing of simulated ends for omega_stable
  std::int64_t window = 2;
  // link_duration / cluster_lifetime: analytic bins (tail tolerance 1e-9 when unset)
  std::optional<std::int64_t> max_bins;
  std::optional<SimulationBlock> simulation;
  double ci_mass_floor = 1e-4;       // bins below this analytic mass are not CI-checked
  double max_violation_rate = 0.02;  // --assert threshold

  std::vector<std::int64_t> simulated_ends() const;
};

struct Scenario {
  std::string name;
  std::string description;
  std::vector<CalibrationEntry> calibrations;
  int fleet_size = 10;
  std::optional<std::uint64_t> seed;
  std::vector<Experiment> experiments;
};

/// Parses and validates a scenario document. Every failure is an
/// ErrorCode::config error naming the offending field.
Scenario load_scenario(const nlohmann::json& doc);
Scenario load_scenario_file(const std::filesystem::path& path);

CalibrationEntry load_calibration(const nlohmann::json& doc, const std::string& field);

struct BuiltinScenario {
  std::string name;
  std::string description;
  std::string_view document;  // JSON text
};

const std::vector<BuiltinScenario>& builtin_scenarios();
std::optional<Scenario> find_builtin(std::string_view name);

}  // namespace vanet
