#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vanet/scenario.hpp"
#include "vanet/stats.hpp"

namespace vanet {

inline constexpr std::string_view kToolName = "vanet-chain";
inline constexpr std::string_view kToolVersion = "1.0.0";
inline constexpr std::uint64_t kDefaultSeed = 20190401;
inline constexpr const char* kSeedEnvVar = "VANET_CHAIN_SEED";

struct RunOptions {
  std::filesystem::path output_dir;
  std::optional<std::uint64_t> seed;    // overrides everything else
  std::optional<std::int64_t> trials;   // overrides every simulation block
  int threads = 0;
  bool simulate = true;
};

struct ExperimentOutcome {
  std::string id;
  std::string label;
  ExperimentKind kind = ExperimentKind::link_duration;
  std::optional<ComparisonReport> report;
  double max_violation_rate = 0.0;
  // link_duration / cluster_lifetime only
  std::optional<double> analytic_mean_seconds;
  std::optional<double> empirical_mean_seconds;
  std::optional<double> mean_z_score;

  bool passed() const;
};

struct RunResult {
  std::vector<ExperimentOutcome> outcomes;
  std::vector<std::filesystem::path> files;

  bool comparisons_passed() const;
};

/// Seed precedence: options.seed, then the experiment's simulation block,
/// then the scenario, then $VANET_CHAIN_SEED, then kDefaultSeed.
std::uint64_t effective_seed(const Scenario& scenario, const Experiment& exp,
                             const RunOptions& options);

/// Evaluates every experiment for every calibration and writes
///   <id>[-<label>].analytic.csv, <id>[-<label>].empirical.csv,
///   <id>[-<label>].report.json and run.json
/// into options.output_dir.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

/// Calibration summary as written by `calibrate --json`; loads back through
/// load_calibration as a direct calibration.
nlohmann::json calibration_json(const std::string& label, const Calibration& cal);

}  // namespace vanet
