// vanet-chain: calibrate two-state link chains, evaluate the closed-form
// platoon connectivity distributions and check them against Monte Carlo.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>
#include <json.hpp>

#include "vanet/error.hpp"
#include "vanet/runner.hpp"
#include "vanet/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitComparison = 3;

bool is_config_error(vanet::ErrorCode code) {
  using vanet::ErrorCode;
  switch (code) {
    case ErrorCode::config:
    case ErrorCode::invalid_argument:
    case ErrorCode::out_of_range:
    case ErrorCode::nyquist_violation:
    case ErrorCode::bad_interval:
    case ErrorCode::bad_window:
    case ErrorCode::degenerate_chain:
      return true;
    default:
      return false;
  }
}

int run_command(const std::string& target, const vanet::RunOptions& options, bool assert_mode) {
  vanet::Scenario scenario;
  if (auto builtin = vanet::find_builtin(target))
    scenario = std::move(*builtin);
  else
    scenario = vanet::load_scenario_file(target);

  const vanet::RunResult result = vanet::run_scenario(scenario, options);
  for (const auto& o : result.outcomes) {
    std::string line = fmt::format("{:<18} {:<6} {:<18}", o.id, o.label, vanet::to_string(o.kind));
    if (o.report) {
      line += fmt::format(" ci_violations {}/{} ({:.2f}% <= {:.2f}%) tv {:.3g}",
                          o.report->ci_violations, o.report->bins_compared,
                          100.0 * o.report->violation_rate(), 100.0 * o.max_violation_rate,
                          o.report->total_variation);
      if (o.mean_z_score)
        line += fmt::format(" mean {:.6g}s vs {:.6g}s (z {:+.2f})", *o.empirical_mean_seconds,
                            *o.analytic_mean_seconds, *o.mean_z_score);
      line += o.passed() ? "  ok" : "  FAIL";
    } else {
      line += " analytic only";
    }
    std::cout << line << "\n";
  }
  std::cout << "wrote " << result.files.size() << " files to " << options.output_dir.string()
            << "\n";
  if (assert_mode && !result.comparisons_passed()) return kExitComparison;
  return kExitOk;
}

int calibrate_command(const std::vector<double>& speeds, double carrier_ghz, double symbol_rate,
                      double threshold_ratio, std::optional<double> dt, bool as_json) {
  nlohmann::json doc = nlohmann::json::array();
  std::vector<std::pair<std::string, vanet::Calibration>> rows;
  for (double speed : speeds) {
    const auto spec =
        vanet::ChannelSpec::from_road_units(speed, carrier_ghz, symbol_rate, threshold_ratio);
    const std::string label = fmt::format("v{:g}", speed);
    rows.emplace_back(label, vanet::calibrate(spec, dt));
  }
  if (as_json) {
    for (const auto& [label, cal] : rows) doc.push_back(vanet::calibration_json(label, cal));
    std::cout << (doc.size() == 1 ? doc[0] : doc).dump(2) << "\n";
    return kExitOk;
  }
  std::cout << fmt::format("{:>10} {:>12} {:>12} {:>12} {:>12} {:>12} {:>8}\n", "speed_kmh",
                           "f_D_hz", "dt_max_s", "dt_s", "p", "q", "p_G");
  for (const auto& [label, cal] : rows)
    std::cout << fmt::format("{:>10.4g} {:>12.5g} {:>12.4g} {:>12.4g} {:>12.4g} {:>12.4g} {:>8.4f}\n",
                             cal.spec.speed * 3.6, cal.doppler, cal.dt_max, cal.link.dt(),
                             cal.link.p(), cal.link.q(), cal.link.p_good());
  return kExitOk;
}

int list_command(bool as_json) {
  if (as_json) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& b : vanet::builtin_scenarios())
      doc.push_back({{"name", b.name}, {"description", b.description},
                     {"scenario", nlohmann::json::parse(b.document)}});
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
  }
  for (const auto& b : vanet::builtin_scenarios())
    std::cout << fmt::format("{:<12} {}\n", b.name, b.description);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connectivity evolution of a vehicle platoon over two-state Markov links"};
  app.set_version_flag("--version", std::string(vanet::kToolVersion));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario file or a built-in scenario");
  std::string target;
  vanet::RunOptions options;
  std::string output = "out";
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> trials;
  bool assert_mode = false;
  bool analytic_only = false;
  run->add_option("scenario", target, "Scenario JSON path or built-in name")->required();
  run->add_option("-o,--output", output, "Output directory")->capture_default_str();
  run->add_option("--seed", seed, "Simulation seed (default: scenario, then $VANET_CHAIN_SEED)");
  run->add_option("--trials", trials, "Override the trial count of every simulation")
      ->check(CLI::PositiveNumber);
  run->add_option("--threads", options.threads, "Simulation worker threads (0 = all)")
      ->check(CLI::NonNegativeNumber);
  run->add_flag("--assert", assert_mode, "Exit 3 when a comparison exceeds its violation rate");
  run->add_flag("--analytic-only", analytic_only, "Skip every simulation block");

  auto* cal = app.add_subcommand("calibrate", "Derive f_D, dt, p, q from channel parameters");
  std::vector<double> speeds;
  double carrier_ghz = 3.9;
  double symbol_rate = 1e5;
  double threshold_ratio = 0.1;
  std::optional<double> dt;
  bool cal_json = false;
  cal->add_option("--speed", speeds, "Vehicle speed(s) in km/h")->required()->expected(1, -1);
  cal->add_option("--carrier", carrier_ghz, "Carrier frequency in GHz")->capture_default_str();
  cal->add_option("--symbol-rate", symbol_rate, "Symbol rate in symbols/s")->capture_default_str();
  cal->add_option("--threshold-ratio", threshold_ratio, "Threshold over mean SNR")
      ->capture_default_str();
  cal->add_option("--timestep", dt, "Explicit timestep in seconds (default 1/(10 f_D))");
  cal->add_flag("--json", cal_json, "Emit JSON loadable as a scenario calibration");

  auto* list = app.add_subcommand("list-scenarios", "List the built-in scenarios");
  bool list_json = false;
  list->add_flag("--json", list_json, "Emit the full scenario documents");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) {
      options.output_dir = output;
      options.seed = seed;
      options.trials = trials;
      options.simulate = !analytic_only;
      return run_command(target, options, assert_mode);
    }
    if (*cal) return calibrate_command(speeds, carrier_ghz, symbol_rate, threshold_ratio, dt, cal_json);
    if (*list) return list_command(list_json);
  } catch (const vanet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_config_error(e.code()) ? kExitConfig : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
