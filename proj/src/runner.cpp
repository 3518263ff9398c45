#include "vanet/runner.hpp"

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>
#include <fstream>

#include "vanet/error.hpp"
#include "vanet/simulator.hpp"
#include "vanet/stability.hpp"

namespace vanet {

using nlohmann::json;
namespace fs = std::filesystem;

bool ExperimentOutcome::passed() const {
  return !report || report->violation_rate() <= max_violation_rate;
}

bool RunResult::comparisons_passed() const {
  for (const auto& o : outcomes)
    if (!o.passed()) return false;
  return true;
}

std::uint64_t effective_seed(const Scenario& scenario, const Experiment& exp,
                             const RunOptions& options) {
  if (options.seed) return *options.seed;
  if (exp.simulation && exp.simulation->seed) return *exp.simulation->seed;
  if (scenario.seed) return *scenario.seed;
  if (const char* env = std::getenv(kSeedEnvVar); env && *env) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    require(end && *end == '\0', ErrorCode::config,
            std::string(kSeedEnvVar) + " is not an unsigned integer");
    return value;
  }
  return kDefaultSeed;
}

json calibration_json(const std::string& label, const Calibration& cal) {
  const MarkovLink& link = cal.link;
  json out;
  if (!label.empty()) out["label"] = label;
  out["direct"] = {{"p", link.p()}, {"q", link.q()}, {"dt", link.dt()}};
  out["derived"] = {{"speed_kmh", cal.spec.speed * 3.6},
                    {"carrier_ghz", cal.spec.carrier_freq / 1e9},
                    {"symbol_rate", cal.spec.symbol_rate},
                    {"threshold_ratio", cal.spec.threshold_ratio},
                    {"doppler_hz", cal.doppler},
                    {"dt_max", cal.dt_max},
                    {"dt_default", cal.dt_default},
                    {"p_good", link.p_good()}};
  return out;
}

namespace {

struct CurveRow {
  std::int64_t index;
  double probability;
};

std::string fmt_num(double x) { return fmt::format("{:.12g}", x); }

class OutputWriter {
public:
  explicit OutputWriter(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    require(!ec && fs::is_directory(dir_), ErrorCode::invalid_argument,
            "cannot create output directory " + dir_.string());
  }

  void write(const std::string& name, const std::string& content) {
    const fs::path path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    require(static_cast<bool>(out), ErrorCode::invalid_argument,
            "cannot write " + path.string());
    out << content;
    files_.push_back(path);
  }

  std::vector<fs::path> files() const { return files_; }

private:
  fs::path dir_;
  std::vector<fs::path> files_;
};

std::string analytic_csv(const std::vector<CurveRow>& rows, double dt) {
  std::string out = "index,time_s,probability,log10_probability\n";
  for (const auto& r : rows) {
    const std::string log_cell = r.probability > 0.0 ? fmt_num(std::log10(r.probability)) : "";
    out += fmt::format("{},{},{},{}\n", r.index, fmt_num(static_cast<double>(r.index) * dt),
                       fmt_num(r.probability), log_cell);
  }
  return out;
}

std::string empirical_csv(const std::vector<std::int64_t>& index,
                          const std::vector<std::uint64_t>& counts, std::uint64_t total,
                          double dt, double confidence) {
  std::string out = "index,time_s,count,frequency,ci_low,ci_high\n";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const Interval ci = wilson_interval(counts[i], total, confidence);
    out += fmt::format("{},{},{},{},{},{}\n", index[i],
                       fmt_num(static_cast<double>(index[i]) * dt), counts[i],
                       fmt_num(static_cast<double>(counts[i]) / static_cast<double>(total)),
                       fmt_num(ci.low), fmt_num(ci.high));
  }
  return out;
}

json report_json(const ComparisonReport& r) {
  return {{"max_abs_error", r.max_abs_error},
          {"max_rel_error", r.max_rel_error},
          {"total_variation", r.total_variation},
          {"bins_compared", r.bins_compared},
          {"ci_violations", r.ci_violations},
          {"violation_rate", r.violation_rate()}};
}

std::vector<CurveRow> pmf_rows(const Pmf& pmf) {
  std::vector<CurveRow> rows;
  rows.reserve(pmf.size());
  for (std::int64_t i = pmf.support_start; i < pmf.support_end(); ++i) rows.push_back({i, pmf.at(i)});
  return rows;
}

struct ExperimentContext {
  const Scenario& scenario;
  const Experiment& exp;
  const ResolvedCalibration& chain;
  const RunOptions& options;
  std::string prefix;
  OutputWriter& writer;
  json& manifest_entry;
};

std::optional<SimConfig> sim_config(const ExperimentContext& ctx, std::int64_t default_horizon) {
  if (!ctx.options.simulate || !ctx.exp.simulation) return std::nullopt;
  const SimulationBlock& block = *ctx.exp.simulation;
  SimConfig config{.fleet_size = ctx.scenario.fleet_size,
                   .link = ctx.chain.link,
                   .horizon = block.horizon.value_or(default_horizon),
                   .trials = ctx.options.trials.value_or(block.trials),
                   .seed = effective_seed(ctx.scenario, ctx.exp, ctx.options)};
  config.validate();
  ctx.manifest_entry["simulation"] = {{"trials", config.trials},
                                      {"seed", config.seed},
                                      {"horizon", config.horizon}};
  return config;
}

void run_episode_experiment(const ExperimentContext& ctx, ExperimentOutcome& outcome) {
  const bool is_cluster = ctx.exp.kind == ExperimentKind::cluster_lifetime;
  const MarkovLink& link = ctx.chain.link;
  const Truncation rule = ctx.exp.max_bins ? Truncation{FixedHorizon{*ctx.exp.max_bins}}
                                           : Truncation{TailTolerance{kDefaultTailTolerance}};
  const Pmf analytic = is_cluster ? cluster_lifetime_distribution(link, *ctx.exp.cluster, rule)
                                  : link_duration_distribution(link, rule);
  const Moments moments = is_cluster ? cluster_lifetime_moments(link, *ctx.exp.cluster)
                                     : link_duration_moments(link);
  ctx.writer.write(ctx.prefix + ".analytic.csv", analytic_csv(pmf_rows(analytic), link.dt()));
  outcome.analytic_mean_seconds = moments.mean;

  json report = {{"analytic", {{"mean_s", moments.mean},
                               {"variance_s2", moments.variance},
                               {"bins", analytic.size()},
                               {"tail_mass", analytic.tail_mass}}}};

  const auto config = sim_config(ctx, is_cluster ? default_cluster_horizon(link, *ctx.exp.cluster)
                                                 : default_link_horizon(link));
  if (config) {
    const Parallelism par{ctx.options.threads};
    const EpisodeHistogram hist = is_cluster
                                      ? estimate_cluster_lifetime(*config, *ctx.exp.cluster, par)
                                      : estimate_link_duration(*config, par);
    std::vector<std::int64_t> index(hist.counts.size());
    for (std::size_t i = 0; i < index.size(); ++i) index[i] = static_cast<std::int64_t>(i + 1);
    ctx.writer.write(ctx.prefix + ".empirical.csv",
                     empirical_csv(index, hist.counts, hist.episodes, link.dt(), 0.99));

    CompareOptions opts;
    opts.ci_floor = ctx.exp.ci_mass_floor;
    const ComparisonReport cmp = compare_pmf(analytic, hist.to_pmf(), hist.episodes, opts);
    outcome.report = cmp;
    const double mean = hist.mean_steps() * link.dt();
    const double stderr_s = hist.mean_stderr_steps() * link.dt();
    outcome.empirical_mean_seconds = mean;
    outcome.mean_z_score = compare_scalar(moments.mean, mean, stderr_s);
    report["empirical"] = {{"episodes", hist.episodes},
                           {"discarded_initial", hist.discarded_initial},
                           {"mean_s", mean},
                           {"mean_stderr_s", stderr_s},
                           {"mean_z_score", *outcome.mean_z_score}};
    report["comparison"] = report_json(cmp);
  }
  outcome.max_violation_rate = ctx.exp.max_violation_rate;
  report["passed"] = outcome.passed();
  report["max_violation_rate"] = ctx.exp.max_violation_rate;
  ctx.writer.write(ctx.prefix + ".report.json", report.dump(2) + "\n");
}

void run_interval_experiment(const ExperimentContext& ctx, ExperimentOutcome& outcome) {
  const bool is_cluster = ctx.exp.kind == ExperimentKind::cluster_existence;
  const MarkovLink& link = ctx.chain.link;
  const Experiment& exp = ctx.exp;

  std::vector<double> curve;
  if (is_cluster) {
    for (std::int64_t l = exp.first_end; l <= exp.last_end; ++l)
      curve.push_back(cluster_existence_prob(link, *exp.cluster, exp.start, l));
  } else {
    curve = omega_stable_curve(link, exp.start, exp.window, exp.first_end, exp.last_end);
  }
  std::vector<CurveRow> rows;
  for (std::size_t i = 0; i < curve.size(); ++i)
    rows.push_back({exp.first_end + static_cast<std::int64_t>(i), curve[i]});
  ctx.writer.write(ctx.prefix + ".analytic.csv", analytic_csv(rows, link.dt()));

  json report = {{"analytic", {{"points", curve.size()}}}};
  const std::int64_t horizon = exp.last_end + 2;
  if (const auto config = sim_config(ctx, horizon)) {
    const Parallelism par{ctx.options.threads};
    const std::vector<std::int64_t> ends = exp.simulated_ends();
    const IntervalCounts counts =
        is_cluster ? estimate_cluster_existence(*config, *exp.cluster, exp.start, exp.first_end,
                                                exp.last_end, par)
                   : estimate_omega_stable(*config, exp.start, exp.window, ends, par);
    ctx.writer.write(ctx.prefix + ".empirical.csv",
                     empirical_csv(counts.ends, counts.counts, counts.trials, link.dt(), 0.99));
    std::vector<double> expected;
    for (std::int64_t l : counts.ends) expected.push_back(curve[static_cast<std::size_t>(l - exp.first_end)]);
    CompareOptions opts;
    opts.ci_floor = exp.ci_mass_floor;
    const ComparisonReport cmp = compare_proportions(expected, counts.counts, counts.trials, opts);
    outcome.report = cmp;
    report["empirical"] = {{"trials", counts.trials}};
    report["comparison"] = report_json(cmp);
  }
  outcome.max_violation_rate = exp.max_violation_rate;
  report["passed"] = outcome.passed();
  report["max_violation_rate"] = exp.max_violation_rate;
  ctx.writer.write(ctx.prefix + ".report.json", report.dump(2) + "\n");
}

json chain_json(const ResolvedCalibration& chain) {
  if (chain.physical) return calibration_json(chain.label, *chain.physical);
  json out;
  if (!chain.label.empty()) out["label"] = chain.label;
  out["direct"] = {{"p", chain.link.p()}, {"q", chain.link.q()}, {"dt", chain.link.dt()}};
  out["derived"] = {{"p_good", chain.link.p_good()}, {"doppler_hz", nullptr}};
  return out;
}

}  // namespace

RunResult run_scenario(const Scenario& scenario, const RunOptions& options) {
  require(!scenario.experiments.empty(), ErrorCode::config, "scenario has no experiments");
  OutputWriter writer(options.output_dir);
  RunResult result;

  std::vector<ResolvedCalibration> chains;
  for (const auto& entry : scenario.calibrations) chains.push_back(resolve(entry));

  json manifest = {{"tool", kToolName},
                   {"version", kToolVersion},
                   {"scenario", scenario.name},
                   {"description", scenario.description},
                   {"fleet_size", scenario.fleet_size}};
  manifest["calibrations"] = json::array();
  for (const auto& chain : chains) manifest["calibrations"].push_back(chain_json(chain));
  manifest["experiments"] = json::array();

  for (const Experiment& exp : scenario.experiments) {
    for (const auto& chain : chains) {
      std::string prefix = exp.id;
      if (chains.size() > 1) prefix += "-" + chain.label;
      json entry = {{"id", exp.id}, {"kind", to_string(exp.kind)}, {"prefix", prefix}};
      if (!chain.label.empty()) entry["calibration"] = chain.label;
      if (exp.cluster)
        entry["cluster"] = {{"first_car", exp.cluster->first_car},
                            {"link_count", exp.cluster->link_count},
                            {"gamma", exp.cluster->gamma()}};

      ExperimentOutcome outcome;
      outcome.id = exp.id;
      outcome.label = chain.label;
      outcome.kind = exp.kind;
      const ExperimentContext ctx{scenario, exp, chain, options, prefix, writer, entry};
      if (exp.kind == ExperimentKind::link_duration || exp.kind == ExperimentKind::cluster_lifetime)
        run_episode_experiment(ctx, outcome);
      else
        run_interval_experiment(ctx, outcome);
      entry["passed"] = outcome.passed();
      manifest["experiments"].push_back(std::move(entry));
      result.outcomes.push_back(std::move(outcome));
    }
  }
  writer.write("run.json", manifest.dump(2) + "\n");
  result.files = writer.files();
  return result;
}

}  // namespace vanet
