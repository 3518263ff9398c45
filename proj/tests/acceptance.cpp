// One line per acceptance criterion; exit status is the number of failures.

#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "vanet/analytics.hpp"
#include "vanet/channel.hpp"
#include "vanet/runner.hpp"
#include "vanet/scenario.hpp"
#include "vanet/simulator.hpp"
#include "vanet/stability.hpp"
#include "vanet/stats.hpp"

using namespace vanet;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
};

int failures = 0;

void criterion(int number, const std::string& title, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.ok) ++failures;
  std::cout << fmt::format("[{}] {}. {} ({:.1f} s) {}\n", v.ok ? "PASS" : "FAIL", number, title,
                           secs, v.detail)
            << std::flush;
}

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("vanet-chain-acceptance-" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Verdict calibration_golden() {
  const double speeds[] = {30, 60, 90};
  const double fd[] = {108, 217, 325};
  const double dt[] = {9e-4, 4.6e-4, 3e-4};
  const double p[] = {8.5e-4, 1.7e-3, 2.5e-3};
  const double q[] = {8.1e-3, 1.6e-2, 2.5e-2};
  Verdict v;
  for (int i = 0; i < 3; ++i) {
    const Calibration cal = calibrate(ChannelSpec::from_road_units(speeds[i], 3.9, 1e5, 0.1));
    const bool ok = within(cal.doppler, fd[i], 0.05) && within(cal.link.dt(), dt[i], 0.05) &&
                    within(cal.link.p(), p[i], 0.05) && within(cal.link.q(), q[i], 0.05);
    v.ok = v.ok && ok;
    v.detail += fmt::format("v{:g}: f_D {:.4g} dt {:.3g} p {:.3g} q {:.3g}{}; ", speeds[i],
                            cal.doppler, cal.link.dt(), cal.link.p(), cal.link.q(), ok ? "" : " MISS");
  }
  return v;
}

ClusterSpec cluster_with(int s, int gamma) {
  switch (gamma) {
    case 0: return {1, s, s + 1};
    case 1: return {1, s, s + 2};
    default: return {2, s, s + 3};
  }
}

double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

Verdict normalization_and_moments() {
  const std::pair<double, double> chains[] = {{0.02, 0.02}, {0.05, 0.05}, {0.3, 0.1}};
  double worst_norm = 0, worst_moment = 0;
  for (auto [p, q] : chains) {
    const MarkovLink link(p, q, 0.01);
    worst_norm = std::max(worst_norm, std::abs(link_duration_distribution(link).total() - 1.0));
    const auto ls = oracle::series_moments([&](auto m) { return link_duration_pmf(link, m); }, 0.01);
    const Moments lm = link_duration_moments(link);
    worst_norm = std::max(worst_norm, std::abs(ls.total - 1.0));
    worst_moment = std::max({worst_moment, rel_err(ls.mean, lm.mean), rel_err(ls.variance, lm.variance)});
    for (int s : {1, 2, 3})
      for (int gamma : {0, 1, 2}) {
        const ClusterSpec c = cluster_with(s, gamma);
        worst_norm = std::max(worst_norm, std::abs(cluster_lifetime_distribution(link, c).total() - 1.0));
        const auto cs =
            oracle::series_moments([&](auto m) { return cluster_lifetime_pmf(link, c, m); }, 0.01);
        const Moments cm = cluster_lifetime_moments(link, c);
        worst_norm = std::max(worst_norm, std::abs(cs.total - 1.0));
        worst_moment = std::max({worst_moment, rel_err(cs.mean, cm.mean), rel_err(cs.variance, cm.variance)});
      }
  }
  return {worst_norm <= 1e-9 && worst_moment <= 1e-6,
          fmt::format("max |sum - 1| {:.2e}, max moment rel err {:.2e}", worst_norm, worst_moment)};
}

Verdict brute_force_existence() {
  double worst = 0;
  int cases = 0;
  for (double p : {0.2, 0.5})
    for (double q : {0.2, 0.5})
      for (int s : {1, 2})
        for (std::int64_t gap = 0; gap <= 4; ++gap) {
          const double brute = oracle::cluster_existence_paths({p, q}, s, 2, 3, 3 + gap);
          const double formula =
              cluster_existence_prob(MarkovLink(p, q, 1.0), cluster_with(s, 2), 3, 3 + gap);
          worst = std::max(worst, std::abs(formula - brute));
          ++cases;
        }
  double worst_tel = 0;
  for (double p : {0.2, 0.5})
    for (double q : {0.2, 0.5})
      for (int s : {1, 2}) {
        const MarkovLink link(p, q, 1.0);
        const ClusterSpec c = cluster_with(s, 2);
        double sum = 0;
        for (std::int64_t l = 3; l < 3 + 5000; ++l) sum += cluster_existence_prob(link, c, 3, l);
        worst_tel = std::max(worst_tel, std::abs(sum - cluster_formation_prob(link, c)));
      }
  return {worst <= 1e-12 && worst_tel <= 1e-9,
          fmt::format("{} cases, max |formula - enumeration| {:.2e}, max telescoping gap {:.2e}",
                      cases, worst, worst_tel)};
}

Verdict stability_three_way() {
  double worst = 0;
  int cases = 0;
  for (double p : {0.1, 0.3, 0.5, 0.9})
    for (double q : {0.1, 0.3, 0.5, 0.9}) {
      const MarkovLink link(p, q, 1.0);
      for (std::int64_t w : {2, 3, 5})
        for (std::int64_t d = w; d <= 14; ++d) {
          const StabilityQuery query{1, 1 + d, w};
          const double lin = omega_stable_prob(link, query);
          const double quad = omega_stable_prob_quadratic(link, query);
          const double brute = omega_stable_enumerate(link, query);
          worst = std::max({worst, std::abs(lin - quad), std::abs(lin - brute), std::abs(quad - brute)});
          ++cases;
        }
    }
  return {worst <= 1e-12, fmt::format("{} cases, max pairwise difference {:.2e}", cases, worst)};
}

// Runs a built-in scenario and checks every outcome against its own thresholds.
Verdict reproduce(const std::string& name, const fs::path& dir,
                  const std::function<void(const ExperimentOutcome&, Verdict&)>& extra = {}) {
  const auto scenario = find_builtin(name);
  if (!scenario) return {false, "missing built-in " + name};
  RunOptions options;
  options.output_dir = dir;
  const RunResult result = run_scenario(*scenario, options);
  Verdict v;
  for (const auto& o : result.outcomes) {
    if (!o.report) {
      v = {false, o.id + " was not simulated"};
      return v;
    }
    v.ok = v.ok && o.passed();
    v.detail += fmt::format("ci_violations {}/{} ({:.2f}% allowed {:.2f}%), tv {:.3g}",
                            o.report->ci_violations, o.report->bins_compared,
                            100 * o.report->violation_rate(), 100 * o.max_violation_rate,
                            o.report->total_variation);
    if (extra) extra(o, v);
  }
  return v;
}

Verdict determinism() {
  Verdict v;
  for (const auto& b : builtin_scenarios()) {
    const auto scenario = find_builtin(b.name);
    std::string first;
    for (int threads : {1, 4}) {
      const fs::path dir = scratch("det-" + b.name + "-" + std::to_string(threads));
      RunOptions options;
      options.output_dir = dir;
      options.threads = threads;
      run_scenario(*scenario, options);
      std::string bytes;
      for (const auto& entry : fs::directory_iterator(dir))
        if (entry.path().extension() == ".csv") bytes += entry.path().filename().string() + slurp(entry.path());
      if (threads == 1)
        first = bytes;
      else if (bytes != first) {
        v.ok = false;
        v.detail += b.name + " differs; ";
      }
      fs::remove_all(dir);
    }
  }
  if (v.ok) v.detail = fmt::format("{} built-ins byte-identical at 1 and 4 threads", builtin_scenarios().size());
  return v;
}

}  // namespace

int main() {
  criterion(1, "calibration golden values", calibration_golden);
  criterion(2, "normalization and moments", normalization_and_moments);
  criterion(3, "cluster existence brute-force equivalence", brute_force_existence);
  criterion(4, "window-stability three-way agreement", stability_three_way);
  criterion(5, "link-duration simulation (p = q = 0.02)", [] {
    return reproduce("paper-fig7", scratch("fig7"), [](const ExperimentOutcome& o, Verdict& v) {
      const double mean = o.empirical_mean_seconds.value_or(0.0);
      const bool ok = within(mean, 0.5, 0.02);
      v.ok = v.ok && ok;
      v.detail += fmt::format(", empirical mean {:.4f} s vs 0.5 s{}", mean, ok ? "" : " MISS");
    });
  });
  criterion(6, "cluster-lifetime simulation, cars 2-3-4 of 10", [] {
    return reproduce("paper-fig8", scratch("fig8"));
  });
  criterion(7, "cluster-existence simulation, m = 15, l = 15..30", [] {
    return reproduce("paper-fig9", scratch("fig9"), [](const ExperimentOutcome& o, Verdict& v) {
      const bool ok = o.report->bins_compared == 16 && o.report->ci_violations <= 2;
      v.ok = v.ok && ok;
      if (!ok) v.detail += " (need <= 2 of 16)";
    });
  });
  criterion(8, "window-stability simulation at 30 km/h", [] {
    return reproduce("paper-fig6", scratch("fig6"), [](const ExperimentOutcome& o, Verdict& v) {
      const bool ok = o.report->ci_violations == 0 && o.report->bins_compared > 0;
      v.ok = v.ok && ok;
    });
  });
  criterion(9, "determinism across thread counts", determinism);
  std::cout << (failures == 0 ? "all criteria passed\n" : fmt::format("{} criteria failed\n", failures));
  return failures;
}
