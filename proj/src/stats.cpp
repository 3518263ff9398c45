#include "vanet/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>

#include "vanet/error.hpp"

namespace vanet {

Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence) {
  require(trials > 0, ErrorCode::invalid_argument, "Wilson interval needs at least one trial");
  require(successes <= trials, ErrorCode::invalid_argument, "more successes than trials");
  require(confidence > 0.0 && confidence < 1.0, ErrorCode::invalid_argument,
          "confidence must lie in (0, 1)");
  const double z = boost::math::quantile(boost::math::normal(), 0.5 + confidence / 2.0);
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  // Rounding leaves the bounds a hair inside [0, 1] at the extremes.
  return {successes == 0 ? 0.0 : std::max(0.0, centre - half),
          successes == trials ? 1.0 : std::min(1.0, centre + half)};
}

double total_variation(const Pmf& a, const Pmf& b) {
  const std::int64_t lo = std::min(a.support_start, b.support_start);
  const std::int64_t hi = std::max(a.support_end(), b.support_end());
  double sum = 0.0;
  for (std::int64_t i = lo; i < hi; ++i) sum += std::abs(a.at(i) - b.at(i));
  sum += std::abs(a.tail_mass - b.tail_mass);
  return std::min(1.0, 0.5 * sum);
}

ComparisonReport compare_pmf(const Pmf& analytic, const Pmf& empirical, std::uint64_t trials,
                             const CompareOptions& options) {
  require(analytic.support_start == empirical.support_start, ErrorCode::support_mismatch,
          "supports start at " + std::to_string(analytic.support_start) + " and " +
              std::to_string(empirical.support_start));
  require(trials > 0, ErrorCode::invalid_argument, "comparison needs at least one trial");
  const double mass_floor =
      options.mass_floor > 0.0 ? options.mass_floor : 10.0 / static_cast<double>(trials);

  ComparisonReport report;
  report.total_variation = total_variation(analytic, empirical);
  for (std::int64_t i = analytic.support_start; i < analytic.support_end(); ++i) {
    const double expected = analytic.at(i);
    const double observed = empirical.at(i);
    const double abs_err = std::abs(observed - expected);
    report.max_abs_error = std::max(report.max_abs_error, abs_err);
    if (expected >= mass_floor)
      report.max_rel_error = std::max(report.max_rel_error, abs_err / expected);
    if (expected < options.ci_floor) continue;
    const auto count = static_cast<std::uint64_t>(std::llround(observed * static_cast<double>(trials)));
    ++report.bins_compared;
    if (!wilson_interval(std::min(count, trials), trials, options.confidence).contains(expected))
      ++report.ci_violations;
  }
  return report;
}

ComparisonReport compare_pmf(const Pmf& analytic, const Pmf& empirical, std::uint64_t trials,
                             double mass_floor) {
  require(mass_floor > 0.0, ErrorCode::invalid_argument, "mass_floor must be positive");
  CompareOptions options;
  options.mass_floor = mass_floor;
  return compare_pmf(analytic, empirical, trials, options);
}

ComparisonReport compare_proportions(std::span<const double> analytic,
                                     std::span<const std::uint64_t> successes,
                                     std::uint64_t trials, const CompareOptions& options) {
  require(analytic.size() == successes.size(), ErrorCode::support_mismatch,
          "point counts differ: " + std::to_string(analytic.size()) + " vs " +
              std::to_string(successes.size()));
  require(trials > 0, ErrorCode::invalid_argument, "comparison needs at least one trial");
  const double mass_floor =
      options.mass_floor > 0.0 ? options.mass_floor : 10.0 / static_cast<double>(trials);

  ComparisonReport report;
  double abs_sum = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double expected = analytic[i];
    const double observed = static_cast<double>(successes[i]) / static_cast<double>(trials);
    const double abs_err = std::abs(observed - expected);
    abs_sum += abs_err;
    report.max_abs_error = std::max(report.max_abs_error, abs_err);
    if (expected >= mass_floor)
      report.max_rel_error = std::max(report.max_rel_error, abs_err / expected);
    if (expected < options.ci_floor) continue;
    ++report.bins_compared;
    if (!wilson_interval(successes[i], trials, options.confidence).contains(expected))
      ++report.ci_violations;
  }
  report.total_variation = std::min(1.0, 0.5 * abs_sum);
  return report;
}

double compare_scalar(double analytic, double empirical_mean, double empirical_stderr) {
  require(empirical_stderr > 0.0, ErrorCode::invalid_argument, "stderr must be positive");
  return (empirical_mean - analytic) / empirical_stderr;
}

}  // namespace vanet
