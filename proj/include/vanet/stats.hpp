#pragma once

#include <cstdint>
#include <span>

#include "vanet/analytics.hpp"

namespace vanet {

struct Interval {
  double low = 0.0;
  double high = 1.0;

  bool contains(double x) const noexcept { return x >= low && x <= high; }
};

/// Wilson score interval for `successes` out of `trials` at two-sided
/// coverage `confidence`.
Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double confidence = 0.99);

struct ComparisonReport {
  double max_abs_error = 0.0;
  double max_rel_error = 0.0;  // over bins with analytic mass >= mass_floor
  double total_variation = 0.0;
  std::int64_t bins_compared = 0;
  std::int64_t ci_violations = 0;

  double violation_rate() const noexcept {
    return bins_compared > 0 ? static_cast<double>(ci_violations) / bins_compared : 0.0;
  }
};

struct CompareOptions {
  double mass_floor = 0.0;  // 0 selects 10 / trials
  double ci_floor = 0.0;    // only bins with analytic mass >= ci_floor are CI-checked
  double confidence = 0.99;
};

/// Total variation distance; the tail masses count as one extra bin.
double total_variation(const Pmf& a, const Pmf& b);

/// Compares an analytic pmf against an empirical one built from `trials`
/// observations. Bins are those of the analytic pmf; both supports must start
/// at the same index.
ComparisonReport compare_pmf(const Pmf& analytic, const Pmf& empirical, std::uint64_t trials,
                             const CompareOptions& options = {});

ComparisonReport compare_pmf(const Pmf& analytic, const Pmf& empirical, std::uint64_t trials,
                             double mass_floor);

/// Pointwise check of independent-ish proportions, each estimated from the
/// same `trials`. total_variation here is half the summed absolute error.
ComparisonReport compare_proportions(std::span<const double> analytic,
                                     std::span<const std::uint64_t> successes,
                                     std::uint64_t trials, const CompareOptions& options = {});

/// (empirical - analytic) / stderr.
double compare_scalar(double analytic, double empirical_mean, double empirical_stderr);

}  // namespace vanet
