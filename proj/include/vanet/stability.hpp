#pragma once

#include <cstdint>
#include <vector>

#include "vanet/channel.hpp"

namespace vanet {

/// A link is window-stable over steps [start, end] when it is Good at some
/// step in [start, start + window], consecutive Good steps are never more
/// than `window` apart, and some step in [end - window, end] is Good.
struct StabilityQuery {
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::int64_t window = 2;

  void validate() const;
};

/// Tables of the linear recurrence, stored from index `start`.
///   f(a): probability that step a is Good and every prior constraint holds.
///   g(a): probability that no step in [start, a] is Good (zero once a
///         reaches start + window).
struct StabilityTables {
  std::int64_t start = 0;
  std::vector<double> f;  // indices start .. last_f
  std::vector<double> g;  // indices start .. last_f - 1

  double f_at(std::int64_t a) const;
  double g_at(std::int64_t a) const;
};

/// Builds f over [start, last + 1] and g over [start, last].
StabilityTables stability_tables(const MarkovLink& link, std::int64_t start,
                                 std::int64_t window, std::int64_t last);

/// Linear-time recurrence. Requires q > 0.
double omega_stable_prob(const MarkovLink& link, const StabilityQuery& query);

/// Linear recurrence evaluated for every end in [first_end, last_end] from a
/// single pass over the tables.
std::vector<double> omega_stable_curve(const MarkovLink& link, std::int64_t start,
                                       std::int64_t window, std::int64_t first_end,
                                       std::int64_t last_end);

/// Band of h(a, b) = P(at step a the most recent Good step is b, all
/// constraints so far hold), b in [a - window, a].
struct StabilityBand {
  std::int64_t start = 0;
  std::int64_t window = 2;
  std::vector<std::vector<double>> rows;  // rows[a - start][a - b]

  double h(std::int64_t a, std::int64_t b) const;
};

StabilityBand omega_stable_band(const MarkovLink& link, const StabilityQuery& query);

/// O((end - start) * window) evaluation through the full h band. Works for q = 0.
double omega_stable_prob_quadratic(const MarkovLink& link, const StabilityQuery& query);

inline constexpr std::int64_t kMaxEnumerationSpan = 20;

/// Sums every Good/Bad sequence over [start, end]; end - start <= 20.
double omega_stable_enumerate(const MarkovLink& link, const StabilityQuery& query);

/// The stability predicate on one observed trajectory. good[i] is the state
/// at step query.start + i; the sequence must cover [start, end].
bool is_omega_stable(const std::vector<bool>& good, const StabilityQuery& query);

}  // namespace vanet
