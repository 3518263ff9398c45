#include "vanet/stability.hpp"

#include <cmath>
#include <string>

#include "vanet/error.hpp"

namespace vanet {

namespace {

constexpr double kClampSlack = 1e-12;

void validate_window(std::int64_t start, std::int64_t window, std::int64_t end) {
  require(start >= 0, ErrorCode::invalid_argument, "start step must be non-negative");
  require(window >= 2, ErrorCode::bad_window,
          "window = " + std::to_string(window) + " must be at least 2");
  require(end >= start + window, ErrorCode::bad_interval,
          "end = " + std::to_string(end) + " must be at least start + window = " +
              std::to_string(start + window));
}

double clamp_probability(double value) {
  if (value < 0.0 && value >= -kClampSlack) return 0.0;
  if (value > 1.0 && value <= 1.0 + kClampSlack) return 1.0;
  require(value >= 0.0 && value <= 1.0, ErrorCode::numerical_instability,
          "recurrence produced " + std::to_string(value));
  return value;
}

}  // namespace

void StabilityQuery::validate() const { validate_window(start, window, end); }

double StabilityTables::f_at(std::int64_t a) const {
  if (a < start) return 0.0;
  return f.at(static_cast<std::size_t>(a - start));
}

double StabilityTables::g_at(std::int64_t a) const {
  if (a < start) return 0.0;
  return g.at(static_cast<std::size_t>(a - start));
}

StabilityTables stability_tables(const MarkovLink& link, std::int64_t start,
                                 std::int64_t window, std::int64_t last) {
  validate_window(start, window, last);
  const double p = link.p();
  const double q = link.q();
  const double stay_bad_window = std::pow(1.0 - q, static_cast<double>(window - 1));

  StabilityTables tables;
  tables.start = start;
  const auto span = static_cast<std::size_t>(last - start);
  tables.f.assign(span + 2, 0.0);
  tables.g.assign(span + 1, 0.0);

  double no_good_yet = link.p_bad();
  for (std::int64_t a = start; a < start + window && a <= last; ++a) {
    tables.g[static_cast<std::size_t>(a - start)] = no_good_yet;
    no_good_yet *= 1.0 - q;
  }

  auto& f = tables.f;
  const auto& g = tables.g;
  f[0] = link.p_good();
  f[1] = link.p_good();
  for (std::size_t i = 2; i < f.size(); ++i) {
    f[i] = f[i - 1] * (2.0 - p - q) - f[i - 2] * (1.0 - p - q) + g[i - 1] * q -
           g[i - 2] * q * (1.0 - q);
    const auto w = static_cast<std::size_t>(window);
    if (i >= w + 1) f[i] -= f[i - w - 1] * stay_bad_window * p * q;
  }
  return tables;
}

namespace {

double stable_from_tables(const MarkovLink& link, const StabilityTables& tables,
                          std::int64_t end, std::int64_t window) {
  const double p = link.p();
  const double q = link.q();
  const double stay_bad_window = std::pow(1.0 - q, static_cast<double>(window - 1));
  const double value = (tables.f_at(end + 1) - tables.f_at(end) * (1.0 - p - q) +
                        tables.f_at(end - window) * stay_bad_window * p * q -
                        tables.g_at(end) * q) /
                       q;
  return clamp_probability(value);
}

}  // namespace

double omega_stable_prob(const MarkovLink& link, const StabilityQuery& query) {
  query.validate();
  require(link.q() > 0.0, ErrorCode::degenerate_chain,
          "the linear recurrence divides by q; use the quadratic form for q = 0");
  const StabilityTables tables = stability_tables(link, query.start, query.window, query.end);
  return stable_from_tables(link, tables, query.end, query.window);
}

std::vector<double> omega_stable_curve(const MarkovLink& link, std::int64_t start,
                                       std::int64_t window, std::int64_t first_end,
                                       std::int64_t last_end) {
  validate_window(start, window, first_end);
  require(last_end >= first_end, ErrorCode::bad_interval, "empty range of end steps");
  require(link.q() > 0.0, ErrorCode::degenerate_chain,
          "the linear recurrence divides by q; use the quadratic form for q = 0");
  const StabilityTables tables = stability_tables(link, start, window, last_end);
  std::vector<double> curve;
  curve.reserve(static_cast<std::size_t>(last_end - first_end + 1));
  for (std::int64_t end = first_end; end <= last_end; ++end)
    curve.push_back(stable_from_tables(link, tables, end, window));
  return curve;
}

double StabilityBand::h(std::int64_t a, std::int64_t b) const {
  if (b < start || b > a || a - b > window) return 0.0;
  return rows.at(static_cast<std::size_t>(a - start)).at(static_cast<std::size_t>(a - b));
}

StabilityBand omega_stable_band(const MarkovLink& link, const StabilityQuery& query) {
  query.validate();
  const double p = link.p();
  const double q = link.q();
  const std::int64_t m = query.start;
  const std::int64_t w = query.window;

  StabilityBand band;
  band.start = m;
  band.window = w;
  band.rows.assign(static_cast<std::size_t>(query.end - m + 1),
                   std::vector<double>(static_cast<std::size_t>(w + 1), 0.0));

  auto no_good_yet = [&](std::int64_t a) {
    return a < m + w ? link.p_bad() * std::pow(1.0 - q, static_cast<double>(a - m)) : 0.0;
  };

  band.rows[0][0] = link.p_good();
  for (std::int64_t a = m + 1; a <= query.end; ++a) {
    const auto& prev = band.rows[static_cast<std::size_t>(a - 1 - m)];
    auto& row = band.rows[static_cast<std::size_t>(a - m)];
    // Offsets are a - b; prev[k] holds h(a - 1, a - 1 - k).
    if (a == m + 1) {
      row[0] = link.p_good();
    } else {
      double returning = 0.0;
      for (std::int64_t k = 1; k <= w - 1; ++k) returning += prev[static_cast<std::size_t>(k)];
      row[0] = prev[0] * (1.0 - p) + returning * q + no_good_yet(a - 1) * q;
    }
    row[1] = prev[0] * p;
    for (std::int64_t k = 2; k <= w; ++k)
      row[static_cast<std::size_t>(k)] = prev[static_cast<std::size_t>(k - 1)] * (1.0 - q);
  }
  return band;
}

double omega_stable_prob_quadratic(const MarkovLink& link, const StabilityQuery& query) {
  const StabilityBand band = omega_stable_band(link, query);
  double total = 0.0;
  for (std::int64_t b = query.end - query.window; b <= query.end; ++b)
    total += band.h(query.end, b);
  return total;
}

bool is_omega_stable(const std::vector<bool>& good, const StabilityQuery& query) {
  const std::int64_t span = query.end - query.start;
  require(static_cast<std::int64_t>(good.size()) > span, ErrorCode::invalid_argument,
          "trajectory does not cover the query interval");
  std::int64_t last_good = -1;
  for (std::int64_t i = 0; i <= span; ++i) {
    if (!good[static_cast<std::size_t>(i)]) continue;
    if (last_good < 0 ? i > query.window : i - last_good > query.window) return false;
    last_good = i;
  }
  return last_good >= 0 && last_good >= span - query.window;
}

double omega_stable_enumerate(const MarkovLink& link, const StabilityQuery& query) {
  query.validate();
  const std::int64_t span = query.end - query.start;
  require(span <= kMaxEnumerationSpan, ErrorCode::too_large,
          "enumeration limited to end - start <= " + std::to_string(kMaxEnumerationSpan));
  const auto steps = static_cast<std::size_t>(span + 1);
  const double p = link.p();
  const double q = link.q();

  double total = 0.0;
  std::vector<bool> good(steps);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << steps); ++bits) {
    for (std::size_t i = 0; i < steps; ++i) good[i] = (bits >> i) & 1U;
    if (!is_omega_stable(good, query)) continue;
    double weight = good[0] ? link.p_good() : link.p_bad();
    for (std::size_t i = 1; i < steps; ++i) {
      if (good[i - 1])
        weight *= good[i] ? 1.0 - p : p;
      else
        weight *= good[i] ? q : 1.0 - q;
    }
    total += weight;
  }
  return total;
}

}  // namespace vanet
