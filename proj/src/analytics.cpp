#include "vanet/analytics.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "vanet/error.hpp"

namespace vanet {

namespace {

constexpr double kUnderflowFloor = 1e-300;

// log of (1 - p)^s (1 - q)^gamma, accurate for small p and q.
double log_persistence(const MarkovLink& link, const ClusterSpec& cluster) {
  return cluster.link_count * std::log1p(-link.p()) + cluster.gamma() * std::log1p(-link.q());
}

// 1 - persistence without cancellation.
double dissolution(const MarkovLink& link, const ClusterSpec& cluster) {
  return -std::expm1(log_persistence(link, cluster));
}

// count * log_base with 0 * -inf taken as 0.
double scaled_log(std::int64_t count, double log_base) {
  return count == 0 ? 0.0 : static_cast<double>(count) * log_base;
}

void require_duration(std::int64_t m) {
  require(m >= 1, ErrorCode::invalid_argument, "durations start at one step");
}

}  // namespace

void ClusterSpec::validate() const {
  require(fleet_size >= 2, ErrorCode::invalid_argument, "fleet_size must be at least 2");
  require(link_count >= 1, ErrorCode::invalid_argument,
          "a cluster needs at least one internal link");
  require(first_car >= 1 && first_car + link_count <= fleet_size, ErrorCode::invalid_argument,
          "cluster cars " + std::to_string(first_car) + ".." +
              std::to_string(first_car + link_count) + " fall outside a fleet of " +
              std::to_string(fleet_size));
}

int ClusterSpec::gamma() const {
  validate();
  return (first_car > 1 ? 1 : 0) + (first_car + link_count < fleet_size ? 1 : 0);
}

std::vector<int> ClusterSpec::internal_links() const {
  validate();
  std::vector<int> links(static_cast<std::size_t>(link_count));
  std::iota(links.begin(), links.end(), first_car);
  return links;
}

std::vector<int> ClusterSpec::boundary_links() const {
  validate();
  std::vector<int> links;
  if (first_car > 1) links.push_back(first_car - 1);
  if (first_car + link_count < fleet_size) links.push_back(first_car + link_count);
  return links;
}

int gamma_factor(const ClusterSpec& cluster) { return cluster.gamma(); }

double Pmf::at(std::int64_t index) const {
  if (index < support_start || index >= support_end()) return 0.0;
  return masses[static_cast<std::size_t>(index - support_start)];
}

double Pmf::total() const {
  return std::accumulate(masses.begin(), masses.end(), 0.0) + tail_mass;
}

double geometric_power(double base, double exponent) {
  if (exponent == 0.0) return 1.0;
  if (base <= 0.0) return 0.0;
  const double log_value = exponent * std::log(base);
  if (log_value < std::log(kUnderflowFloor)) return 0.0;
  return std::pow(base, exponent);
}

double link_duration_pmf(const MarkovLink& link, std::int64_t m) {
  require_duration(m);
  return geometric_power(1.0 - link.p(), static_cast<double>(m - 1)) * link.p();
}

Moments link_duration_moments(const MarkovLink& link) {
  const double p = link.p();
  require(p > 0.0, ErrorCode::degenerate_chain, "p = 0: links never break");
  const double dt = link.dt();
  return {dt / p, (1.0 - p) * dt * dt / (p * p)};
}

double cluster_persistence(const MarkovLink& link, const ClusterSpec& cluster) {
  return std::exp(log_persistence(link, cluster));
}

double cluster_lifetime_pmf(const MarkovLink& link, const ClusterSpec& cluster, std::int64_t m) {
  require_duration(m);
  const double log_rho = log_persistence(link, cluster);
  const double log_head = scaled_log(m - 1, log_rho);
  if (log_head < std::log(kUnderflowFloor)) return 0.0;
  return std::exp(log_head) * dissolution(link, cluster);
}

Moments cluster_lifetime_moments(const MarkovLink& link, const ClusterSpec& cluster) {
  const double rho = cluster_persistence(link, cluster);
  const double one_minus_rho = dissolution(link, cluster);
  require(one_minus_rho > 0.0, ErrorCode::degenerate_chain, "cluster never dissolves");
  const double dt = link.dt();
  return {dt / one_minus_rho, rho * dt * dt / (one_minus_rho * one_minus_rho)};
}

double cluster_formation_prob(const MarkovLink& link, const ClusterSpec& cluster) {
  const double s = cluster.link_count;
  const double gamma = cluster.gamma();
  // Stationary probability of the cluster configuration at a single step.
  const double stationary = std::pow(link.p_good(), s) * std::pow(link.p_bad(), gamma);
  return stationary * dissolution(link, cluster);
}

double cluster_existence_prob(const MarkovLink& link, const ClusterSpec& cluster,
                              std::int64_t m, std::int64_t l) {
  require(m >= 1, ErrorCode::invalid_argument, "formation step m must be at least 1");
  require(l >= m, ErrorCode::bad_interval,
          "l = " + std::to_string(l) + " precedes m = " + std::to_string(m));
  const double formation = cluster_formation_prob(link, cluster);
  if (formation == 0.0) return 0.0;
  const double log_survival = scaled_log(l - m, log_persistence(link, cluster));
  const double log_total = std::log(formation) + log_survival;
  if (log_total < std::log(kUnderflowFloor)) return 0.0;
  return formation * std::exp(log_survival) * dissolution(link, cluster);
}

Pmf truncate_pmf(const std::function<double(std::int64_t)>& mass, double ratio,
                 const Truncation& rule) {
  require(ratio >= 0.0, ErrorCode::invalid_argument, "geometric ratio must be non-negative");
  require(ratio < 1.0, ErrorCode::non_summable, "geometric ratio " + std::to_string(ratio) +
                                                    " >= 1 has no normalizable tail");
  std::int64_t bins = 1;
  if (const auto* fixed = std::get_if<FixedHorizon>(&rule)) {
    require(fixed->bins >= 1, ErrorCode::invalid_argument, "horizon must be at least one bin");
    bins = fixed->bins;
  } else {
    const double tol = std::get<TailTolerance>(rule).tolerance;
    require(tol > 0.0 && tol < 1.0, ErrorCode::invalid_argument,
            "tail tolerance must lie in (0, 1)");
    if (ratio > 0.0) {
      // Smallest M with ratio^M < tol.
      bins = static_cast<std::int64_t>(std::floor(std::log(tol) / std::log(ratio))) + 1;
      bins = std::max<std::int64_t>(bins, 1);
    }
  }

  Pmf pmf;
  pmf.support_start = 1;
  pmf.masses.reserve(static_cast<std::size_t>(bins));
  for (std::int64_t m = 1; m <= bins; ++m) pmf.masses.push_back(mass(m));
  pmf.tail_mass = geometric_power(ratio, static_cast<double>(bins));
  return pmf;
}

Pmf link_duration_distribution(const MarkovLink& link, const Truncation& rule) {
  require(link.p() > 0.0, ErrorCode::non_summable, "p = 0: link duration is unbounded");
  return truncate_pmf([&](std::int64_t m) { return link_duration_pmf(link, m); },
                      1.0 - link.p(), rule);
}

Pmf cluster_lifetime_distribution(const MarkovLink& link, const ClusterSpec& cluster,
                                  const Truncation& rule) {
  return truncate_pmf([&](std::int64_t m) { return cluster_lifetime_pmf(link, cluster, m); },
                      cluster_persistence(link, cluster), rule);
}

}  // namespace vanet
