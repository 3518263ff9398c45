#pragma once

#include <cstdint>
#include <functional>
#include <variant>
#include <vector>

#include "vanet/channel.hpp"

namespace vanet {

/// Cars first_car .. first_car + link_count of a fleet of fleet_size cars,
/// numbered from 1. Link i joins cars i and i + 1.
struct ClusterSpec {
  int first_car = 1;
  int link_count = 1;
  int fleet_size = 2;

  void validate() const;

  /// Number of links bounding the cluster: 2 in the interior, 1 when the
  /// cluster touches one end of the fleet, 0 when it spans the whole fleet.
  int gamma() const;

  /// 1-based indices of the internal links.
  std::vector<int> internal_links() const;
  /// 1-based indices of the bounding links (gamma() of them).
  std::vector<int> boundary_links() const;
};

int gamma_factor(const ClusterSpec& cluster);

/// Masses over the contiguous support support_start, support_start + 1, ...
/// tail_mass is what lies beyond the last stored bin.
struct Pmf {
  std::int64_t support_start = 1;
  std::vector<double> masses;
  double tail_mass = 0.0;

  std::size_t size() const noexcept { return masses.size(); }
  std::int64_t support_end() const noexcept {
    return support_start + static_cast<std::int64_t>(masses.size());
  }
  /// Zero outside the stored bins.
  double at(std::int64_t index) const;
  double total() const;
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;
};

/// b^e with masses below 1e-300 flushed to exactly zero.
double geometric_power(double base, double exponent);

/// Probability that a freshly established link lasts exactly m steps.
double link_duration_pmf(const MarkovLink& link, std::int64_t m);
/// Mean and variance of the link duration, in seconds.
Moments link_duration_moments(const MarkovLink& link);

/// Per-step probability that an existing cluster survives the next step.
double cluster_persistence(const MarkovLink& link, const ClusterSpec& cluster);
double cluster_lifetime_pmf(const MarkovLink& link, const ClusterSpec& cluster, std::int64_t m);
Moments cluster_lifetime_moments(const MarkovLink& link, const ClusterSpec& cluster);

/// Probability that the cluster exists at a given step but not at the step before.
double cluster_formation_prob(const MarkovLink& link, const ClusterSpec& cluster);

/// Probability that the cluster forms at step m, exists through step l, and
/// is gone at step l + 1.
double cluster_existence_prob(const MarkovLink& link, const ClusterSpec& cluster,
                              std::int64_t m, std::int64_t l);

struct FixedHorizon {
  std::int64_t bins = 1;
};
struct TailTolerance {
  double tolerance = 1e-9;
};
using Truncation = std::variant<FixedHorizon, TailTolerance>;

inline constexpr double kDefaultTailTolerance = 1e-9;

/// Tabulates a normalized pmf of the form mass(m) = (1 - ratio) ratio^(m - 1)
/// for m >= 1. The remainder beyond the last bin is ratio^bins, filled in
/// analytically rather than by subtraction.
Pmf truncate_pmf(const std::function<double(std::int64_t)>& mass, double ratio,
                 const Truncation& rule = TailTolerance{});

Pmf link_duration_distribution(const MarkovLink& link, const Truncation& rule = TailTolerance{});
Pmf cluster_lifetime_distribution(const MarkovLink& link, const ClusterSpec& cluster,
                                  const Truncation& rule = TailTolerance{});

}  // namespace vanet
