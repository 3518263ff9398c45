#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vanet/analytics.hpp"
#include "vanet/channel.hpp"
#include "vanet/rng.hpp"
#include "vanet/stability.hpp"

namespace vanet {

struct SimConfig {
  int fleet_size = 2;
  MarkovLink link;
  std::int64_t horizon = 1;  // timesteps per trace
  std::int64_t trials = 1;
  std::uint64_t seed = 0;

  int link_count() const noexcept { return fleet_size - 1; }
  void validate() const;
};

/// Link states of one trial: link_count rows by horizon columns, true = Good.
class SimTrace {
public:
  SimTrace(int links, std::int64_t horizon);

  int links() const noexcept { return links_; }
  std::int64_t horizon() const noexcept { return horizon_; }

  /// `link` is 1-based.
  bool good(int link, std::int64_t step) const;
  void set(int link, std::int64_t step, bool good);

private:
  int links_;
  std::int64_t horizon_;
  std::vector<std::uint8_t> states_;
};

/// Evolves a chosen subset of one trial's links step by step. States agree
/// with simulate_trial for every link and step regardless of which subset is
/// tracked.
class LinkEvolver {
public:
  LinkEvolver(const MarkovLink& link, std::uint64_t seed, std::uint64_t trial,
              std::span<const int> links);

  std::int64_t step() const noexcept { return step_; }
  std::size_t size() const noexcept { return streams_.size(); }
  bool good(std::size_t i) const noexcept { return states_[i] != 0; }
  void advance();

private:
  double p_;
  double q_;
  std::int64_t step_ = 0;
  std::vector<CounterRng> streams_;
  std::vector<std::uint8_t> states_;
};

/// Trace of `trial` over `horizon` steps (config.horizon when zero). Column 0
/// is drawn from the equilibrium distribution.
SimTrace simulate_trial(const SimConfig& config, std::uint64_t trial, std::int64_t horizon = 0);

/// Streams every trial's trace in trial order.
void simulate(const SimConfig& config,
              const std::function<void(std::uint64_t trial, const SimTrace&)>& sink);

/// Histogram of completed episode lengths. counts[d - 1] holds episodes
/// lasting exactly d steps.
struct EpisodeHistogram {
  std::vector<std::uint64_t> counts;
  std::uint64_t episodes = 0;
  std::uint64_t discarded_initial = 0;  // episodes already running at step 0

  void record(std::int64_t length);
  void merge(const EpisodeHistogram& other);
  /// Empirical pmf over 1 .. max observed length.
  Pmf to_pmf() const;
  double mean_steps() const;
  /// Standard error of mean_steps().
  double mean_stderr_steps() const;
};

/// Counts over a list of end steps, all from the same trials.
struct IntervalCounts {
  std::vector<std::int64_t> ends;
  std::vector<std::uint64_t> counts;
  std::uint64_t trials = 0;

  void merge(const IntervalCounts& other);
  std::vector<double> frequencies() const;
};

inline constexpr std::uint64_t kMinCompletedEpisodes = 100;

/// OpenMP worker count; 0 means the runtime default. Results never depend on it.
struct Parallelism {
  int threads = 0;
};

/// Good-runs of every link that start inside the trace (Bad at t - 1, Good at
/// t, 1 <= t < horizon). Started runs are followed past the horizon until they
/// end, so long runs are not censored away.
EpisodeHistogram estimate_link_duration(const SimConfig& config, Parallelism par = {});

/// Same episode rule applied to the cluster indicator: internal links Good
/// and boundary links Bad.
EpisodeHistogram estimate_cluster_lifetime(const SimConfig& config, const ClusterSpec& cluster,
                                           Parallelism par = {});

/// For each l in [first_end, last_end]: trials where the cluster is absent at
/// m - 1, present over m..l, absent at l + 1.
IntervalCounts estimate_cluster_existence(const SimConfig& config, const ClusterSpec& cluster,
                                          std::int64_t m, std::int64_t first_end,
                                          std::int64_t last_end, Parallelism par = {});

/// For each end in `ends` (ascending): trials whose link 1 trajectory is
/// window-stable over [start, end].
IntervalCounts estimate_omega_stable(const SimConfig& config, std::int64_t start,
                                     std::int64_t window, std::span<const std::int64_t> ends,
                                     Parallelism par = {});

/// Single-threaded estimators that materialize each full SimTrace and scan
/// it. Slow; kept to cross-check the parallel kernels.
namespace reference {

EpisodeHistogram estimate_link_duration(const SimConfig& config);
EpisodeHistogram estimate_cluster_lifetime(const SimConfig& config, const ClusterSpec& cluster);
IntervalCounts estimate_cluster_existence(const SimConfig& config, const ClusterSpec& cluster,
                                          std::int64_t m, std::int64_t first_end,
                                          std::int64_t last_end);
IntervalCounts estimate_omega_stable(const SimConfig& config, std::int64_t start,
                                     std::int64_t window, std::span<const std::int64_t> ends);

}  // namespace reference

/// Default trace length: 50 mean episode durations.
std::int64_t default_link_horizon(const MarkovLink& link);
std::int64_t default_cluster_horizon(const MarkovLink& link, const ClusterSpec& cluster);

}  // namespace vanet
