#include <string>

#include "vanet/error.hpp"
#include "vanet/simulator.hpp"

namespace vanet::reference {

namespace {

// Per-step indicator: every link in good_links Good, every link in bad_links Bad.
std::vector<bool> indicator_series(const SimTrace& trace, const std::vector<int>& good_links,
                                   const std::vector<int>& bad_links) {
  std::vector<bool> on(static_cast<std::size_t>(trace.horizon()));
  for (std::int64_t t = 0; t < trace.horizon(); ++t) {
    bool all = true;
    for (int id : good_links) all = all && trace.good(id, t);
    for (int id : bad_links) all = all && !trace.good(id, t);
    on[static_cast<std::size_t>(t)] = all;
  }
  return on;
}

// Episodes starting at t in [1, horizon). Returns false when an episode is
// still open at the end of `series`, so the caller can retry on a longer trace.
bool scan_episodes(const std::vector<bool>& series, std::int64_t horizon,
                   EpisodeHistogram& hist) {
  EpisodeHistogram local;
  if (series[0]) ++local.discarded_initial;
  std::int64_t began = -1;
  for (std::size_t t = 1; t < series.size(); ++t) {
    const auto step = static_cast<std::int64_t>(t);
    if (!series[t - 1] && series[t] && step < horizon) began = step;
    if (series[t - 1] && !series[t] && began >= 0) {
      local.record(step - began);
      began = -1;
    }
  }
  if (began >= 0) return false;
  hist.merge(local);
  return true;
}

template <class SeriesFn>
EpisodeHistogram episodes_over_trials(const SimConfig& config, SeriesFn series_of) {
  EpisodeHistogram hist;
  for (std::int64_t trial = 0; trial < config.trials; ++trial) {
    const auto id = static_cast<std::uint64_t>(trial);
    std::int64_t length = config.horizon;
    for (;;) {
      const SimTrace trace = simulate_trial(config, id, length);
      EpisodeHistogram attempt;
      bool complete = true;
      for (const std::vector<bool>& series : series_of(trace))
        complete = complete && scan_episodes(series, config.horizon, attempt);
      if (complete) {
        hist.merge(attempt);
        break;
      }
      length *= 2;
    }
  }
  require(hist.episodes >= kMinCompletedEpisodes, ErrorCode::insufficient_data,
          "only " + std::to_string(hist.episodes) + " completed episodes");
  return hist;
}

}  // namespace

EpisodeHistogram estimate_link_duration(const SimConfig& config) {
  config.validate();
  return episodes_over_trials(config, [&](const SimTrace& trace) {
    std::vector<std::vector<bool>> all;
    for (int id = 1; id <= trace.links(); ++id) all.push_back(indicator_series(trace, {id}, {}));
    return all;
  });
}

EpisodeHistogram estimate_cluster_lifetime(const SimConfig& config, const ClusterSpec& cluster) {
  config.validate();
  cluster.validate();
  const auto internal = cluster.internal_links();
  const auto boundary = cluster.boundary_links();
  return episodes_over_trials(config, [&](const SimTrace& trace) {
    return std::vector<std::vector<bool>>{indicator_series(trace, internal, boundary)};
  });
}

IntervalCounts estimate_cluster_existence(const SimConfig& config, const ClusterSpec& cluster,
                                          std::int64_t m, std::int64_t first_end,
                                          std::int64_t last_end) {
  config.validate();
  cluster.validate();
  require(m >= 1 && first_end >= m && last_end >= first_end, ErrorCode::bad_interval,
          "need 1 <= m <= first_end <= last_end");
  const auto internal = cluster.internal_links();
  const auto boundary = cluster.boundary_links();

  IntervalCounts result;
  for (std::int64_t l = first_end; l <= last_end; ++l) result.ends.push_back(l);
  result.counts.assign(result.ends.size(), 0);
  for (std::int64_t trial = 0; trial < config.trials; ++trial) {
    const SimTrace trace = simulate_trial(config, static_cast<std::uint64_t>(trial), last_end + 2);
    const auto on = indicator_series(trace, internal, boundary);
    auto at = [&](std::int64_t t) { return on[static_cast<std::size_t>(t)]; };
    for (std::size_t i = 0; i < result.ends.size(); ++i) {
      const std::int64_t l = result.ends[i];
      bool hit = !at(m - 1) && !at(l + 1);
      for (std::int64_t t = m; hit && t <= l; ++t) hit = at(t);
      if (hit) ++result.counts[i];
    }
    ++result.trials;
  }
  return result;
}

IntervalCounts estimate_omega_stable(const SimConfig& config, std::int64_t start,
                                     std::int64_t window, std::span<const std::int64_t> ends) {
  config.validate();
  require(!ends.empty(), ErrorCode::invalid_argument, "no end steps requested");
  IntervalCounts result;
  result.ends.assign(ends.begin(), ends.end());
  result.counts.assign(ends.size(), 0);
  for (std::int64_t trial = 0; trial < config.trials; ++trial) {
    const SimTrace trace =
        simulate_trial(config, static_cast<std::uint64_t>(trial), ends.back() + 1);
    for (std::size_t i = 0; i < ends.size(); ++i) {
      const StabilityQuery query{start, ends[i], window};
      std::vector<bool> path;
      for (std::int64_t t = start; t <= ends[i]; ++t) path.push_back(trace.good(1, t));
      if (is_omega_stable(path, query)) ++result.counts[i];
    }
    ++result.trials;
  }
  return result;
}

}  // namespace vanet::reference
