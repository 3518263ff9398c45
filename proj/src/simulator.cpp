#include "vanet/simulator.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vanet/error.hpp"

namespace vanet {

void SimConfig::validate() const {
  require(fleet_size >= 2, ErrorCode::invalid_argument, "fleet_size must be at least 2");
  require(horizon >= 1, ErrorCode::invalid_argument, "horizon must be at least 1");
  require(trials >= 1, ErrorCode::invalid_argument, "trials must be at least 1");
}

SimTrace::SimTrace(int links, std::int64_t horizon)
    : links_(links),
      horizon_(horizon),
      states_(static_cast<std::size_t>(links) * static_cast<std::size_t>(horizon), 0) {}

bool SimTrace::good(int link, std::int64_t step) const {
  return states_.at(static_cast<std::size_t>(link - 1) * static_cast<std::size_t>(horizon_) +
                    static_cast<std::size_t>(step)) != 0;
}

void SimTrace::set(int link, std::int64_t step, bool good) {
  states_.at(static_cast<std::size_t>(link - 1) * static_cast<std::size_t>(horizon_) +
             static_cast<std::size_t>(step)) = good ? 1 : 0;
}

LinkEvolver::LinkEvolver(const MarkovLink& link, std::uint64_t seed, std::uint64_t trial,
                         std::span<const int> links)
    : p_(link.p()), q_(link.q()) {
  streams_.reserve(links.size());
  states_.reserve(links.size());
  for (int id : links) {
    const CounterRng& rng = streams_.emplace_back(seed, trial, static_cast<std::uint64_t>(id));
    states_.push_back(rng.uniform(0) < link.p_good() ? 1 : 0);
  }
}

void LinkEvolver::advance() {
  ++step_;
  const auto counter = static_cast<std::uint64_t>(step_);
  for (std::size_t i = 0; i < streams_.size(); ++i) {
    const double u = streams_[i].uniform(counter);
    if (states_[i])
      states_[i] = u < p_ ? 0 : 1;
    else
      states_[i] = u < q_ ? 1 : 0;
  }
}

SimTrace simulate_trial(const SimConfig& config, std::uint64_t trial, std::int64_t horizon) {
  config.validate();
  if (horizon == 0) horizon = config.horizon;
  require(horizon >= 1, ErrorCode::invalid_argument, "horizon must be at least 1");
  SimTrace trace(config.link_count(), horizon);
  std::vector<int> ids(static_cast<std::size_t>(config.link_count()));
  std::iota(ids.begin(), ids.end(), 1);
  LinkEvolver evolver(config.link, config.seed, trial, ids);
  for (std::int64_t t = 0; t < horizon; ++t) {
    if (t > 0) evolver.advance();
    for (std::size_t i = 0; i < ids.size(); ++i) trace.set(ids[i], t, evolver.good(i));
  }
  return trace;
}

void simulate(const SimConfig& config,
              const std::function<void(std::uint64_t trial, const SimTrace&)>& sink) {
  config.validate();
  for (std::int64_t trial = 0; trial < config.trials; ++trial) {
    const auto id = static_cast<std::uint64_t>(trial);
    sink(id, simulate_trial(config, id));
  }
}

void EpisodeHistogram::record(std::int64_t length) {
  const auto bin = static_cast<std::size_t>(length - 1);
  if (counts.size() <= bin) counts.resize(bin + 1, 0);
  ++counts[bin];
  ++episodes;
}

void EpisodeHistogram::merge(const EpisodeHistogram& other) {
  if (counts.size() < other.counts.size()) counts.resize(other.counts.size(), 0);
  for (std::size_t i = 0; i < other.counts.size(); ++i) counts[i] += other.counts[i];
  episodes += other.episodes;
  discarded_initial += other.discarded_initial;
}

Pmf EpisodeHistogram::to_pmf() const {
  require(episodes > 0, ErrorCode::insufficient_data, "no completed episodes");
  Pmf pmf;
  pmf.support_start = 1;
  pmf.masses.reserve(counts.size());
  for (std::uint64_t c : counts)
    pmf.masses.push_back(static_cast<double>(c) / static_cast<double>(episodes));
  return pmf;
}

double EpisodeHistogram::mean_steps() const {
  require(episodes > 0, ErrorCode::insufficient_data, "no completed episodes");
  double sum = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    sum += static_cast<double>(i + 1) * static_cast<double>(counts[i]);
  return sum / static_cast<double>(episodes);
}

double EpisodeHistogram::mean_stderr_steps() const {
  require(episodes > 1, ErrorCode::insufficient_data, "need two episodes for a spread");
  const double mean = mean_steps();
  double sq = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double d = static_cast<double>(i + 1) - mean;
    sq += d * d * static_cast<double>(counts[i]);
  }
  const double n = static_cast<double>(episodes);
  return std::sqrt(sq / (n - 1.0) / n);
}

void IntervalCounts::merge(const IntervalCounts& other) {
  if (counts.empty()) {
    *this = other;
    return;
  }
  for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += other.counts[i];
  trials += other.trials;
}

std::vector<double> IntervalCounts::frequencies() const {
  require(trials > 0, ErrorCode::insufficient_data, "no trials");
  std::vector<double> out;
  out.reserve(counts.size());
  for (std::uint64_t c : counts)
    out.push_back(static_cast<double>(c) / static_cast<double>(trials));
  return out;
}

std::int64_t default_link_horizon(const MarkovLink& link) {
  require(link.p() > 0.0, ErrorCode::degenerate_chain, "p = 0: links never break");
  return static_cast<std::int64_t>(std::ceil(50.0 / link.p()));
}

std::int64_t default_cluster_horizon(const MarkovLink& link, const ClusterSpec& cluster) {
  const double dissolve = 1.0 - cluster_persistence(link, cluster);
  require(dissolve > 0.0, ErrorCode::degenerate_chain, "cluster never dissolves");
  return static_cast<std::int64_t>(std::ceil(50.0 / dissolve));
}

namespace {

// Runs fn(trial, partial) over all trials with one accumulator per thread,
// then merges the accumulators in thread order. Accumulators hold integer
// counts only, so the merged result does not depend on the thread count.
template <class Result, class TrialFn>
Result run_trials(std::int64_t trials, Parallelism par, const Result& empty, TrialFn fn) {
  int threads = par.threads > 0 ? par.threads : omp_get_max_threads();
  threads = static_cast<int>(std::clamp<std::int64_t>(trials, 1, threads));
  std::vector<Result> partial(static_cast<std::size_t>(threads), empty);

#pragma omp parallel for num_threads(threads) schedule(dynamic, 256)
  for (std::int64_t trial = 0; trial < trials; ++trial)
    fn(static_cast<std::uint64_t>(trial),
       partial[static_cast<std::size_t>(omp_get_thread_num())]);

  Result total = empty;
  for (const Result& r : partial) total.merge(r);
  return total;
}

// One-link counterpart of LinkEvolver with identical draws, without the
// per-link vectors.
class SingleLinkEvolver {
public:
  SingleLinkEvolver(const MarkovLink& link, std::uint64_t seed, std::uint64_t trial, int id)
      : p_(link.p()), q_(link.q()), rng_(seed, trial, static_cast<std::uint64_t>(id)),
        good_(rng_.uniform(0) < link.p_good()) {}

  std::int64_t step() const noexcept { return step_; }
  bool good() const noexcept { return good_; }
  void advance() noexcept {
    ++step_;
    const double u = rng_.uniform(static_cast<std::uint64_t>(step_));
    good_ = good_ ? !(u < p_) : u < q_;
  }

private:
  double p_;
  double q_;
  std::int64_t step_ = 0;
  CounterRng rng_;
  bool good_;
};

// Follows the episodes of `indicator` over one evolver. An episode starts at
// step t in [1, horizon) when the indicator turns on; the evolver keeps
// running past the horizon while a started episode is still open.
template <class Evolver, class Indicator>
void follow_episodes(Evolver& evolver, std::int64_t horizon, Indicator indicator,
                     EpisodeHistogram& hist) {
  bool previous = indicator(evolver);
  if (previous) ++hist.discarded_initial;
  bool open = false;
  std::int64_t began = 0;
  while (open || evolver.step() + 1 < horizon) {
    evolver.advance();
    const bool current = indicator(evolver);
    if (!previous && current) {
      open = true;
      began = evolver.step();
    } else if (previous && !current && open) {
      hist.record(evolver.step() - began);
      open = false;
    }
    previous = current;
  }
}

struct ClusterIndicator {
  std::size_t internal;  // evolver slots [0, internal) are internal links

  bool operator()(const LinkEvolver& ev) const {
    for (std::size_t i = 0; i < ev.size(); ++i)
      if (ev.good(i) != (i < internal)) return false;
    return true;
  }
};

std::vector<int> cluster_links(const ClusterSpec& cluster) {
  std::vector<int> ids = cluster.internal_links();
  const std::vector<int> boundary = cluster.boundary_links();
  ids.insert(ids.end(), boundary.begin(), boundary.end());
  return ids;
}

void check_enough(const EpisodeHistogram& hist) {
  require(hist.episodes >= kMinCompletedEpisodes, ErrorCode::insufficient_data,
          "only " + std::to_string(hist.episodes) + " completed episodes (need " +
              std::to_string(kMinCompletedEpisodes) + ")");
}

void check_cluster(const SimConfig& config, const ClusterSpec& cluster) {
  cluster.validate();
  require(cluster.fleet_size == config.fleet_size, ErrorCode::invalid_argument,
          "cluster fleet size differs from the simulated fleet");
}

}  // namespace

EpisodeHistogram estimate_link_duration(const SimConfig& config, Parallelism par) {
  config.validate();
  const int links = config.link_count();
  auto hist = run_trials(config.trials, par, EpisodeHistogram{},
                         [&](std::uint64_t trial, EpisodeHistogram& out) {
                           for (int id = 1; id <= links; ++id) {
                             SingleLinkEvolver ev(config.link, config.seed, trial, id);
                             follow_episodes(ev, config.horizon,
                                             [](const SingleLinkEvolver& e) { return e.good(); },
                                             out);
                           }
                         });
  check_enough(hist);
  return hist;
}

EpisodeHistogram estimate_cluster_lifetime(const SimConfig& config, const ClusterSpec& cluster,
                                           Parallelism par) {
  config.validate();
  check_cluster(config, cluster);
  const std::vector<int> ids = cluster_links(cluster);
  const ClusterIndicator indicator{static_cast<std::size_t>(cluster.link_count)};
  auto hist = run_trials(config.trials, par, EpisodeHistogram{},
                         [&](std::uint64_t trial, EpisodeHistogram& out) {
                           LinkEvolver ev(config.link, config.seed, trial, ids);
                           follow_episodes(ev, config.horizon, indicator, out);
                         });
  check_enough(hist);
  return hist;
}

IntervalCounts estimate_cluster_existence(const SimConfig& config, const ClusterSpec& cluster,
                                          std::int64_t m, std::int64_t first_end,
                                          std::int64_t last_end, Parallelism par) {
  config.validate();
  check_cluster(config, cluster);
  require(m >= 1, ErrorCode::invalid_argument, "formation step m must be at least 1");
  require(first_end >= m && last_end >= first_end, ErrorCode::bad_interval,
          "need m <= first_end <= last_end");
  const std::vector<int> ids = cluster_links(cluster);
  const ClusterIndicator indicator{static_cast<std::size_t>(cluster.link_count)};

  IntervalCounts empty;
  for (std::int64_t l = first_end; l <= last_end; ++l) empty.ends.push_back(l);
  empty.counts.assign(empty.ends.size(), 0);

  auto result = run_trials(config.trials, par, empty, [&](std::uint64_t trial, IntervalCounts& out) {
    ++out.trials;
    LinkEvolver ev(config.link, config.seed, trial, ids);
    while (ev.step() < m - 1) ev.advance();
    if (indicator(ev)) return;
    ev.advance();
    if (!indicator(ev)) return;
    // Present from m; find the last step of the run, stopping once past last_end.
    while (ev.step() <= last_end) {
      ev.advance();
      if (!indicator(ev)) {
        const std::int64_t end = ev.step() - 1;
        if (end >= first_end) ++out.counts[static_cast<std::size_t>(end - first_end)];
        return;
      }
    }
  });
  return result;
}

IntervalCounts estimate_omega_stable(const SimConfig& config, std::int64_t start,
                                     std::int64_t window, std::span<const std::int64_t> ends,
                                     Parallelism par) {
  config.validate();
  require(!ends.empty(), ErrorCode::invalid_argument, "no end steps requested");
  require(std::is_sorted(ends.begin(), ends.end()), ErrorCode::invalid_argument,
          "end steps must be ascending");
  StabilityQuery{start, ends.front(), window}.validate();

  IntervalCounts empty;
  empty.ends.assign(ends.begin(), ends.end());
  empty.counts.assign(ends.size(), 0);

  return run_trials(config.trials, par, empty, [&](std::uint64_t trial, IntervalCounts& out) {
    ++out.trials;
    const int ids[] = {1};
    LinkEvolver ev(config.link, config.seed, trial, ids);
    while (ev.step() < start) ev.advance();
    std::int64_t last_good = -1;
    std::size_t next = 0;
    for (std::int64_t t = start;; ev.advance(), ++t) {
      const bool good = ev.good(0);
      if (good) last_good = t;
      while (next < ends.size() && ends[next] == t) {
        if (last_good >= 0 && last_good >= t - window) ++out.counts[next];
        ++next;
      }
      if (next == ends.size()) return;
      // The next Good step comes after t; past the deadline every later end fails.
      const std::int64_t deadline = last_good < 0 ? start + window : last_good + window;
      if (!good && t >= deadline) return;
    }
  });
}

}  // namespace vanet
