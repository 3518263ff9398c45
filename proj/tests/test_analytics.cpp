#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "vanet/analytics.hpp"
#include "vanet/error.hpp"

using namespace vanet;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::config;
}

// Cluster of s links with `gamma` boundary links inside a fleet just large enough.
ClusterSpec cluster_with(int s, int gamma) {
  switch (gamma) {
    case 0: return {1, s, s + 1};
    case 1: return {1, s, s + 2};
    default: return {2, s, s + 3};
  }
}

}  // namespace

TEST_CASE("gamma factor") {
  CHECK(gamma_factor({2, 2, 10}) == 2);
  CHECK(gamma_factor({1, 3, 10}) == 1);
  CHECK(gamma_factor({7, 3, 10}) == 1);
  CHECK(gamma_factor({1, 9, 10}) == 0);
  CHECK((ClusterSpec{2, 2, 10}.internal_links() == std::vector<int>{2, 3}));
  CHECK((ClusterSpec{2, 2, 10}.boundary_links() == std::vector<int>{1, 4}));
  CHECK(code_of([] { gamma_factor({2, 9, 10}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { gamma_factor({2, 0, 10}); }) == ErrorCode::invalid_argument);
  CHECK(code_of([] { gamma_factor({0, 1, 10}); }) == ErrorCode::invalid_argument);
}

TEST_CASE("link duration pmf") {
  const MarkovLink link(0.02, 0.3, 0.01);
  CHECK(link_duration_pmf(link, 1) == doctest::Approx(0.02).epsilon(1e-15));
  // Paths of two further steps from Good: only Good -> Good -> Bad lasts exactly 2.
  const oracle::Chain c{0.02, 0.3};
  CHECK(link_duration_pmf(link, 2) ==
        doctest::Approx(c.step(true, true) * c.step(true, false)).epsilon(1e-15));
  CHECK(link_duration_pmf(link, 2) == doctest::Approx(0.0196).epsilon(1e-14));
  CHECK(code_of([&] { link_duration_pmf(link, 0); }) == ErrorCode::invalid_argument);
  // log-linear decay with slope ln(1 - p)
  CHECK(std::log(link_duration_pmf(link, 101) / link_duration_pmf(link, 1)) ==
        doctest::Approx(100 * std::log1p(-0.02)).epsilon(1e-12));
}

TEST_CASE("link duration moments against the series") {
  {
    const MarkovLink link(0.02, 0.02, 0.01);
    const auto series = oracle::series_moments([&](auto m) { return link_duration_pmf(link, m); }, 0.01);
    const Moments mom = link_duration_moments(link);
    CHECK(series.mean == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(mom.mean == doctest::Approx(series.mean).epsilon(1e-10));
    CHECK(mom.variance == doctest::Approx(series.variance).epsilon(1e-8));
  }
  {
    const MarkovLink link(8.5e-4, 8.1e-3, 9e-4);
    const auto series = oracle::series_moments([&](auto m) { return link_duration_pmf(link, m); }, 9e-4);
    CHECK(link_duration_moments(link).mean == doctest::Approx(series.mean).epsilon(1e-9));
    CHECK(link_duration_moments(link).mean == doctest::Approx(1.0588).epsilon(1e-3));
  }
  CHECK(link_duration_moments(MarkovLink(1.0, 0.5, 0.1)).variance == 0.0);
}

TEST_CASE("cluster lifetime pmf") {
  const MarkovLink link(0.02, 0.02, 0.01);
  const ClusterSpec cars234{2, 2, 10};
  const oracle::Chain c{0.02, 0.02};
  const double one_step_break = oracle::cluster_one_step_break(c, 2, 2);
  CHECK(cluster_lifetime_pmf(link, cars234, 1) == doctest::Approx(one_step_break).epsilon(1e-13));
  CHECK(cluster_lifetime_pmf(link, cars234, 1) == doctest::Approx(0.07763).epsilon(1e-4));

  // s = 1, gamma = 0 is a single link
  const ClusterSpec pair{1, 1, 2};
  for (std::int64_t m : {1, 2, 7, 300})
    CHECK(cluster_lifetime_pmf(link, pair, m) ==
          doctest::Approx(link_duration_pmf(link, m)).epsilon(1e-13));

  CHECK(cluster_lifetime_pmf(link, cars234, 10'000'000) == 0.0);
}

TEST_CASE("cluster lifetime moments") {
  const MarkovLink link(0.02, 0.02, 0.01);
  const ClusterSpec cars234{2, 2, 10};
  const auto series = oracle::series_moments(
      [&](auto m) { return cluster_lifetime_pmf(link, cars234, m); }, 0.01);
  const Moments mom = cluster_lifetime_moments(link, cars234);
  CHECK(mom.mean == doctest::Approx(0.01 / (1 - std::pow(0.98, 4))).epsilon(1e-12));
  CHECK(mom.mean == doctest::Approx(0.1288).epsilon(1e-3));
  CHECK(mom.mean == doctest::Approx(series.mean).epsilon(1e-10));
  CHECK(mom.variance == doctest::Approx(series.variance).epsilon(1e-8));
  CHECK(mom.variance >= 0.0);

  const ClusterSpec pair{1, 1, 2};
  CHECK(cluster_lifetime_moments(link, pair).mean == doctest::Approx(link_duration_moments(link).mean));
  CHECK(cluster_lifetime_moments(link, pair).variance ==
        doctest::Approx(link_duration_moments(link).variance));

  CHECK(code_of([] {
          cluster_lifetime_moments(MarkovLink::absorbing(1.0, 1.0), ClusterSpec{1, 1, 2});
        }) == ErrorCode::degenerate_chain);
}

TEST_CASE("cluster formation probability") {
  const MarkovLink link(0.02, 0.02, 0.01);
  const ClusterSpec cars234{2, 2, 10};
  const double table = oracle::cluster_formation_table({0.02, 0.02}, 2, 2);
  CHECK(cluster_formation_prob(link, cars234) == doctest::Approx(table).epsilon(1e-12));
  CHECK(cluster_formation_prob(link, cars234) == doctest::Approx(0.004852).epsilon(1e-3));
  CHECK(cluster_formation_prob(link, cars234) < std::pow(0.5, 4));

  // p = 0 with q > 0 puts all equilibrium mass on Good.
  const MarkovLink always_good(0.0, 0.5, 1.0);
  CHECK(cluster_formation_prob(always_good, cars234) == 0.0);
  CHECK(cluster_formation_prob(always_good, ClusterSpec{1, 3, 4}) == 0.0);

  for (int gamma : {0, 1, 2})
    for (int s : {1, 2, 3}) {
      const double brute = oracle::cluster_formation_table({0.3, 0.1}, s, gamma);
      CHECK(cluster_formation_prob(MarkovLink(0.3, 0.1, 1.0), cluster_with(s, gamma)) ==
            doctest::Approx(brute).epsilon(1e-12));
    }
}

TEST_CASE("cluster existence between two steps") {
  const MarkovLink link(0.05, 0.05, 0.01);
  const ClusterSpec cars234{2, 2, 10};
  const double rho = cluster_persistence(link, cars234);
  CHECK(cluster_existence_prob(link, cars234, 15, 15) ==
        doctest::Approx(cluster_formation_prob(link, cars234) * (1 - rho)).epsilon(1e-13));
  for (std::int64_t gap : {0, 3, 11})
    CHECK(cluster_existence_prob(link, cars234, 2, 2 + gap) ==
          doctest::Approx(cluster_existence_prob(link, cars234, 40, 40 + gap)).epsilon(1e-14));
  // log-linear decay in l
  CHECK(std::log(cluster_existence_prob(link, cars234, 15, 30) /
                 cluster_existence_prob(link, cars234, 15, 15)) ==
        doctest::Approx(15 * std::log(rho)).epsilon(1e-12));
  CHECK(code_of([&] { cluster_existence_prob(link, cars234, 5, 4); }) == ErrorCode::bad_interval);
  CHECK(cluster_existence_prob(link, cars234, 1, 1'000'000) == 0.0);
}

TEST_CASE("cluster existence equals trajectory enumeration") {
  for (double p : {0.2, 0.5})
    for (double q : {0.2, 0.5})
      for (int s : {1, 2})
        for (std::int64_t gap = 0; gap <= 4; ++gap) {
          const oracle::Chain c{p, q};
          const double brute = oracle::cluster_existence_paths(c, s, 2, 3, 3 + gap);
          const double formula =
              cluster_existence_prob(MarkovLink(p, q, 1.0), cluster_with(s, 2), 3, 3 + gap);
          CHECK(std::abs(formula - brute) < 1e-12);
        }
}

TEST_CASE("pruned enumeration agrees with exhaustive enumeration") {
  const oracle::Chain c{0.2, 0.5};
  for (std::int64_t gap : {0, 1}) {
    CHECK(std::abs(oracle::cluster_existence_paths(c, 1, 2, 1, 1 + gap) -
                   oracle::cluster_existence_naive(c, 1, 2, 1, 1 + gap)) < 1e-15);
    CHECK(std::abs(oracle::cluster_existence_paths(c, 2, 2, 1, 1 + gap) -
                   oracle::cluster_existence_naive(c, 2, 2, 1, 1 + gap)) < 1e-15);
  }
}

TEST_CASE("truncate_pmf") {
  const MarkovLink link(0.02, 0.02, 0.01);
  const Pmf pmf = link_duration_distribution(link);
  CHECK(std::abs(pmf.total() - 1.0) < 1e-12);
  CHECK(pmf.tail_mass < 1e-9);
  CHECK(pmf.tail_mass == doctest::Approx(std::pow(0.98, static_cast<double>(pmf.size()))));

  const Pmf degenerate = truncate_pmf([](std::int64_t m) { return m == 1 ? 1.0 : 0.0; }, 0.0);
  CHECK(degenerate.size() == 1);
  CHECK(degenerate.masses[0] == 1.0);
  CHECK(degenerate.tail_mass == 0.0);

  const Pmf slow = link_duration_distribution(MarkovLink(8.5e-4, 8.1e-3, 9e-4));
  // smallest M with (1 - p)^M < 1e-9
  const auto expected = static_cast<std::size_t>(std::ceil(std::log(1e-9) / std::log1p(-8.5e-4)));
  CHECK(slow.size() == expected);
  CHECK(slow.size() == doctest::Approx(24400).epsilon(0.01));

  const Pmf fixed = link_duration_distribution(link, FixedHorizon{10});
  CHECK(fixed.size() == 10);
  CHECK(std::abs(fixed.total() - 1.0) < 1e-14);

  CHECK(code_of([] { truncate_pmf([](std::int64_t) { return 0.0; }, 1.0); }) ==
        ErrorCode::non_summable);
}

TEST_CASE("normalization and moment identities over the grid") {
  const std::pair<double, double> chains[] = {{0.02, 0.02}, {0.05, 0.05}, {0.3, 0.1}};
  for (auto [p, q] : chains) {
    const MarkovLink link(p, q, 0.01);
    CHECK(std::abs(link_duration_distribution(link).total() - 1.0) < 1e-9);
    for (int s : {1, 2, 3})
      for (int gamma : {0, 1, 2}) {
        const ClusterSpec cluster = cluster_with(s, gamma);
        const Pmf pmf = cluster_lifetime_distribution(link, cluster);
        CHECK(std::abs(pmf.total() - 1.0) < 1e-9);
        const auto series = oracle::series_moments(
            [&](auto m) { return cluster_lifetime_pmf(link, cluster, m); }, 0.01);
        const Moments mom = cluster_lifetime_moments(link, cluster);
        CHECK(mom.mean == doctest::Approx(series.mean).epsilon(1e-6));
        CHECK(mom.variance == doctest::Approx(series.variance).epsilon(1e-6));
      }
  }
}

TEST_CASE("existence telescopes to the formation probability") {
  for (auto [p, q] : {std::pair{0.2, 0.5}, std::pair{0.05, 0.05}}) {
    const MarkovLink link(p, q, 1.0);
    const ClusterSpec cluster{2, 2, 6};
    double sum = 0.0;
    for (std::int64_t l = 4; l < 4 + 20000; ++l) sum += cluster_existence_prob(link, cluster, 4, l);
    CHECK(std::abs(sum - cluster_formation_prob(link, cluster)) < 1e-9);
  }
}
