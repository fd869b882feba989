#include <cmath>
#include <numeric>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tsfl/errors.hpp"
#include "tsfl/queueing.hpp"

using namespace tsfl;

TEST_CASE("unit rates give 1/(2e-3)") {
  const MarketRates r{1, 1, 1, 1};
  const double exact = 1.0 / (2.0 * std::exp(1.0) - 3.0);
  CHECK(std::abs(abandonment_probability(r).probability - exact) < 1e-12);
  CHECK(std::abs(chain_abandonment_probability(r).probability - exact) < 1e-12);
  CHECK(std::abs(oracle::chain_abandonment(1, 1, 1, 1) - exact) < 1e-12);
}

TEST_CASE("both routes agree with a dense generator solve") {
  const std::vector<MarketRates> cases = {
      {2.0, 1.5, 0.7, 1.3}, {1.0, 3.0, 0.5, 2.0}, {5.0, 5.0, 0.3, 0.5}, {0.2, 0.4, 1.0, 1.0}};
  for (const MarketRates& r : cases) {
    const double ref = oracle::chain_abandonment(r.lambda, r.mu, r.gamma, r.kappa, 120);
    CHECK(abandonment_probability(r).probability == doctest::Approx(ref).epsilon(1e-9));
    CHECK(chain_abandonment_probability(r).probability == doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("stationary distribution is a distribution") {
  const ChainDistribution d = stationary_distribution({3.0, 2.0, 1.0, 0.5});
  const double total = d.empty + std::accumulate(d.seller_queue.begin(), d.seller_queue.end(), 0.0) +
                       std::accumulate(d.buyer_queue.begin(), d.buyer_queue.end(), 0.0);
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  // More buyers than sellers arrive, so buyers queue more often.
  CHECK(std::accumulate(d.buyer_queue.begin(), d.buyer_queue.end(), 0.0) >
        std::accumulate(d.seller_queue.begin(), d.seller_queue.end(), 0.0));
}

TEST_CASE("balanced abandonment falls as the market thickens") {
  double prev = 1.0;
  for (double lambda : {0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 150.0, 1000.0}) {
    const double q = abandonment_probability({lambda, lambda, 1.0, 1.0}).probability;
    CHECK(q < prev);
    prev = q;
  }
  CHECK(abandonment_probability({150, 150, 1, 1}).probability <= 0.1);
}

TEST_CASE("flow thresholds") {
  CHECK(sufficient_flow(1, 1, 0.1) == doctest::Approx(150.0));
  CHECK(sufficient_flow(2, 1, 0.1) == doctest::Approx(150.0));
  CHECK(sufficient_flow(1, 1, 1.0 / 6.0) == doctest::Approx(54.0));
  const NecessaryFlow nf = necessary_flow(1, 1, 0.1);
  CHECK(nf.flow == doctest::Approx(1.0 / 140.0));
  CHECK(nf.ratio_lo == doctest::Approx(0.9));
  CHECK(nf.ratio_hi == doctest::Approx(1.1));
  CHECK_THROWS_AS(necessary_flow(1, 1, 0.2), InputError);
}

TEST_CASE("sandwich bounds") {
  const Sandwich one = sandwich_check(1.0);
  CHECK(one.holds);
  CHECK(one.exact == doctest::Approx(0.410426).epsilon(1e-5));
  CHECK(one.lower == doctest::Approx(1.0 / 7.0));
  CHECK(one.upper == doctest::Approx(1.0));
  const Sandwich small = sandwich_check(0.01);
  CHECK(small.holds);
  CHECK(small.lower == doctest::Approx(0.1 / 7.0));
  CHECK(small.upper == doctest::Approx(std::sqrt(0.015)));
  CHECK_THROWS_AS(sandwich_check(0.0), InputError);
  CHECK_THROWS_AS(sandwich_check(1.5), InputError);
}

TEST_CASE("truncation cap is reported") {
  CHECK_THROWS_AS(abandonment_probability({1, 2, 1, 1}, 1e-14, 3), TruncationError);
  CHECK_THROWS_AS(abandonment_probability({1, 1, -1, 1}), InputError);
}

TEST_CASE("simulation is reproducible and concordant") {
  const MarketRates r{1, 1, 1, 1};
  const SimulationResult a = simulate_fifo(r, 2000.0, 8, 17);
  const SimulationResult b = simulate_fifo(r, 2000.0, 8, 17);
  CHECK(a.mean == b.mean);
  CHECK(a.replications == b.replications);
  CHECK(simulate_fifo(r, 2000.0, 8, 18).mean != a.mean);
  const double exact = 1.0 / (2.0 * std::exp(1.0) - 3.0);
  CHECK(std::abs(a.mean - exact) <= 3.0 * a.stderr_);
  CHECK(a.arrivals > 0);
}

TEST_CASE("imbalanced markets abandon heavily") {
  const SimulationResult s = simulate_fifo({150, 75, 1, 1}, 200.0, 4, 3);
  CHECK(s.mean > 0.1);
}

TEST_CASE("EDF bounds") {
  const EdfBound b = edf_abandonment_bound(100, 1, 1);
  CHECK(b.overall == doctest::Approx(2.0 / 202.0));
  CHECK(b.buyers == doctest::Approx(b.overall));
  CHECK(b.sellers == doctest::Approx(b.overall));
  CHECK(edf_abandonment_bound(1e-9, 1e-9, 1e-9).overall == doctest::Approx(1.0));
  CHECK(edf_weight_lower_bound(0.1) == doctest::Approx(20.0));
  CHECK(edf_weight_lower_bound(0.01) == doctest::Approx(200.0));
}
