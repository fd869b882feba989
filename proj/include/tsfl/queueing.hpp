#pragma once

#include <cstdint>
#include <vector>

namespace tsfl {

// Two-sided market at one facility: buyers arrive at rate lambda and each
// abandons at rate kappa while waiting; sellers arrive at rate mu and abandon
// at rate gamma. Matching is instantaneous whenever both sides are present.
struct MarketRates {
  double lambda = 1.0;
  double mu = 1.0;
  double gamma = 1.0;  // seller abandonment
  double kappa = 1.0;  // buyer abandonment
};

struct AbandonmentResult {
  double probability = 0.0;     // fraction of arriving agents that abandon
  double error_estimate = 0.0;  // bound on the neglected tail's effect
  long long states = 0;         // chain states or series terms used
};

inline constexpr double kDefaultTailTol = 1e-14;
inline constexpr long long kDefaultStateCap = 1'000'000;

// Series form when lambda == mu, truncated birth-death chain otherwise.
// Throws TruncationError if the cap is reached before the tail falls below
// `tail_tol`.
AbandonmentResult abandonment_probability(const MarketRates& rates,
                                          double tail_tol = kDefaultTailTol,
                                          long long state_cap = kDefaultStateCap);

// The birth-death chain route for any rates (used as a cross-check when
// lambda == mu).
AbandonmentResult chain_abandonment_probability(
    const MarketRates& rates, double tail_tol = kDefaultTailTol,
    long long state_cap = kDefaultStateCap);

// Stationary distribution of the truncated chain, indexed from the longest
// seller queue to the longest buyer queue, with the empty state in between.
struct ChainDistribution {
  std::vector<double> seller_queue;  // [n-1] = P(n sellers waiting)
  double empty = 0.0;
  std::vector<double> buyer_queue;   // [n-1] = P(n buyers waiting)
};
ChainDistribution stationary_distribution(const MarketRates& rates,
                                          double tail_tol = kDefaultTailTol,
                                          long long state_cap = kDefaultStateCap);

// Per-facility flow needed for abandonment probability at most eta when the
// two arrival rates are balanced.
double sufficient_flow(double gamma, double kappa, double eta);

struct NecessaryFlow {
  double flow = 0.0;
  double ratio_lo = 0.0;  // rates within this ratio window count as balanced
  double ratio_hi = 0.0;
};
// Below this flow, abandonment exceeds eta for every rate ratio in the
// window. Requires 0 < eta <= 1/6.
NecessaryFlow necessary_flow(double gamma, double kappa, double eta);

struct Sandwich {
  double lower = 0.0;
  double exact = 0.0;
  double upper = 0.0;
  bool holds = false;
};
// With gamma = kappa = c * lambda and lambda = mu, the abandonment
// probability lies between sqrt(c)/7 and min(sqrt(3c/2), 1). Needs 0 < c <= 1.
Sandwich sandwich_check(double c);

struct SimulationResult {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::vector<double> replications;
  long long arrivals = 0;
  long long abandoned = 0;
};

// Discrete-event simulation with exponential patience and FIFO matching.
// Replication r uses an RNG seeded from (seed, r).
SimulationResult simulate_fifo(const MarketRates& rates, double horizon,
                               int replications, std::uint64_t seed);

struct EdfBound {
  double overall = 0.0;  // 2 / (2 + lambda*D + lambda*S)
  double buyers = 0.0;   // 1 / (1 + lambda*D)
  double sellers = 0.0;  // 1 / (1 + lambda*S)
};
// Upper bounds on abandonment under earliest-deadline-first matching when
// lambda = mu, with mean buyer deadline D and mean seller deadline S.
EdfBound edf_abandonment_bound(double lambda, double mean_buyer_deadline,
                               double mean_seller_deadline);

// Weighted flow that keeps EDF abandonment below eta (FIFO needs order
// 1/eta^2).
double edf_weight_lower_bound(double eta);

}  // namespace tsfl
