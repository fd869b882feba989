#include "tsfl/queueing.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <queue>
#include <random>
#include <sstream>

#include "tsfl/errors.hpp"

namespace tsfl {
namespace {

void check_rates(const MarketRates& r) {
  for (double v : {r.lambda, r.mu, r.gamma, r.kappa}) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw InputError("arrival and abandonment rates must be positive and finite");
    }
  }
}

[[noreturn]] void truncation_failure(long long cap) {
  std::ostringstream msg;
  msg << "tail did not fall below tolerance within " << cap << " states";
  throw TruncationError(msg.str());
}

// Log-weights of one side of the chain relative to the empty state: the
// queue grows at rate `up` and shrinks at rate `down + n * abandon`.
std::vector<double> side_log_weights(double up, double down, double abandon,
                                     double tail_tol, long long cap,
                                     double* tail_ratio) {
  std::vector<double> logs;
  double acc = 0.0;
  double peak = 0.0;
  const double log_tol = std::log(tail_tol);
  for (long long n = 1;; ++n) {
    if (n > cap) truncation_failure(cap);
    const double ratio = up / (down + static_cast<double>(n) * abandon);
    acc += std::log(ratio);
    logs.push_back(acc);
    peak = std::max(peak, acc);
    const double next = up / (down + static_cast<double>(n + 1) * abandon);
    if (next < 1.0 && acc - peak < log_tol) {
      *tail_ratio = next;
      return logs;
    }
  }
}

}  // namespace

ChainDistribution stationary_distribution(const MarketRates& rates,
                                          double tail_tol, long long state_cap) {
  check_rates(rates);
  double rb = 0.0;
  double rs = 0.0;
  const std::vector<double> lb = side_log_weights(rates.lambda, rates.mu, rates.kappa,
                                                  tail_tol, state_cap, &rb);
  const std::vector<double> ls = side_log_weights(rates.mu, rates.lambda, rates.gamma,
                                                  tail_tol, state_cap, &rs);
  double peak = 0.0;
  for (double v : lb) peak = std::max(peak, v);
  for (double v : ls) peak = std::max(peak, v);
  ChainDistribution dist;
  double total = std::exp(-peak);
  dist.empty = total;
  for (double v : lb) {
    dist.buyer_queue.push_back(std::exp(v - peak));
    total += dist.buyer_queue.back();
  }
  for (double v : ls) {
    dist.seller_queue.push_back(std::exp(v - peak));
    total += dist.seller_queue.back();
  }
  dist.empty /= total;
  for (double& p : dist.buyer_queue) p /= total;
  for (double& p : dist.seller_queue) p /= total;
  return dist;
}

AbandonmentResult chain_abandonment_probability(const MarketRates& rates,
                                                double tail_tol,
                                                long long state_cap) {
  const ChainDistribution dist = stationary_distribution(rates, tail_tol, state_cap);
  double rate = 0.0;
  for (size_t n = 0; n < dist.buyer_queue.size(); ++n) {
    rate += dist.buyer_queue[n] * static_cast<double>(n + 1) * rates.kappa;
  }
  for (size_t n = 0; n < dist.seller_queue.size(); ++n) {
    rate += dist.seller_queue[n] * static_cast<double>(n + 1) * rates.gamma;
  }
  AbandonmentResult out;
  out.probability = rate / (rates.lambda + rates.mu);
  out.states = static_cast<long long>(dist.buyer_queue.size() +
                                      dist.seller_queue.size() + 1);
  const double last_b = dist.buyer_queue.empty() ? 0.0 : dist.buyer_queue.back();
  const double last_s = dist.seller_queue.empty() ? 0.0 : dist.seller_queue.back();
  // Neglected states carry at most a geometric tail of the last weight; each
  // abandons at a rate bounded by the incoming arrival rate plus its queue.
  out.error_estimate = 4.0 * (last_b + last_s) *
                       static_cast<double>(out.states) *
                       std::max(rates.kappa, rates.gamma) /
                       (rates.lambda + rates.mu);
  return out;
}

AbandonmentResult abandonment_probability(const MarketRates& rates,
                                          double tail_tol, long long state_cap) {
  check_rates(rates);
  if (rates.lambda != rates.mu) {
    return chain_abandonment_probability(rates, tail_tol, state_cap);
  }
  const double lambda = rates.lambda;
  double inv = 1.0;
  double a = 1.0;
  double b = 1.0;
  long long n = 1;
  for (;; ++n) {
    if (n > state_cap) truncation_failure(state_cap);
    a /= 1.0 + static_cast<double>(n) * rates.gamma / lambda;
    b /= 1.0 + static_cast<double>(n) * rates.kappa / lambda;
    inv += a + b;
    if (a + b < tail_tol) break;
  }
  const double ra = 1.0 / (1.0 + static_cast<double>(n + 1) * rates.gamma / lambda);
  const double rb = 1.0 / (1.0 + static_cast<double>(n + 1) * rates.kappa / lambda);
  const double tail = a * ra / (1.0 - ra) + b * rb / (1.0 - rb);
  AbandonmentResult out;
  out.probability = 1.0 / inv;
  out.error_estimate = tail / (inv * inv);
  out.states = n;
  return out;
}

double sufficient_flow(double gamma, double kappa, double eta) {
  if (!(eta > 0) || !(gamma > 0) || !(kappa > 0)) {
    throw InputError("sufficient_flow needs positive gamma, kappa and eta");
  }
  return 1.5 * std::min(gamma, kappa) / (eta * eta);
}

NecessaryFlow necessary_flow(double gamma, double kappa, double eta) {
  if (!(eta > 0) || eta > 1.0 / 6.0) {
    throw InputError("necessary_flow needs 0 < eta <= 1/6");
  }
  if (!(gamma > 0) || !(kappa > 0)) {
    throw InputError("necessary_flow needs positive gamma and kappa");
  }
  return {std::min(gamma, kappa) / (14000.0 * eta * eta), 1.0 - eta, 1.0 + eta};
}

Sandwich sandwich_check(double c) {
  if (!(c > 0) || c > 1.0) throw InputError("sandwich_check needs 0 < c <= 1");
  Sandwich s;
  s.lower = std::sqrt(c) / 7.0;
  s.upper = std::min(std::sqrt(1.5 * c), 1.0);
  s.exact = abandonment_probability({1.0, 1.0, c, c}).probability;
  s.holds = s.lower <= s.exact && s.exact <= s.upper;
  return s;
}

SimulationResult simulate_fifo(const MarketRates& rates, double horizon,
                               int replications, std::uint64_t seed) {
  check_rates(rates);
  if (!(horizon > 0) || replications < 1) {
    throw InputError("simulation needs a positive horizon and replications");
  }
  SimulationResult out;
  for (int rep = 0; rep < replications; ++rep) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(rep)};
    std::mt19937_64 rng(seq);
    std::exponential_distribution<double> buyer_gap(rates.lambda);
    std::exponential_distribution<double> seller_gap(rates.mu);
    std::exponential_distribution<double> buyer_patience(rates.kappa);
    std::exponential_distribution<double> seller_patience(rates.gamma);

    // Agents waiting; only one side can be nonempty at a time.
    std::deque<std::uint32_t> waiting;
    bool buyers_waiting = false;
    long long alive = 0;
    std::vector<std::uint8_t> gone;  // per queued agent: matched or abandoned
    using Deadline = std::pair<double, std::uint32_t>;
    std::priority_queue<Deadline, std::vector<Deadline>, std::greater<>> deadlines;

    long long arrivals = 0;
    long long abandoned = 0;
    double next_buyer = buyer_gap(rng);
    double next_seller = seller_gap(rng);
    while (true) {
      while (!deadlines.empty() && gone[deadlines.top().second]) deadlines.pop();
      const double next_deadline =
          deadlines.empty() ? horizon + 1.0 : deadlines.top().first;
      const double now = std::min({next_buyer, next_seller, next_deadline});
      if (now > horizon) break;
      if (now == next_deadline) {
        gone[deadlines.top().second] = 1;
        deadlines.pop();
        --alive;
        ++abandoned;
        continue;
      }
      const bool buyer = now == next_buyer;
      ++arrivals;
      if (buyer) {
        next_buyer = now + buyer_gap(rng);
      } else {
        next_seller = now + seller_gap(rng);
      }
      if (alive > 0 && buyers_waiting != buyer) {
        while (gone[waiting.front()]) waiting.pop_front();
        gone[waiting.front()] = 1;
        waiting.pop_front();
        --alive;
        continue;
      }
      const std::uint32_t id = static_cast<std::uint32_t>(gone.size());
      gone.push_back(0);
      buyers_waiting = buyer;
      waiting.push_back(id);
      ++alive;
      const double patience = buyer ? buyer_patience(rng) : seller_patience(rng);
      deadlines.push({now + patience, id});
    }
    out.arrivals += arrivals;
    out.abandoned += abandoned;
    out.replications.push_back(arrivals > 0 ? static_cast<double>(abandoned) /
                                                  static_cast<double>(arrivals)
                                            : 0.0);
  }
  double sum = 0.0;
  for (double v : out.replications) sum += v;
  out.mean = sum / replications;
  if (replications > 1) {
    double ss = 0.0;
    for (double v : out.replications) ss += (v - out.mean) * (v - out.mean);
    out.stderr_ = std::sqrt(ss / (replications - 1) / replications);
  }
  return out;
}

EdfBound edf_abandonment_bound(double lambda, double mean_buyer_deadline,
                               double mean_seller_deadline) {
  if (!(lambda > 0) || !(mean_buyer_deadline > 0) || !(mean_seller_deadline > 0)) {
    throw InputError("EDF bound needs positive rate and deadlines");
  }
  EdfBound b;
  b.buyers = 1.0 / (1.0 + lambda * mean_buyer_deadline);
  b.sellers = 1.0 / (1.0 + lambda * mean_seller_deadline);
  b.overall = 2.0 / (2.0 + lambda * mean_buyer_deadline + lambda * mean_seller_deadline);
  return b;
}

double edf_weight_lower_bound(double eta) {
  if (!(eta > 0)) throw InputError("eta must be positive");
  return 2.0 / eta;
}

}  // namespace tsfl
