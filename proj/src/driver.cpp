#include "tsfl/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <sstream>

#include "tsfl/errors.hpp"
#include "tsfl/parallel.hpp"
#include "tsfl/rounding.hpp"
#include "tsfl/structure.hpp"

namespace tsfl {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string set_text(const std::vector<NodeId>& s) {
  std::string out = "{";
  for (size_t k = 0; k < s.size(); ++k) {
    if (k) out += ",";
    out += std::to_string(s[k]);
  }
  return out + "}";
}

IntegralSolution finish(const Instance& instance, const FractionalSolution& sol,
                        const std::vector<NodeId>& guessed, Objective objective,
                        double* rescaled_value) {
  RescaleResult rescaled = rescale_structural(sol, guessed, objective);
  if (rescaled_value) *rescaled_value = rescaled.report.objective_after;
  RoundingResult rounded = round_solution(instance, rescaled.solution);
  return to_integral(instance, consolidate_prices(instance, rounded.solution));
}

}  // namespace

double resolve_delta(const Instance& instance, const SolverConfig& config) {
  return config.delta >= 0.0 ? config.delta : 1e-4 * instance.max_surplus();
}

std::vector<std::vector<NodeId>> subsets_of_size(const std::vector<NodeId>& items,
                                                 int size) {
  std::vector<std::vector<NodeId>> out;
  const int n = static_cast<int>(items.size());
  if (size < 0 || size > n) return out;
  std::vector<int> pick(size);
  for (int k = 0; k < size; ++k) pick[k] = k;
  while (true) {
    std::vector<NodeId> s;
    for (int k : pick) s.push_back(items[k]);
    out.push_back(std::move(s));
    int k = size - 1;
    while (k >= 0 && pick[k] == n - size + k) --k;
    if (k < 0) break;
    ++pick[k];
    for (int t = k + 1; t < size; ++t) pick[t] = pick[t - 1] + 1;
  }
  return out;
}

GuessPlan enumerate_guesses(const Instance& instance, const SolverConfig& config) {
  GuessPlan plan;
  plan.theta = guess_size(config.epsilon);
  plan.w_max = instance.max_surplus();
  plan.delta = resolve_delta(instance, config);
  const int n = instance.size();
  const int nc = static_cast<int>(instance.candidates.size());
  const double eps = config.epsilon;
  const double lo = eps * plan.delta / (2.0 * n);
  long long k_max = 0;
  if (lo > 0.0 && plan.w_max > lo) {
    k_max = static_cast<long long>(
        std::ceil(std::log(plan.w_max / lo) / std::log1p(eps) - 1e-9));
  }
  double subset_count = 0.0;
  if (plan.theta <= nc) {
    subset_count = 1.0;
    for (int k = 0; k < plan.theta; ++k) {
      subset_count = subset_count * (nc - k) / (k + 1);
    }
  }
  const double total = subset_count * static_cast<double>(k_max + 1);
  if (total > static_cast<double>(config.max_guesses)) {
    std::ostringstream msg;
    msg << "guess enumeration too large: " << subset_count << " subsets of size "
        << plan.theta << " x " << (k_max + 1) << " thresholds = " << total
        << " LPs exceeds the cap of " << config.max_guesses
        << "; raise epsilon or the cap";
    throw InputError(msg.str());
  }
  if (lo > 0.0) {
    for (long long k = 0; k <= k_max; ++k) {
      plan.thresholds.push_back(lo * std::pow(1.0 + eps, static_cast<double>(k)));
    }
  }
  plan.subsets = subsets_of_size(instance.candidates, plan.theta);
  return plan;
}

bool better_candidate(double value, const std::vector<NodeId>& open,
                      double best_value, const std::vector<NodeId>& best_open) {
  const double tie = 1e-9 * std::max({1.0, std::abs(value), std::abs(best_value)});
  if (value > best_value + tie) return true;
  if (value < best_value - tie) return false;
  return open < best_open;
}

CandidateResult brute_force_small(const Instance& instance,
                                  const SolverConfig& config) {
  const int theta = guess_size(config.epsilon);
  std::vector<std::vector<NodeId>> all;
  const int nc = static_cast<int>(instance.candidates.size());
  for (int size = 1; size <= std::min(theta, nc); ++size) {
    for (auto& s : subsets_of_size(instance.candidates, size)) all.push_back(std::move(s));
  }
  std::vector<std::optional<IntegralSolution>> found(all.size());
  std::vector<int> infeasible(all.size(), 0);
  std::vector<std::unique_ptr<LpSolver>> solvers;
  for (int w = 0; w < std::max(1, config.jobs); ++w) solvers.push_back(make_default_solver());
  parallel_for(static_cast<int>(all.size()), config.jobs, [&](int k, int w) {
    LPModel model = build_fixed_facilities_lp(instance, config.objective, all[k]);
    LpSolveResult r = solve_lp(model, config.lp_tolerance, solvers[w].get());
    if (r.status != LpStatus::kOptimal) {
      infeasible[k] = 1;
      return;
    }
    found[k] = to_integral(instance, consolidate_prices(instance, r.solution));
  });
  CandidateResult best;
  best.solution = empty_solution(instance);
  best.value = 0.0;
  best.lp_solves = static_cast<int>(all.size());
  for (size_t k = 0; k < all.size(); ++k) {
    best.lp_infeasible += infeasible[k];
    if (!found[k]) continue;
    const double v = found[k]->objective(config.objective);
    const std::vector<NodeId> open = found[k]->open_locations();
    if (better_candidate(v, open, best.value, best.open)) {
      best.value = v;
      best.open = open;
      best.solution = std::move(*found[k]);
    }
  }
  return best;
}

GuessOutcome run_guess(const Instance& instance, const SolverConfig& config,
                       const std::vector<NodeId>& guessed, double threshold,
                       LpSolver* solver) {
  GuessOutcome out;
  LPModel model = build_strengthened_lp(instance, config.objective, guessed,
                                        threshold, config.epsilon);
  LpSolveResult r = solve_lp(model, config.lp_tolerance, solver);
  out.status = r.status;
  if (r.status != LpStatus::kOptimal) return out;
  out.lp_value = r.solution.objective(config.objective);
  out.solution = finish(instance, r.solution, guessed, config.objective,
                        &out.rescaled_value);
  return out;
}

void RunReport::add(const std::string& key, const std::string& value) {
  entries.emplace_back(key, value);
}

void RunReport::add(const std::string& key, double value) {
  std::ostringstream out;
  out.precision(12);
  out << value;
  add(key, out.str());
}

std::string RunReport::get(const std::string& key) const {
  for (const auto& [k, v] : entries) {
    if (k == key) return v;
  }
  return "";
}

std::string RunReport::to_text() const {
  std::string out;
  for (const auto& [k, v] : entries) out += k + ": " + v + "\n";
  return out;
}

SolveOutcome solve(const Instance& instance, const SolverConfig& config) {
  const auto start = Clock::now();
  SolveOutcome outcome;
  RunReport& rep = outcome.report;
  rep.add("objective", to_string(config.objective));
  rep.add("epsilon", config.epsilon);
  const double delta = resolve_delta(instance, config);
  rep.add("delta", delta);
  rep.add("w_max", instance.max_surplus());

  IntegralSolution best = empty_solution(instance);
  double best_value = 0.0;
  std::vector<NodeId> best_open;
  std::string best_source = "empty";
  auto consider = [&](IntegralSolution sol, const std::string& source) {
    const double v = sol.objective(config.objective);
    const std::vector<NodeId> open = sol.open_locations();
    if (better_candidate(v, open, best_value, best_open)) {
      best_value = v;
      best_open = open;
      best = std::move(sol);
      best_source = source;
    }
  };

  double certified = 0.0;
  if (config.objective == Objective::kProfit) {
    const auto t0 = Clock::now();
    LpSolveResult r = solve_lp(build_base_lp(instance, config.objective),
                               config.lp_tolerance);
    rep.add("lp_solved", 1.0);
    if (r.status == LpStatus::kOptimal) {
      const double lp_value = r.solution.profit;
      rep.add("lp_value", lp_value);
      consider(finish(instance, r.solution, {}, config.objective, nullptr), "base-lp");
      certified = lp_value;
    } else {
      rep.add("lp_status", to_string(r.status));
    }
    rep.add("time_lp_s", seconds_since(t0));
  } else {
    const GuessPlan plan = enumerate_guesses(instance, config);
    rep.add("theta", static_cast<double>(plan.theta));
    rep.add("threshold_values", static_cast<double>(plan.thresholds.size()));
    rep.add("guesses", static_cast<double>(plan.count()));

    const auto t0 = Clock::now();
    CandidateResult small = brute_force_small(instance, config);
    rep.add("brute_force_subsets", static_cast<double>(small.lp_solves));
    rep.add("brute_force_value", small.value);
    rep.add("time_brute_force_s", seconds_since(t0));
    consider(small.solution, "brute-force");

    const auto t1 = Clock::now();
    const long long count = plan.count();
    struct WorkerTally {
      long long solved = 0;
      long long infeasible = 0;
      long long failed = 0;
      std::string first_failure;
      double w2 = -std::numeric_limits<double>::infinity();
      long long w2_index = -1;
      std::optional<IntegralSolution> best;
      double best_value = 0.0;
      std::vector<NodeId> best_open;
      long long best_index = -1;
    };
    const int workers = std::max(1, config.jobs);
    std::vector<WorkerTally> tallies(workers);
    std::vector<std::unique_ptr<LpSolver>> solvers;
    for (int w = 0; w < workers; ++w) solvers.push_back(make_default_solver());
    parallel_for(static_cast<int>(count), config.jobs, [&](int k, int w) {
      WorkerTally& tally = tallies[w];
      auto [subset, threshold] = plan.guess(k);
      GuessOutcome g;
      try {
        g = run_guess(instance, config, subset, threshold, solvers[w].get());
      } catch (const SolverError& e) {
        if (tally.failed++ == 0) tally.first_failure = e.what();
        return;
      }
      if (g.status != LpStatus::kOptimal) {
        ++tally.infeasible;
        return;
      }
      ++tally.solved;
      if (g.lp_value > tally.w2) {
        tally.w2 = g.lp_value;
        tally.w2_index = k;
      }
      const double v = g.solution.objective(config.objective);
      const std::vector<NodeId> open = g.solution.open_locations();
      if (!tally.best || better_candidate(v, open, tally.best_value, tally.best_open)) {
        tally.best = std::move(g.solution);
        tally.best_value = v;
        tally.best_open = open;
        tally.best_index = k;
      }
    });
    long long solved = 0;
    long long infeasible = 0;
    long long failed = 0;
    std::string first_failure;
    double w2 = -std::numeric_limits<double>::infinity();
    long long w2_index = -1;
    for (WorkerTally& t : tallies) {
      solved += t.solved;
      infeasible += t.infeasible;
      failed += t.failed;
      if (first_failure.empty()) first_failure = t.first_failure;
      if (t.w2_index >= 0 && (t.w2 > w2 || (t.w2 == w2 && t.w2_index < w2_index))) {
        w2 = t.w2;
        w2_index = t.w2_index;
      }
      if (t.best) consider(std::move(*t.best), "guess " + set_text(plan.guess(t.best_index).first));
    }
    std::string w2_guess = "none";
    double w2_threshold = 0.0;
    if (w2_index >= 0) {
      w2_guess = set_text(plan.guess(w2_index).first);
      w2_threshold = plan.guess(w2_index).second;
    }
    if (count > 0 && failed == count) {
      throw SolverError("every strengthened LP failed; first error: " + first_failure);
    }
    rep.add("lp_solved", static_cast<double>(solved));
    rep.add("lp_infeasible", static_cast<double>(infeasible));
    rep.add("lp_failed", static_cast<double>(failed));
    rep.add("time_guesses_s", seconds_since(t1));
    rep.add("best_guess", w2_guess);
    rep.add("best_guess_threshold", w2_threshold);
    rep.add("best_guess_lp_value", solved > 0 ? w2 : 0.0);
    certified = small.value;
    if (solved > 0) {
      const double slack = 1e-6 * std::max(1.0, std::abs(w2));
      certified = std::max(certified, (1.0 - config.epsilon) * w2 - slack);
    }
  }

  const FeasibilityReport check = verify_feasibility(instance, best, 4.0);
  rep.add("best_source", best_source);
  rep.add("value", best_value);
  rep.add("certified_lower_bound", certified);
  rep.add("bound_holds", best_value >= certified ? "yes" : "no");
  rep.add("open_facilities", set_text(best_open));
  rep.add("distance_factor", best.distance_factor);
  rep.add("verified", check.feasible ? "yes" : "no");
  rep.add("no_facility_opened", best.facilities.empty() ? "yes" : "no");
  rep.add("below_delta", best_value < delta ? "yes" : "no");
  rep.add("time_total_s", seconds_since(start));
  if (!check.feasible) {
    throw InvariantError("selected solution failed verification:\n" + check.to_text());
  }
  outcome.solution = std::move(best);
  return outcome;
}

}  // namespace tsfl
