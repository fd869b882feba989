#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsfl/integral.hpp"

namespace tsfl {

struct SolverConfig {
  double epsilon = 0.34;
  double delta = -1.0;  // negative: 1e-4 * W_max
  Objective objective = Objective::kSurplus;
  int jobs = 1;
  std::uint64_t seed = 0;
  long long max_guesses = 20'000'000;
  double lp_tolerance = 1e-7;
};

// All (S, threshold) pairs: S ranges over the theta-subsets of candidates
// (theta = ceil(1/epsilon)) and the threshold over lo * (1+epsilon)^k for
// k = 0..K, where lo = epsilon * delta / (2n), K = ceil(log_{1+eps}(W_max/lo)).
struct GuessPlan {
  int theta = 0;
  double w_max = 0.0;
  double delta = 0.0;
  std::vector<std::vector<NodeId>> subsets;
  std::vector<double> thresholds;

  long long count() const {
    return static_cast<long long>(subsets.size()) *
           static_cast<long long>(thresholds.size());
  }
  std::pair<const std::vector<NodeId>&, double> guess(long long k) const {
    const long long t = static_cast<long long>(thresholds.size());
    return {subsets[k / t], thresholds[k % t]};
  }
};

// Throws InputError with a sizing report if the guess count exceeds the cap.
GuessPlan enumerate_guesses(const Instance& instance, const SolverConfig& config);

std::vector<std::vector<NodeId>> subsets_of_size(const std::vector<NodeId>& items,
                                                 int size);

struct CandidateResult {
  IntegralSolution solution;
  double value = 0.0;
  std::vector<NodeId> open;
  int lp_solves = 0;
  int lp_infeasible = 0;
};

// Best solution among all open sets of size at most theta, each solved with
// the fixed-facility LP and consolidated. Returns the empty solution if
// nothing beats it.
CandidateResult brute_force_small(const Instance& instance,
                                  const SolverConfig& config);

// Strengthened LP for one guess, then rescale, round and consolidate.
struct GuessOutcome {
  LpStatus status = LpStatus::kError;
  double lp_value = 0.0;
  double rescaled_value = 0.0;
  IntegralSolution solution;
};

GuessOutcome run_guess(const Instance& instance, const SolverConfig& config,
                       const std::vector<NodeId>& guessed, double threshold,
                       LpSolver* solver = nullptr);

struct RunReport {
  std::vector<std::pair<std::string, std::string>> entries;

  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  std::string get(const std::string& key) const;
  std::string to_text() const;  // "key: value" per line
};

struct SolveOutcome {
  IntegralSolution solution;
  RunReport report;
};

SolveOutcome solve(const Instance& instance, const SolverConfig& config);

// Lexicographically smaller open set wins ties.
bool better_candidate(double value, const std::vector<NodeId>& open,
                      double best_value, const std::vector<NodeId>& best_open);

double resolve_delta(const Instance& instance, const SolverConfig& config);

}  // namespace tsfl
