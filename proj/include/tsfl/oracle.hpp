#pragma once

#include <vector>

#include "tsfl/integral.hpp"

namespace tsfl {

struct OracleResult {
  IntegralSolution solution;
  double value = 0.0;
  std::vector<NodeId> open;
  long long subsets = 0;
  long long infeasible = 0;
};

inline constexpr long long kOracleSubsetCap = 1LL << 16;

// Exhaustive optimum: every subset of candidates (Gray-code order) is solved
// with the fixed-facility LP and consolidated. Throws InputError if the
// number of subsets exceeds `cap`.
OracleResult exact_oracle(const Instance& instance,
                          Objective objective = Objective::kSurplus,
                          int jobs = 1, long long cap = kOracleSubsetCap);

}  // namespace tsfl
