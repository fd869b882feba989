#pragma once

#include <vector>

#include "tsfl/fractional.hpp"

namespace tsfl {

inline constexpr double kFullUtilizationTol = 1e-7;
inline constexpr double kOpenTol = 1e-7;

// Replaces each node's level lottery by the single level equal to its mean.
// Routing is rescaled so every facility's flow is unchanged; by regularity
// surplus and profit cannot decrease. Curve values at the new level come from
// the instance's curves.
FractionalSolution consolidate_prices(const Instance& instance,
                                      const FractionalSolution& sol);

struct RescaleReport {
  double objective_before = 0.0;
  double objective_after = 0.0;
  int closed_nonpositive = 0;
  int scaled_up = 0;
  int exchanges = 0;
  bool closed_last_violator = false;
  double forfeited = 0.0;  // objective share of the closed last violator
};

struct RescaleResult {
  FractionalSolution solution;
  RescaleReport report;
};

// A partially open facility (y in (0,1)) is compliant if some node it serves
// on the demand (supply) side is fully demand (supply) utilized.
bool is_compliant(const FractionalSolution& sol, int slot);
bool is_partial(const FacilityBlock& f);
bool is_fully_utilized_demand(const FractionalSolution& sol, NodeId j);
bool is_fully_utilized_supply(const FractionalSolution& sol, NodeId j);

// Rescales a solution of the strengthened LP for `guessed` so that every
// partially open facility is compliant. Facilities in `guessed` are left
// alone. Surplus-like objectives lose at most an epsilon fraction (from
// closing the single remaining violator); profit never decreases.
RescaleResult rescale_structural(const FractionalSolution& sol,
                                 const std::vector<NodeId>& guessed,
                                 Objective objective);

}  // namespace tsfl
