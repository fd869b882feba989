#pragma once

#include <string>
#include <vector>

#include "tsfl/fractional.hpp"

namespace tsfl {

struct OpenFacility {
  NodeId location = -1;
  double demand_flow = 0.0;
  double supply_flow = 0.0;
  double surplus = 0.0;
  double profit = 0.0;
};

// Open facilities, one posted price and wage per node, and routing fractions.
struct IntegralSolution {
  std::vector<OpenFacility> facilities;
  std::vector<double> price;         // per node; p_max if the node buys nothing
  std::vector<double> wage;          // per node; 0 if the node sells nothing
  std::vector<double> demand_level;  // participating fraction of buyers
  std::vector<double> supply_level;
  std::vector<std::vector<double>> demand_routing;  // [facility][node]
  std::vector<std::vector<double>> supply_routing;
  double surplus = 0.0;
  double profit = 0.0;
  double throughput = 0.0;
  double distance_factor = 0.0;  // largest routed distance over R

  double objective(Objective objective) const;
  std::vector<NodeId> open_locations() const;  // ascending
};

// No facility open; every node at price p_max and wage 0.
IntegralSolution empty_solution(const Instance& instance);

// Converts a consolidated solution whose openings are all 0 or >= 1 into an
// IntegralSolution. Facilities sharing a location are merged.
IntegralSolution to_integral(const Instance& instance,
                             const FractionalSolution& consolidated);

struct CheckFamily {
  std::string name;
  bool passed = true;
  double worst = 0.0;
  std::string detail;
};

struct FeasibilityReport {
  bool feasible = true;
  std::vector<CheckFamily> families;
  double surplus = 0.0;  // recomputed from the curves
  double profit = 0.0;
  double throughput = 0.0;

  std::string to_text() const;
};

// Recomputes everything from the instance's curves: distances within
// `radius_factor * R`, flow balance, flow lower bound, weak budget balance,
// routing sums, and that each price is consistent with its level.
FeasibilityReport verify_feasibility(const Instance& instance,
                                     const IntegralSolution& sol,
                                     double radius_factor, double tol = 1e-6);

}  // namespace tsfl
