#pragma once

#include <string>
#include <vector>

#include "tsfl/model.hpp"

namespace tsfl {

// Level masses for one side of one node. mass[0] is the outlier fraction.
struct NodeMarket {
  double volume = 0.0;
  std::vector<CurvePoint> levels;
  std::vector<double> mass;
};

// One facility position. Routing at level 0 is not tracked: the outlier mass
// lives in NodeMarket::mass[0] and needs no facility.
struct FacilityBlock {
  NodeId location = -1;
  double y = 0.0;
  std::vector<std::vector<double>> demand;  // [node][level]
  std::vector<std::vector<double>> supply;

  // Refreshed by refresh_accounts().
  double surplus = 0.0;       // W_i
  double profit = 0.0;        // R_i
  double demand_flow = 0.0;
  double supply_flow = 0.0;
};

struct FractionalSolution {
  std::vector<NodeMarket> demand;  // per node
  std::vector<NodeMarket> supply;
  std::vector<FacilityBlock> facilities;

  // Refreshed by refresh_accounts().
  std::vector<double> demand_utilization;  // eta_j
  std::vector<double> supply_utilization;  // phi_j
  double surplus = 0.0;
  double profit = 0.0;
  double throughput = 0.0;

  int num_nodes() const { return static_cast<int>(demand.size()); }
  double objective(Objective objective) const;
};

// Total routing of a node to a facility over positive levels.
double demand_mass(const FacilityBlock& f, NodeId j);
double supply_mass(const FacilityBlock& f, NodeId j);

// Recomputes per-facility and per-node accounting from the routing.
void refresh_accounts(FractionalSolution& sol);

// Resets level masses so that positive levels equal their total routing and
// the remainder is outlier mass.
void resync_level_masses(FractionalSolution& sol);

// Adds an empty facility block at `location` and returns its index.
int add_facility(FractionalSolution& sol, NodeId location);
void scale_facility(FractionalSolution& sol, int slot, double factor);

// Largest row violation of x, each row scaled by its largest coefficient.
double max_row_residual(const LinearProgram& lp, const std::vector<double>& x);

struct LpSolveResult {
  LpStatus status = LpStatus::kError;
  FractionalSolution solution;
  double objective = 0.0;      // as reported by the LP
  double max_residual = 0.0;
  int iterations = 0;
};

// Solves the model and maps the optimal basic solution back to a
// FractionalSolution. Throws SolverError on backend failure or if the
// returned point violates a row by more than `tolerance`.
LpSolveResult solve_lp(const LPModel& model, double tolerance = 1e-7,
                       LpSolver* solver = nullptr);

struct FractionalCheck {
  bool ok = true;
  double max_violation = 0.0;
  std::string first_failure;
};

// Checks the base-LP constraints (level masses, routing, opening, balance,
// lower bound, weak budget balance) on a fractional solution, allowing
// facilities anywhere within `radius_factor * R` of their nodes.
FractionalCheck check_fractional(const Instance& instance,
                                 const FractionalSolution& sol,
                                 double radius_factor, bool budget_balance,
                                 double tol = 1e-6);

}  // namespace tsfl
