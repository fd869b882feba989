#pragma once

#include <string>
#include <vector>

#include "tsfl/instance.hpp"
#include "tsfl/lp_solver.hpp"

namespace tsfl {

enum class Objective { kSurplus, kProfit, kThroughput };

const char* to_string(Objective objective);
Objective parse_objective(const std::string& text);

enum class ConstraintTag {
  kBudgetBalance,   // weak budget balance across the whole market
  kSinglePrice,     // level masses per node sum to one
  kSingleRoute,     // routing at a level matches that level's mass
  kOpen,            // routing to a facility bounded by its opening
  kFlowBalance,     // demand flow equals supply flow at a facility
  kFlowLower,       // facility flow at least L times its opening
  kSurplusCap,      // per-facility objective share capped by the guess
  kForceOpen,       // guessed facilities fully open
  kTopSurplus,      // guessed facilities carry enough of the objective
  kEnvyRouting,     // envy LP: node routed at most once in total
  kEnvyLottery,     // envy LP: lottery mass matches the routing
  kEnvyLadder,      // envy LP: stochastic dominance along envy edges
  kEnvyWeightedLower,
};

const char* to_string(ConstraintTag tag);

// Index of every LP column, by role. A slot is a facility position in the
// model; slot_location maps it to its candidate node.
struct LpLayout {
  std::vector<NodeId> slot_location;
  std::vector<int> y;
  std::vector<std::vector<int>> alpha;  // [node][level]
  std::vector<std::vector<int>> beta;
  std::vector<std::vector<std::vector<int>>> z_demand;  // [slot][node][level], -1 if absent
  std::vector<std::vector<std::vector<int>>> z_supply;
  std::vector<std::vector<CurvePoint>> demand_levels;  // [node][level]
  std::vector<std::vector<CurvePoint>> supply_levels;
  std::vector<double> demand_volume;
  std::vector<double> supply_volume;
};

class LPModel {
 public:
  int add_column(std::string name, double lower, double upper,
                 double objective = 0.0);
  int add_row(ConstraintTag tag, RowSense sense, double rhs, std::string name);
  void add_term(int row, int col, double value);

  const LinearProgram& program() const { return lp_; }
  const std::vector<std::string>& column_names() const { return col_names_; }
  const std::vector<std::string>& row_names() const { return row_names_; }
  const std::vector<ConstraintTag>& row_tags() const { return tags_; }
  int count(ConstraintTag tag) const;
  int num_cols() const { return lp_.num_cols(); }
  int num_rows() const { return lp_.num_rows(); }

  // Human-readable LP dump in CPLEX-LP-like syntax.
  std::string to_lp_text() const;

  Objective objective = Objective::kSurplus;
  LpLayout layout;

 private:
  LinearProgram lp_;
  std::vector<std::string> col_names_;
  std::vector<std::string> row_names_;
  std::vector<ConstraintTag> tags_;
};

// Objective coefficient per unit of demand (or supply) routed at a level,
// i.e. that level's contribution to a facility's share of the objective.
double demand_share(Objective objective, double volume, const CurvePoint& p);
double supply_share(Objective objective, double volume, const CurvePoint& p);

LPModel build_base_lp(const Instance& instance, Objective objective);

// theta = ceil(1/epsilon) guessed facilities S, each fully open, carrying at
// least threshold * theta * (1 - epsilon) of the objective; every other
// facility's share is capped at threshold * y_i.
LPModel build_strengthened_lp(const Instance& instance, Objective objective,
                              const std::vector<NodeId>& guessed,
                              double threshold, double epsilon);

// Only the given facilities exist, all fully open.
LPModel build_fixed_facilities_lp(const Instance& instance, Objective objective,
                                  const std::vector<NodeId>& open);

int guess_size(double epsilon);

}  // namespace tsfl
