#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tsfl/instance.hpp"
#include "tsfl/model.hpp"
#include "tsfl/rounding.hpp"

namespace tsfl {

// A sub-population of a node's agents. Participation at a posted price (or
// wage) is read off the curves; volumes come from the curves too.
struct Subtype {
  double weight = 1.0;  // G_jk, e.g. the deadline of this sub-type
  Curve demand;
  Curve supply;
};

struct EnvyNode {
  std::vector<Subtype> subtypes;
  // (k, k2): sub-type k envies k2, so k must be charged at least what k2 is
  // charged and paid at most what k2 is paid.
  std::vector<std::pair<int, int>> edges;
};

// Metric, L, R, p_max and candidates come from `base`; its node curves are
// unused.
struct EnvyInstance {
  Instance base;
  std::vector<EnvyNode> nodes;
  std::vector<double> prices;  // ascending, contains p_max
  std::vector<double> wages;   // ascending, contains 0

  int size() const { return base.size(); }
  // F_jk(p) and H_jk(w): participating fraction at price index t.
  double demand_participation(NodeId j, int k, int t) const;
  double supply_participation(NodeId j, int k, int t) const;
  void validate() const;
};

struct EnvyFacility {
  NodeId location = -1;
  double y = 0.0;
  std::vector<double> demand_route;  // x^d_ij per node
  std::vector<double> supply_route;
  std::vector<std::vector<std::vector<double>>> demand_lottery;  // [node][k][t]
  std::vector<std::vector<std::vector<double>>> supply_lottery;

  double profit = 0.0;
  double demand_flow = 0.0;
  double supply_flow = 0.0;
  double weighted_flow = 0.0;
};

struct EnvySolution {
  std::vector<EnvyFacility> facilities;
  std::vector<double> demand_utilization;
  std::vector<double> supply_utilization;
  double profit = 0.0;
};

void refresh_envy(const EnvyInstance& instance, EnvySolution& sol);

struct EnvyLayout {
  std::vector<NodeId> slot_location;
  std::vector<int> y;
  std::vector<std::vector<int>> xd, xs;  // [slot][node], -1 outside the ball
  std::vector<std::vector<std::vector<std::vector<int>>>> zd, zs;  // [slot][node][k][t]
};

struct EnvyModel {
  LPModel model;
  EnvyLayout layout;
};

EnvyModel build_envy_lp(const EnvyInstance& instance);

struct EnvyLpResult {
  LpStatus status = LpStatus::kError;
  EnvySolution solution;
  double objective = 0.0;
};

EnvyLpResult solve_envy_lp(const EnvyInstance& instance, double tolerance = 1e-7,
                           LpSolver* solver = nullptr);

// Closes facilities with negative profit, then scales each remaining
// partially open facility up until it is fully open or one of its nodes is
// fully routed. Profit does not decrease.
EnvySolution rescale_envy(const EnvyInstance& instance, const EnvySolution& sol);

struct EnvyRounding {
  EnvySolution solution;
  RoundingTrace trace;
};
EnvyRounding round_envy(const EnvyInstance& instance, const EnvySolution& rescaled);

// Open facilities with routing probabilities and joint lottery masses:
// demand_lottery[f][j][k][t] is the probability that a buyer of sub-type k at
// node j goes to facility f and is quoted prices[t].
struct LotteryPolicy {
  std::vector<NodeId> facilities;
  std::vector<std::vector<double>> demand_route;  // [f][j]
  std::vector<std::vector<double>> supply_route;
  std::vector<std::vector<std::vector<std::vector<double>>>> demand_lottery;
  std::vector<std::vector<std::vector<std::vector<double>>>> supply_lottery;
  double profit = 0.0;
};

// Requires every facility to be closed or fully open.
LotteryPolicy to_policy(const EnvyInstance& instance, const EnvySolution& rounded);

enum class Side { kDemand, kSupply };

struct LadderDraw {
  int facility = -1;            // index into policy.facilities, -1 if unrouted
  std::vector<int> grid_index;  // per sub-type index into prices or wages
};

// One draw of the shared-uniform lottery at a node: a facility with
// probability equal to its routing mass, then one uniform alpha mapped
// through every sub-type's conditional price (wage) CDF. Unrouted draws quote
// p_max (wage 0) to every sub-type, which means those agents do not trade.
// Pure in (seed, node, side, draw).
LadderDraw sample_ladder(const EnvyInstance& instance, const LotteryPolicy& policy,
                         NodeId node, Side side, std::uint64_t seed,
                         std::uint64_t draw);

// Profit of a policy recomputed from the lotteries.
double policy_profit(const EnvyInstance& instance, const LotteryPolicy& policy);

}  // namespace tsfl
