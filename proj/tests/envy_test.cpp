#include "doctest.h"
#include "tsfl/envy.hpp"
#include "tsfl/errors.hpp"
#include "tsfl/generators.hpp"

using namespace tsfl;

namespace {

EnvyInstance one_node(double L) {
  EnvyInstance inst;
  inst.base.p_max = 3.0;
  inst.base.flow_lower_bound = L;
  inst.base.radius = 1.0;
  inst.base.nodes.push_back({"v", {}, {}, {}});
  inst.base.distances = {0.0};
  inst.base.candidates = {0};
  inst.prices = {1.0, 2.0, 3.0};
  inst.wages = {0.0, 0.5, 1.0};
  EnvyNode node;
  node.subtypes.push_back({1.0, make_uniform_demand_curve(1.0, 1.0, 3.0, 5, 3.0),
                           make_uniform_supply_curve(1.0, 0.0, 1.0, 5, 3.0)});
  node.subtypes.push_back({2.0, make_uniform_demand_curve(1.0, 2.0, 3.0, 5, 3.0),
                           make_uniform_supply_curve(1.0, 0.5, 1.5, 5, 3.0)});
  node.edges = {{0, 1}};
  inst.nodes.push_back(node);
  return inst;
}

}  // namespace

TEST_CASE("participation comes from the curves") {
  const EnvyInstance inst = one_node(0.5);
  CHECK(inst.demand_participation(0, 0, 0) == doctest::Approx(1.0));
  CHECK(inst.demand_participation(0, 0, 1) == doctest::Approx(0.5));
  CHECK(inst.demand_participation(0, 0, 2) == 0.0);
  CHECK(inst.supply_participation(0, 0, 0) == 0.0);
  CHECK(inst.supply_participation(0, 0, 1) == doctest::Approx(0.5));
  CHECK(inst.supply_participation(0, 1, 1) == doctest::Approx(0.0));
}

TEST_CASE("validation") {
  CHECK_NOTHROW(one_node(0.5).validate());
  EnvyInstance cyc = one_node(0.5);
  cyc.nodes[0].edges.push_back({1, 0});
  CHECK_THROWS_AS(cyc.validate(), InputError);
  EnvyInstance prices = one_node(0.5);
  prices.prices = {1.0, 2.0};
  CHECK_THROWS_AS(prices.validate(), InputError);
  EnvyInstance wages = one_node(0.5);
  wages.wages = {0.5, 1.0};
  CHECK_THROWS_AS(wages.validate(), InputError);
  EnvyInstance weight = one_node(0.5);
  weight.nodes[0].subtypes[0].weight = 0.0;
  CHECK_THROWS_AS(weight.validate(), InputError);
}

TEST_CASE("ladder rows per edge and price prefix") {
  const EnvyModel m = build_envy_lp(one_node(0.5));
  CHECK(m.model.count(ConstraintTag::kEnvyLadder) == 2 + 2);
  CHECK(m.model.count(ConstraintTag::kEnvyWeightedLower) == 1);
  CHECK(m.model.count(ConstraintTag::kFlowBalance) == 1);
  CHECK(m.model.count(ConstraintTag::kEnvyLottery) == 4);
}

TEST_CASE("lottery profit survives rescaling and rounding") {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomEnvyParams p;
    p.seed = seed;
    p.n = 3;
    const EnvyInstance inst = gen_random_envy(p);
    const EnvyLpResult lp = solve_envy_lp(inst);
    REQUIRE(lp.status == LpStatus::kOptimal);
    CHECK(lp.solution.profit == doctest::Approx(lp.objective).epsilon(1e-9));
    const EnvySolution rs = rescale_envy(inst, lp.solution);
    const EnvyRounding rd = round_envy(inst, rs);
    const LotteryPolicy policy = to_policy(inst, rd.solution);
    CHECK(policy.profit == doctest::Approx(lp.objective).epsilon(1e-6));
    CHECK(rd.trace.phase2_factor <= 4.0 + 1e-9);
    ++checked;
  }
  CHECK(checked == 10);
}

TEST_CASE("ladder draws are pure and respect the envy order") {
  const EnvyInstance inst = one_node(0.5);
  const EnvyLpResult lp = solve_envy_lp(inst);
  REQUIRE(lp.status == LpStatus::kOptimal);
  const LotteryPolicy policy = to_policy(inst, round_envy(inst, rescale_envy(inst, lp.solution)).solution);
  for (std::uint64_t d = 0; d < 2000; ++d) {
    const LadderDraw a = sample_ladder(inst, policy, 0, Side::kDemand, 5, d);
    const LadderDraw b = sample_ladder(inst, policy, 0, Side::kDemand, 5, d);
    CHECK(a.facility == b.facility);
    CHECK(a.grid_index == b.grid_index);
    CHECK(a.grid_index[0] >= a.grid_index[1]);
    const LadderDraw s = sample_ladder(inst, policy, 0, Side::kSupply, 5, d);
    CHECK(s.grid_index[0] <= s.grid_index[1]);
  }
  CHECK_THROWS_AS(sample_ladder(inst, policy, 3, Side::kDemand, 1, 0), InputError);
}

TEST_CASE("nobody trades without a facility") {
  const EnvyInstance inst = one_node(50.0);
  const EnvyLpResult lp = solve_envy_lp(inst);
  REQUIRE(lp.status == LpStatus::kOptimal);
  CHECK(lp.objective == doctest::Approx(0.0));
  const LotteryPolicy policy = to_policy(inst, round_envy(inst, rescale_envy(inst, lp.solution)).solution);
  CHECK(policy.facilities.empty());
  const LadderDraw d = sample_ladder(inst, policy, 0, Side::kDemand, 1, 0);
  CHECK(d.facility == -1);
  CHECK(d.grid_index == std::vector<int>{2, 2});
}
