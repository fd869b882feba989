#include <random>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "tsfl/driver.hpp"
#include "tsfl/generators.hpp"
#include "tsfl/model.hpp"
#include "tsfl/structure.hpp"

using namespace tsfl;

namespace {

FractionalSolution full_market(const Instance& inst) {
  const LpSolveResult r = solve_lp(build_fixed_facilities_lp(inst, Objective::kSurplus, {0}));
  REQUIRE(r.status == LpStatus::kOptimal);
  return r.solution;
}

}  // namespace

TEST_CASE("two-level lottery consolidates to its mean level") {
  const Instance inst = fixture::single_node(1.0, 6);  // levels 0, 0.2, ..., 1
  FractionalSolution sol = full_market(inst);
  NodeMarket& dm = sol.demand[0];
  REQUIRE(dm.levels[1].level == doctest::Approx(0.2));
  std::fill(dm.mass.begin(), dm.mass.end(), 0.0);
  dm.mass[1] = dm.mass[2] = 0.5;
  auto& z = sol.facilities[0].demand[0];
  std::fill(z.begin(), z.end(), 0.0);
  z[1] = z[2] = 0.5;
  refresh_accounts(sol);

  const FractionalSolution c = consolidate_prices(inst, sol);
  const NodeMarket& out = c.demand[0];
  double level = 0.0, mass = 0.0;
  for (size_t k = 1; k < out.levels.size(); ++k) {
    if (out.mass[k] > 0) {
      level = out.levels[k].level;
      mass += out.mass[k];
      CHECK(out.levels[k].marginal == doctest::Approx(2.7));
      CHECK(out.levels[k].cumulative == doctest::Approx(0.855));
    }
  }
  CHECK(level == doctest::Approx(0.3));
  CHECK(mass == doctest::Approx(1.0));
  CHECK(c.facilities[0].demand_flow == doctest::Approx(sol.facilities[0].demand_flow).epsilon(1e-12));
  CHECK(c.surplus >= sol.surplus - 1e-12);
}

TEST_CASE("single-level solutions are a fixpoint") {
  const Instance inst = fixture::single_node(1.0, 4);
  const FractionalSolution sol = full_market(inst);
  const FractionalSolution c = consolidate_prices(inst, sol);
  for (size_t i = 0; i < sol.facilities.size(); ++i) {
    CHECK(c.facilities[i].demand_flow == sol.facilities[i].demand_flow);
    CHECK(c.facilities[i].supply_flow == sol.facilities[i].supply_flow);
  }
  CHECK(c.surplus == sol.surplus);
}

TEST_CASE("consolidation preserves flows on mixed LP solutions") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomParams p;
    p.n = 3;
    p.seed = seed;
    p.L = 0.5;
    p.R = 0.5;
    p.grid_size = 5;
    const Instance inst = gen_random(p);
    const LpSolveResult a = solve_lp(build_base_lp(inst, Objective::kSurplus));
    const LpSolveResult b = solve_lp(build_base_lp(inst, Objective::kThroughput));
    REQUIRE(a.status == LpStatus::kOptimal);
    REQUIRE(b.status == LpStatus::kOptimal);
    const FractionalSolution sol = oracle::mix(a.solution, b.solution, u(rng));
    const FractionalSolution c = consolidate_prices(inst, sol);
    for (size_t i = 0; i < sol.facilities.size(); ++i) {
      CHECK(std::abs(c.facilities[i].demand_flow - sol.facilities[i].demand_flow) <= 1e-12);
      CHECK(std::abs(c.facilities[i].supply_flow - sol.facilities[i].supply_flow) <= 1e-12);
    }
    CHECK(c.surplus >= sol.surplus - 1e-9);
    CHECK(c.profit >= sol.profit - 1e-9);
  }
}

TEST_CASE("a lone partial facility is scaled back up") {
  const Instance inst = fixture::single_node(1.0, 2);
  FractionalSolution sol = full_market(inst);
  scale_facility(sol, 0, 0.5);
  resync_level_masses(sol);
  refresh_accounts(sol);
  REQUIRE_FALSE(is_compliant(sol, 0));
  const RescaleResult r = rescale_structural(sol, {}, Objective::kSurplus);
  CHECK(r.solution.facilities[0].y == doctest::Approx(1.0));
  CHECK(r.solution.surplus == doctest::Approx(2.0 * sol.surplus));
  CHECK(r.report.scaled_up == 1);
}

TEST_CASE("integral openings are left alone") {
  const Instance inst = fixture::single_node(1.0, 3);
  const FractionalSolution sol = full_market(inst);
  const RescaleResult r = rescale_structural(sol, {}, Objective::kSurplus);
  CHECK(r.solution.surplus == sol.surplus);
  CHECK(r.report.scaled_up == 0);
  CHECK(r.report.exchanges == 0);
}

TEST_CASE("rescaling strengthened LP solutions leaves every facility compliant") {
  int solved = 0;
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    RandomParams p;
    p.n = 5;
    p.seed = seed;
    p.L = 1.2;
    p.R = 0.35;
    p.grid_size = 3;
    const Instance inst = gen_random(p);
    SolverConfig cfg;
    cfg.epsilon = 0.5;
    const GuessPlan plan = enumerate_guesses(inst, cfg);
    for (long long k = 0; k < plan.count(); k += 7) {
      auto [guessed, threshold] = plan.guess(k);
      const LpSolveResult lp = solve_lp(
          build_strengthened_lp(inst, Objective::kSurplus, guessed, threshold, cfg.epsilon));
      if (lp.status != LpStatus::kOptimal) continue;
      ++solved;
      const RescaleResult r = rescale_structural(lp.solution, guessed, Objective::kSurplus);
      for (int i = 0; i < static_cast<int>(r.solution.facilities.size()); ++i) {
        CHECK(is_compliant(r.solution, i));
      }
      CHECK(r.report.objective_after >= r.report.objective_before - r.report.forfeited - 1e-7);
      CHECK(r.solution.profit >= -1e-6);
      CHECK(check_fractional(inst, r.solution, 1.0, true).ok);
    }
  }
  CHECK(solved > 20);
}
