#include "doctest.h"
#include "support/fixtures.hpp"
#include "tsfl/driver.hpp"
#include "tsfl/errors.hpp"
#include "tsfl/generators.hpp"
#include "tsfl/model.hpp"
#include "tsfl/rounding.hpp"
#include "tsfl/structure.hpp"

using namespace tsfl;

namespace {

FractionalSolution all_outliers(const Instance& inst) {
  const LpSolveResult r = solve_lp(build_fixed_facilities_lp(inst, Objective::kSurplus, {}));
  REQUIRE(r.status == LpStatus::kOptimal);
  return r.solution;
}

}  // namespace

TEST_CASE("two half-open facilities sharing a full node merge at that node") {
  const Instance inst = fixture::line({0.0, 1.0, 2.0}, 0.5, 1.0, 2);
  FractionalSolution sol = all_outliers(inst);
  for (NodeId at : {0, 2}) {
    const int i = add_facility(sol, at);
    sol.facilities[i].y = 0.5;
    sol.facilities[i].demand[1][1] = 0.5;
    sol.facilities[i].supply[1][1] = 0.5;
  }
  resync_level_masses(sol);
  refresh_accounts(sol);
  const double flow = sol.facilities[0].demand_flow + sol.facilities[1].demand_flow;

  const RoundingResult r = round_solution(inst, sol);
  int open = 0;
  for (const FacilityBlock& f : r.solution.facilities) {
    if (f.y <= 0) continue;
    ++open;
    CHECK(f.location == 1);
    CHECK(f.y == doctest::Approx(1.0));
    CHECK(f.demand_flow == doctest::Approx(flow));
  }
  CHECK(open == 1);
  CHECK(r.trace.moves.size() == 2);
  CHECK(r.trace.phase1_factor == 0.0);
  CHECK(r.solution.surplus == doctest::Approx(sol.surplus));
}

TEST_CASE("integral input needs no moves") {
  const Instance inst = fixture::line({0.0, 1.0}, 0.5, 1.0, 3);
  const LpSolveResult lp = solve_lp(build_fixed_facilities_lp(inst, Objective::kSurplus, {0}));
  REQUIRE(lp.status == LpStatus::kOptimal);
  const RoundingResult r = round_solution(inst, lp.solution);
  CHECK(r.trace.moves.empty());
}

TEST_CASE("non-compliant partial facility is an invariant error") {
  const Instance inst = fixture::line({0.0, 1.0}, 0.5, 1.0, 2);
  FractionalSolution sol = all_outliers(inst);
  const int i = add_facility(sol, 0);
  sol.facilities[i].y = 0.5;
  sol.facilities[i].demand[0][1] = 0.25;
  sol.facilities[i].supply[0][1] = 0.25;
  resync_level_masses(sol);
  refresh_accounts(sol);
  CHECK_THROWS_AS(round_solution(inst, sol), InvariantError);
}

TEST_CASE("rounding pipeline on random instances") {
  int rounded = 0;
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    RandomParams p;
    p.n = 5;
    p.seed = seed;
    p.L = 1.5;
    p.R = 0.3;
    p.grid_size = 3;
    const Instance inst = gen_random(p);
    SolverConfig cfg;
    cfg.epsilon = 0.5;
    const GuessPlan plan = enumerate_guesses(inst, cfg);
    for (long long k = 0; k < plan.count(); k += 5) {
      auto [guessed, threshold] = plan.guess(k);
      const LpSolveResult lp = solve_lp(
          build_strengthened_lp(inst, Objective::kSurplus, guessed, threshold, cfg.epsilon));
      if (lp.status != LpStatus::kOptimal) continue;
      const RescaleResult rs = rescale_structural(lp.solution, guessed, Objective::kSurplus);
      const RoundingResult r = round_solution(inst, rs.solution);
      ++rounded;
      for (const FacilityBlock& f : r.solution.facilities) {
        CHECK((f.y == 0.0 || f.y >= 1.0 - 1e-7));
      }
      CHECK(r.trace.phase1_factor <= 2.0 + 1e-9);
      CHECK(r.trace.phase2_factor <= 4.0 + 1e-9);
      CHECK(r.solution.surplus == doctest::Approx(rs.solution.surplus).epsilon(1e-9));
      CHECK(check_fractional(inst, r.solution, 4.0, true).ok);

      const FractionalSolution again = replay_trace(rs.solution, r.trace);
      CHECK(again.surplus == doctest::Approx(r.solution.surplus).epsilon(1e-12));
      const RoundingTrace parsed = RoundingTrace::parse(r.trace.to_text());
      CHECK(parsed.moves.size() == r.trace.moves.size());
      CHECK(parsed.phase2_factor == r.trace.phase2_factor);
    }
  }
  CHECK(rounded > 20);
}

TEST_CASE("malformed traces are rejected") {
  CHECK_THROWS_AS(RoundingTrace::parse("1 0@0 x@1 0.5\n"), InputError);
  const Instance inst = fixture::line({0.0}, 0.5, 1.0, 2);
  const FractionalSolution sol = all_outliers(inst);
  CHECK_THROWS_AS(replay_trace(sol, RoundingTrace::parse("1 3@0 0@0 0.5\n")), InputError);
}
