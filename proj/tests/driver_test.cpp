#include <cmath>

#include "doctest.h"
#include "support/fixtures.hpp"
#include "tsfl/driver.hpp"
#include "tsfl/errors.hpp"
#include "tsfl/generators.hpp"
#include "tsfl/oracle.hpp"

using namespace tsfl;

TEST_CASE("subsets of a given size") {
  const auto s = subsets_of_size({0, 1, 2, 3}, 2);
  CHECK(s.size() == 6);
  CHECK(s.front() == std::vector<NodeId>{0, 1});
  CHECK(s.back() == std::vector<NodeId>{2, 3});
  CHECK(subsets_of_size({0, 1}, 3).empty());
  CHECK(subsets_of_size({0, 1, 2}, 0).size() == 1);
}

TEST_CASE("guess grid size follows the geometric ladder") {
  const Instance inst = fixture::line({0, 1, 2, 3}, 1.0, 1.0);
  SolverConfig cfg;
  cfg.epsilon = 0.5;
  const GuessPlan plan = enumerate_guesses(inst, cfg);
  CHECK(plan.theta == 2);
  CHECK(plan.subsets.size() == 6);
  const double w_max = inst.max_surplus();
  CHECK(plan.w_max == doctest::Approx(w_max));
  CHECK(plan.delta == doctest::Approx(1e-4 * w_max));
  const double lo = 0.5 * plan.delta / 8.0;
  const auto k = static_cast<size_t>(std::ceil(std::log(w_max / lo) / std::log(1.5) - 1e-9));
  REQUIRE(plan.thresholds.size() == k + 1);
  CHECK(plan.thresholds.front() == doctest::Approx(lo));
  CHECK(plan.thresholds.back() >= w_max);
  CHECK(plan.thresholds[k - 1] < w_max);
  CHECK(plan.count() == static_cast<long long>(6 * (k + 1)));

  cfg.max_guesses = 10;
  CHECK_THROWS_AS(enumerate_guesses(inst, cfg), InputError);
}

TEST_CASE("maximum surplus of the gap instance") {
  const Instance gap = gen_integrality_gap(10.0, 0.5, 0.0);
  CHECK(gap.p_max == doctest::Approx(5.0));
  CHECK(gap.max_surplus() == doctest::Approx(2.0 * 10.0 * 5.0));
}

TEST_CASE("ties go to the lexicographically smaller open set") {
  CHECK(better_candidate(1.0, {0, 1}, 1.0, {0, 2}));
  CHECK_FALSE(better_candidate(1.0, {0, 2}, 1.0, {0, 1}));
  CHECK(better_candidate(1.0 + 1e-6, {3}, 1.0, {0}));
  CHECK_FALSE(better_candidate(1.0, {0}, 1.0 + 1e-6, {3}));
}

TEST_CASE("small brute force on the gap instance") {
  const Instance gap = gen_integrality_gap(10.0, 0.5, 0.01);
  SolverConfig cfg;
  cfg.epsilon = 0.5;
  const CandidateResult r = brute_force_small(gap, cfg);
  CHECK(r.value == doctest::Approx(20.0));
  CHECK(r.open == std::vector<NodeId>{0});
}

TEST_CASE("single node solve opens the node") {
  for (double eps : {0.25, 0.5, 0.9}) {
    SolverConfig cfg;
    cfg.epsilon = eps;
    const SolveOutcome out = solve(fixture::single_node(3.0, 3), cfg);
    CHECK(out.solution.surplus == doctest::Approx(6.0));
    CHECK(out.report.get("verified") == "yes");
    CHECK(out.report.get("no_facility_opened") == "no");
  }
}

TEST_CASE("unreachable lower bound yields the empty solution") {
  Instance inst = fixture::line({0, 1}, 50.0, 0.5);
  const SolveOutcome out = solve(inst, SolverConfig{});
  CHECK(out.solution.facilities.empty());
  CHECK(out.solution.surplus == 0.0);
  CHECK(out.report.get("no_facility_opened") == "yes");
}

TEST_CASE("solve meets the bicriteria bound on small random instances") {
  for (std::uint64_t seed = 100; seed < 103; ++seed) {
    RandomParams p;
    p.n = 5;
    p.seed = seed;
    p.L = 1.5;
    p.R = 0.35;
    p.grid_size = 3;
    const Instance inst = gen_random(p);
    SolverConfig cfg;
    cfg.epsilon = 0.5;
    const SolveOutcome out = solve(inst, cfg);
    const OracleResult best = exact_oracle(inst);
    const double delta = resolve_delta(inst, cfg);
    CHECK(out.solution.surplus >= (1 - cfg.epsilon) * best.value - delta);
    CHECK(verify_feasibility(inst, out.solution, 4.0).feasible);
  }
}

TEST_CASE("parallel sweep is order independent") {
  RandomParams p;
  p.n = 5;
  p.seed = 42;
  p.L = 1.0;
  p.R = 0.4;
  p.grid_size = 3;
  const Instance inst = gen_random(p);
  SolverConfig one;
  one.epsilon = 0.5;
  SolverConfig two = one;
  two.jobs = 3;
  const SolveOutcome a = solve(inst, one);
  const SolveOutcome b = solve(inst, two);
  CHECK(a.solution.surplus == b.solution.surplus);
  CHECK(a.solution.open_locations() == b.solution.open_locations());
  CHECK(a.report.get("certified_lower_bound") == b.report.get("certified_lower_bound"));
}

TEST_CASE("other objectives") {
  RandomParams p;
  p.n = 4;
  p.seed = 5;
  p.L = 1.0;
  p.R = 0.4;
  p.grid_size = 3;
  const Instance inst = gen_random(p);
  for (Objective obj : {Objective::kProfit, Objective::kThroughput}) {
    SolverConfig cfg;
    cfg.epsilon = 0.5;
    cfg.objective = obj;
    const SolveOutcome out = solve(inst, cfg);
    const FeasibilityReport rep = verify_feasibility(inst, out.solution, 4.0);
    CHECK(rep.feasible);
    CHECK(out.solution.objective(obj) >= -1e-9);
  }
}
