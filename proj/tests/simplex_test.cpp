#include <random>

#include "doctest.h"
#include "support/oracles.hpp"
#include "tsfl/lp_solver.hpp"

using namespace tsfl;

namespace {

LinearProgram random_lp(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> sense(0, 2);
  LinearProgram lp;
  for (int j = 0; j < n; ++j) {
    lp.objective.push_back(u(rng));
    lp.col_lower.push_back(0.0);
    lp.col_upper.push_back(1.0 + 4.0 * (u(rng) + 1.0) / 2.0);
  }
  for (int i = 0; i < m; ++i) {
    const int s = sense(rng);
    lp.row_sense.push_back(s == 0 ? RowSense::kLessEqual
                                  : (s == 1 ? RowSense::kGreaterEqual : RowSense::kEqual));
    lp.row_rhs.push_back(2.0 * u(rng));
    for (int j = 0; j < n; ++j) {
      if (u(rng) > -0.4) lp.entries.push_back({i, j, u(rng)});
    }
  }
  return lp;
}

}  // namespace

TEST_CASE("simplex matches vertex enumeration on random bounded LPs") {
  std::mt19937_64 rng(20240611);
  DenseSimplex simplex;
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const int n = 1 + trial % 4;
    const int m = 1 + (trial / 4) % 4;
    const LinearProgram lp = random_lp(rng, n, m);
    const LpResult res = simplex.solve(lp);
    const auto ref = oracle::enumerate_vertices(lp);
    CAPTURE(trial);
    if (!ref) {
      CHECK(res.status == LpStatus::kInfeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(res.status == LpStatus::kOptimal);
    CHECK(res.objective == doctest::Approx(ref->value).epsilon(1e-7));
    ++optimal;
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 20);
}

TEST_CASE("unbounded and infeasible programs") {
  DenseSimplex simplex;
  LinearProgram lp;
  lp.objective = {1.0, 0.0};
  lp.col_lower = {0.0, 0.0};
  lp.col_upper = {std::numeric_limits<double>::infinity(), 1.0};
  lp.row_sense = {RowSense::kGreaterEqual};
  lp.row_rhs = {1.0};
  lp.entries = {{0, 0, 1.0}, {0, 1, -1.0}};
  CHECK(simplex.solve(lp).status == LpStatus::kUnbounded);

  lp.col_upper[0] = 0.5;
  lp.row_sense = {RowSense::kGreaterEqual};
  lp.row_rhs = {1.0};
  CHECK(simplex.solve(lp).status == LpStatus::kInfeasible);
}

TEST_CASE("degenerate cycling example terminates at the optimum") {
  // Beale's example, which cycles under the textbook pivoting rule.
  const double inf = std::numeric_limits<double>::infinity();
  LinearProgram lp;
  lp.objective = {0.75, -20.0, 0.5, -6.0};
  lp.col_lower = {0, 0, 0, 0};
  lp.col_upper = {inf, inf, inf, inf};
  lp.row_sense = {RowSense::kLessEqual, RowSense::kLessEqual, RowSense::kLessEqual};
  lp.row_rhs = {0.0, 0.0, 1.0};
  lp.entries = {{0, 0, 0.25}, {0, 1, -8.0}, {0, 2, -1.0}, {0, 3, 9.0},
                {1, 0, 0.5},  {1, 1, -12.0}, {1, 2, -0.5}, {1, 3, 3.0},
                {2, 2, 1.0}};
  const LpResult res = DenseSimplex().solve(lp);
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(1.25));
}

TEST_CASE("equality system with redundant rows") {
  LinearProgram lp;
  lp.objective = {1.0, 2.0, 0.0};
  lp.col_lower = {0, 0, 0};
  lp.col_upper = {10, 10, 10};
  lp.row_sense = {RowSense::kEqual, RowSense::kEqual, RowSense::kLessEqual};
  lp.row_rhs = {4.0, 8.0, 3.0};
  lp.entries = {{0, 0, 1}, {0, 1, 1}, {0, 2, 1}, {1, 0, 2}, {1, 1, 2}, {1, 2, 2}, {2, 1, 1}};
  const LpResult res = DenseSimplex().solve(lp);
  REQUIRE(res.status == LpStatus::kOptimal);
  CHECK(res.objective == doctest::Approx(7.0));
  CHECK(res.x[1] == doctest::Approx(3.0));
}
