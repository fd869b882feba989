#include "tsfl/oracle.hpp"


#include "tsfl/driver.hpp"
#include "tsfl/errors.hpp"
#include "tsfl/parallel.hpp"
#include "tsfl/structure.hpp"

namespace tsfl {

OracleResult exact_oracle(const Instance& instance, Objective objective,
                          int jobs, long long cap) {
  const int nc = static_cast<int>(instance.candidates.size());
  if (nc >= 62 || (1LL << nc) > cap) {
    throw InputError("exact oracle refuses " + std::to_string(nc) +
                     " candidates: 2^" + std::to_string(nc) +
                     " subsets exceed the cap of " + std::to_string(cap));
  }
  const long long total = 1LL << nc;
  const int workers = std::max(1, jobs);
  std::vector<OracleResult> partial(workers);
  std::vector<std::unique_ptr<LpSolver>> solvers;
  for (int w = 0; w < workers; ++w) {
    solvers.push_back(make_default_solver());
    partial[w].solution = empty_solution(instance);
  }
  auto offer = [&](OracleResult& into, IntegralSolution&& sol) {
    const double v = sol.objective(objective);
    const std::vector<NodeId> open = sol.open_locations();
    if (better_candidate(v, open, into.value, into.open)) {
      into.value = v;
      into.open = open;
      into.solution = std::move(sol);
    }
  };
  parallel_for(static_cast<int>(total), jobs, [&](int k, int w) {
    const long long gray = k ^ (k >> 1);
    std::vector<NodeId> open;
    for (int b = 0; b < nc; ++b) {
      if (gray & (1LL << b)) open.push_back(instance.candidates[b]);
    }
    if (open.empty()) return;  // the empty solution is every worker's start
    LPModel model = build_fixed_facilities_lp(instance, objective, open);
    LpSolveResult r = solve_lp(model, 1e-7, solvers[w].get());
    if (r.status != LpStatus::kOptimal) {
      ++partial[w].infeasible;
      return;
    }
    offer(partial[w], to_integral(instance, consolidate_prices(instance, r.solution)));
  });
  OracleResult best;
  best.solution = empty_solution(instance);
  best.subsets = total;
  for (OracleResult& p : partial) {
    best.infeasible += p.infeasible;
    offer(best, std::move(p.solution));
  }
  return best;
}

}  // namespace tsfl
