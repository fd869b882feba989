#include "tsfl/fractional.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsfl/errors.hpp"

namespace tsfl {

double FractionalSolution::objective(Objective objective) const {
  switch (objective) {
    case Objective::kSurplus:
      return surplus;
    case Objective::kProfit:
      return profit;
    case Objective::kThroughput:
      return throughput;
  }
  return surplus;
}

double demand_mass(const FacilityBlock& f, NodeId j) {
  double s = 0.0;
  const auto& z = f.demand[j];
  for (size_t k = 1; k < z.size(); ++k) s += z[k];
  return s;
}

double supply_mass(const FacilityBlock& f, NodeId j) {
  double s = 0.0;
  const auto& z = f.supply[j];
  for (size_t k = 1; k < z.size(); ++k) s += z[k];
  return s;
}

void refresh_accounts(FractionalSolution& sol) {
  const int n = sol.num_nodes();
  sol.demand_utilization.assign(n, 0.0);
  sol.supply_utilization.assign(n, 0.0);
  sol.surplus = sol.profit = sol.throughput = 0.0;
  for (FacilityBlock& f : sol.facilities) {
    f.surplus = f.profit = f.demand_flow = f.supply_flow = 0.0;
    for (int j = 0; j < n; ++j) {
      const NodeMarket& dm = sol.demand[j];
      for (size_t k = 1; k < f.demand[j].size(); ++k) {
        const double z = f.demand[j][k];
        if (z == 0.0) continue;
        const CurvePoint& p = dm.levels[k];
        f.surplus += p.cumulative * z;
        f.profit += dm.volume * p.level * p.marginal * z;
        f.demand_flow += dm.volume * p.level * z;
        sol.demand_utilization[j] += z;
      }
      const NodeMarket& sm = sol.supply[j];
      for (size_t k = 1; k < f.supply[j].size(); ++k) {
        const double z = f.supply[j][k];
        if (z == 0.0) continue;
        const CurvePoint& p = sm.levels[k];
        f.surplus -= p.cumulative * z;
        f.profit -= sm.volume * p.level * p.marginal * z;
        f.supply_flow += sm.volume * p.level * z;
        sol.supply_utilization[j] += z;
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    for (int side = 0; side < 2; ++side) {
      const NodeMarket& m = side == 0 ? sol.demand[j] : sol.supply[j];
      const double sign = side == 0 ? 1.0 : -1.0;
      for (size_t k = 0; k < m.levels.size(); ++k) {
        const CurvePoint& p = m.levels[k];
        sol.surplus += sign * p.cumulative * m.mass[k];
        sol.profit += sign * m.volume * p.level * p.marginal * m.mass[k];
        if (side == 0) sol.throughput += m.volume * p.level * m.mass[k];
      }
    }
  }
}

void resync_level_masses(FractionalSolution& sol) {
  const int n = sol.num_nodes();
  for (int j = 0; j < n; ++j) {
    for (int side = 0; side < 2; ++side) {
      NodeMarket& m = side == 0 ? sol.demand[j] : sol.supply[j];
      double routed = 0.0;
      for (size_t k = 1; k < m.levels.size(); ++k) {
        double s = 0.0;
        for (const FacilityBlock& f : sol.facilities) {
          s += side == 0 ? f.demand[j][k] : f.supply[j][k];
        }
        m.mass[k] = s;
        routed += s;
      }
      m.mass[0] = std::max(0.0, 1.0 - routed);
    }
  }
}

int add_facility(FractionalSolution& sol, NodeId location) {
  FacilityBlock f;
  f.location = location;
  const int n = sol.num_nodes();
  f.demand.resize(n);
  f.supply.resize(n);
  for (int j = 0; j < n; ++j) {
    f.demand[j].assign(sol.demand[j].levels.size(), 0.0);
    f.supply[j].assign(sol.supply[j].levels.size(), 0.0);
  }
  sol.facilities.push_back(std::move(f));
  return static_cast<int>(sol.facilities.size()) - 1;
}

void scale_facility(FractionalSolution& sol, int slot, double factor) {
  FacilityBlock& f = sol.facilities[slot];
  if (factor == 0.0) {
    f.y = 0.0;
    for (auto& v : f.demand) std::fill(v.begin(), v.end(), 0.0);
    for (auto& v : f.supply) std::fill(v.begin(), v.end(), 0.0);
    return;
  }
  f.y *= factor;
  for (auto& v : f.demand) {
    for (double& z : v) z *= factor;
  }
  for (auto& v : f.supply) {
    for (double& z : v) z *= factor;
  }
}

namespace {

double clean(double v, double lo, double hi) {
  if (std::abs(v) < 1e-12) v = 0.0;
  return std::clamp(v, lo, hi);
}

}  // namespace

double max_row_residual(const LinearProgram& lp, const std::vector<double>& x) {
  std::vector<double> activity(lp.num_rows(), 0.0);
  std::vector<double> scale(lp.num_rows(), 1.0);
  for (const LpEntry& e : lp.entries) {
    activity[e.row] += e.value * x[e.col];
    scale[e.row] = std::max(scale[e.row], std::abs(e.value));
  }
  double worst = 0.0;
  for (int i = 0; i < lp.num_rows(); ++i) {
    const double diff = activity[i] - lp.row_rhs[i];
    double viol = 0.0;
    switch (lp.row_sense[i]) {
      case RowSense::kLessEqual:
        viol = std::max(0.0, diff);
        break;
      case RowSense::kGreaterEqual:
        viol = std::max(0.0, -diff);
        break;
      case RowSense::kEqual:
        viol = std::abs(diff);
        break;
    }
    worst = std::max(worst, viol / scale[i]);
  }
  return worst;
}

LpSolveResult solve_lp(const LPModel& model, double tolerance,
                       LpSolver* solver) {
  std::unique_ptr<LpSolver> local;
  if (solver == nullptr) {
    local = make_default_solver();
    solver = local.get();
  }
  const LinearProgram& lp = model.program();
  LpResult raw = solver->solve(lp);
  LpSolveResult out;
  out.status = raw.status;
  out.iterations = raw.iterations;
  if (raw.status == LpStatus::kError) {
    throw SolverError("LP backend failed: " + raw.message);
  }
  if (raw.status != LpStatus::kOptimal) return out;
  out.objective = raw.objective;

  out.max_residual = max_row_residual(lp, raw.x);
  if (out.max_residual > tolerance) {
    std::ostringstream msg;
    msg << "LP solution violates a row by " << out.max_residual;
    throw SolverError(msg.str());
  }

  const LpLayout& lay = model.layout;
  const int n = static_cast<int>(lay.demand_levels.size());
  FractionalSolution& sol = out.solution;
  sol.demand.resize(n);
  sol.supply.resize(n);
  for (int j = 0; j < n; ++j) {
    sol.demand[j].volume = lay.demand_volume[j];
    sol.demand[j].levels = lay.demand_levels[j];
    sol.supply[j].volume = lay.supply_volume[j];
    sol.supply[j].levels = lay.supply_levels[j];
    for (int c : lay.alpha[j]) sol.demand[j].mass.push_back(clean(raw.x[c], 0.0, 1.0));
    for (int c : lay.beta[j]) sol.supply[j].mass.push_back(clean(raw.x[c], 0.0, 1.0));
  }
  const double inf = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < lay.slot_location.size(); ++i) {
    const int slot = add_facility(sol, lay.slot_location[i]);
    FacilityBlock& f = sol.facilities[slot];
    f.y = clean(raw.x[lay.y[i]], 0.0, 1.0);
    for (int j = 0; j < n; ++j) {
      for (size_t k = 1; k < lay.z_demand[i][j].size(); ++k) {
        const int c = lay.z_demand[i][j][k];
        if (c >= 0) f.demand[j][k] = clean(raw.x[c], 0.0, inf);
      }
      for (size_t k = 1; k < lay.z_supply[i][j].size(); ++k) {
        const int c = lay.z_supply[i][j][k];
        if (c >= 0) f.supply[j][k] = clean(raw.x[c], 0.0, inf);
      }
    }
  }
  refresh_accounts(sol);
  return out;
}

FractionalCheck check_fractional(const Instance& instance,
                                 const FractionalSolution& sol,
                                 double radius_factor, bool budget_balance,
                                 double tol) {
  FractionalCheck check;
  auto note = [&](double viol, const std::string& what) {
    if (viol > check.max_violation) check.max_violation = viol;
    if (viol > tol && check.ok) {
      check.ok = false;
      check.first_failure = what;
    }
  };
  FractionalSolution s = sol;
  refresh_accounts(s);
  const int n = s.num_nodes();
  for (int j = 0; j < n; ++j) {
    for (int side = 0; side < 2; ++side) {
      const NodeMarket& m = side == 0 ? s.demand[j] : s.supply[j];
      double total = 0.0;
      for (double a : m.mass) {
        note(-a, "negative level mass at node " + std::to_string(j));
        total += a;
      }
      note(std::abs(total - 1.0), "level masses do not sum to 1 at node " +
                                      std::to_string(j));
      for (size_t k = 1; k < m.levels.size(); ++k) {
        double routed = 0.0;
        for (const FacilityBlock& f : s.facilities) {
          routed += side == 0 ? f.demand[j][k] : f.supply[j][k];
        }
        note(std::abs(routed - m.mass[k]),
             "routing does not match level mass at node " + std::to_string(j));
      }
    }
  }
  for (size_t i = 0; i < s.facilities.size(); ++i) {
    const FacilityBlock& f = s.facilities[i];
    const std::string tag = "facility slot " + std::to_string(i);
    for (int j = 0; j < n; ++j) {
      const double dm = demand_mass(f, j);
      const double sm = supply_mass(f, j);
      note(dm - f.y, tag + ": demand routing exceeds opening");
      note(sm - f.y, tag + ": supply routing exceeds opening");
      if ((dm > 0 || sm > 0) &&
          instance.distance(f.location, j) >
              radius_factor * instance.radius * (1 + 1e-12) + 1e-12) {
        note(1.0, tag + ": routes node " + std::to_string(j) + " too far");
      }
      for (double z : f.demand[j]) note(-z, tag + ": negative routing");
      for (double z : f.supply[j]) note(-z, tag + ": negative routing");
    }
    note(std::abs(f.demand_flow - f.supply_flow), tag + ": flow imbalance");
    note(instance.flow_lower_bound * f.y - f.demand_flow,
         tag + ": flow below lower bound");
  }
  if (budget_balance) note(-s.profit, "weak budget balance violated");
  return check;
}

}  // namespace tsfl
