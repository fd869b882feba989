#include "tsfl/integral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "tsfl/errors.hpp"
#include "tsfl/structure.hpp"

namespace tsfl {

double IntegralSolution::objective(Objective objective) const {
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

std::vector<NodeId> IntegralSolution::open_locations() const {
  std::vector<NodeId> out;
  for (const OpenFacility& f : facilities) out.push_back(f.location);
  std::sort(out.begin(), out.end());
  return out;
}

IntegralSolution empty_solution(const Instance& instance) {
  IntegralSolution sol;
  const int n = instance.size();
  sol.price.assign(n, instance.p_max);
  sol.wage.assign(n, 0.0);
  sol.demand_level.assign(n, 0.0);
  sol.supply_level.assign(n, 0.0);
  return sol;
}

IntegralSolution to_integral(const Instance& instance,
                             const FractionalSolution& consolidated) {
  FractionalSolution s = consolidated;
  refresh_accounts(s);
  const int n = instance.size();
  IntegralSolution out = empty_solution(instance);
  for (int j = 0; j < n; ++j) {
    for (int side = 0; side < 2; ++side) {
      const NodeMarket& m = side == 0 ? s.demand[j] : s.supply[j];
      int active = 0;
      for (size_t k = 1; k < m.levels.size(); ++k) {
        if (m.mass[k] > 0.0) {
          ++active;
          (side == 0 ? out.demand_level : out.supply_level)[j] = m.levels[k].level;
          (side == 0 ? out.price : out.wage)[j] = m.levels[k].marginal;
        }
      }
      if (active > 1) {
        throw InvariantError("node " + std::to_string(j) +
                             " has more than one active level; consolidate first");
      }
    }
  }
  std::map<NodeId, int> by_location;
  for (const FacilityBlock& f : s.facilities) {
    bool routes = false;
    for (int j = 0; j < n && !routes; ++j) {
      routes = demand_mass(f, j) > 0.0 || supply_mass(f, j) > 0.0;
    }
    if (f.y <= 0.0) {
      if (routes) throw InvariantError("closed facility carries routing");
      continue;
    }
    if (f.y < 1.0 - kOpenTol) {
      throw InvariantError("facility at node " + std::to_string(f.location) +
                           " is only partially open");
    }
    if (!routes) continue;
    auto [it, fresh] = by_location.try_emplace(f.location,
                                               static_cast<int>(out.facilities.size()));
    if (fresh) {
      out.facilities.push_back({f.location, 0, 0, 0, 0});
      out.demand_routing.emplace_back(n, 0.0);
      out.supply_routing.emplace_back(n, 0.0);
    }
    const int idx = it->second;
    OpenFacility& o = out.facilities[idx];
    o.demand_flow += f.demand_flow;
    o.supply_flow += f.supply_flow;
    o.surplus += f.surplus;
    o.profit += f.profit;
    for (int j = 0; j < n; ++j) {
      out.demand_routing[idx][j] += demand_mass(f, j);
      out.supply_routing[idx][j] += supply_mass(f, j);
      if (demand_mass(f, j) > 0 || supply_mass(f, j) > 0) {
        out.distance_factor =
            std::max(out.distance_factor,
                     instance.radius > 0
                         ? instance.distance(j, f.location) / instance.radius
                         : 0.0);
      }
    }
  }
  out.surplus = s.surplus;
  out.profit = s.profit;
  out.throughput = s.throughput;
  return out;
}

std::string FeasibilityReport::to_text() const {
  std::ostringstream out;
  out.precision(12);
  out << "feasible: " << (feasible ? "yes" : "no") << "\n";
  for (const CheckFamily& f : families) {
    out << f.name << ": " << (f.passed ? "pass" : "FAIL") << " (worst "
        << f.worst << ")";
    if (!f.detail.empty()) out << " " << f.detail;
    out << "\n";
  }
  out << "surplus: " << surplus << "\n";
  out << "profit: " << profit << "\n";
  out << "throughput: " << throughput << "\n";
  return out.str();
}

FeasibilityReport verify_feasibility(const Instance& instance,
                                     const IntegralSolution& sol,
                                     double radius_factor, double tol) {
  FeasibilityReport rep;
  rep.families.reserve(8);  // families are referenced while later ones are added
  const int n = instance.size();
  const int nf = static_cast<int>(sol.facilities.size());
  auto family = [&](const std::string& name) -> CheckFamily& {
    rep.families.push_back({name, true, 0.0, ""});
    return rep.families.back();
  };
  auto record = [&](CheckFamily& fam, double viol, double limit,
                    const std::string& where) {
    fam.worst = std::max(fam.worst, viol);
    if (viol > limit && fam.passed) {
      fam.passed = false;
      fam.detail = where;
    }
  };

  CheckFamily& shape = family("shape");
  const bool shaped =
      static_cast<int>(sol.price.size()) == n && static_cast<int>(sol.wage.size()) == n &&
      static_cast<int>(sol.demand_level.size()) == n &&
      static_cast<int>(sol.supply_level.size()) == n &&
      static_cast<int>(sol.demand_routing.size()) == nf &&
      static_cast<int>(sol.supply_routing.size()) == nf;
  if (!shaped) {
    shape.passed = false;
    shape.detail = "array sizes do not match the instance";
    rep.feasible = false;
    return rep;
  }
  for (const OpenFacility& f : sol.facilities) {
    if (f.location < 0 || f.location >= n || !instance.is_candidate(f.location)) {
      record(shape, 1.0, 0.0, "facility at non-candidate node " +
                                  std::to_string(f.location));
    }
  }
  for (int a = 0; a < nf; ++a) {
    for (int b = a + 1; b < nf; ++b) {
      if (sol.facilities[a].location == sol.facilities[b].location) {
        record(shape, 1.0, 0.0, "two facilities share a location");
      }
    }
    if (static_cast<int>(sol.demand_routing[a].size()) != n ||
        static_cast<int>(sol.supply_routing[a].size()) != n) {
      shape.passed = false;
      shape.detail = "routing rows do not match the instance";
      rep.feasible = false;
      return rep;
    }
  }

  // Price/level consistency, then per-node values recomputed from curves.
  CheckFamily& price = family("single-price");
  std::vector<CurvePoint> dpt(n), spt(n);
  for (int j = 0; j < n; ++j) {
    const Node& node = instance.nodes[j];
    auto [dlo, dhi] = node.demand.levels_at_price(sol.price[j]);
    const double q = sol.demand_level[j];
    record(price, std::max({0.0, dlo - q, q - dhi}), 1e-9,
           "node " + std::to_string(j) + " demand level inconsistent with price");
    auto [slo, shi] = node.supply.levels_at_price(sol.wage[j]);
    const double r = sol.supply_level[j];
    record(price, std::max({0.0, slo - r, r - shi}), 1e-9,
           "node " + std::to_string(j) + " supply level inconsistent with wage");
    dpt[j] = node.demand.at_level(q);
    spt[j] = node.supply.at_level(r);
    if (sol.price[j] < 0 || sol.price[j] > instance.p_max + 1e-12 || sol.wage[j] < 0) {
      record(price, 1.0, 0.0, "node " + std::to_string(j) + " price out of range");
    }
  }

  CheckFamily& routing = family("routing");
  CheckFamily& distance = family("distance");
  for (int j = 0; j < n; ++j) {
    double dsum = 0.0;
    double ssum = 0.0;
    for (int f = 0; f < nf; ++f) {
      const double xd = sol.demand_routing[f][j];
      const double xs = sol.supply_routing[f][j];
      record(routing, std::max(-xd, -xs), tol, "negative routing");
      dsum += xd;
      ssum += xs;
      const double dist = instance.distance(j, sol.facilities[f].location);
      const double limit = radius_factor * instance.radius;
      if ((xd > 0 && sol.demand_level[j] > 0) || (xs > 0 && sol.supply_level[j] > 0)) {
        const double excess = dist - limit;
        record(distance, std::max(0.0, excess), 1e-9 * std::max(1.0, limit),
               "node " + std::to_string(j) + " routed to facility at " +
                   std::to_string(sol.facilities[f].location));
      }
    }
    record(routing, std::max(dsum, ssum) - 1.0, tol,
           "node " + std::to_string(j) + " routed more than once");
    if (sol.demand_level[j] > 0) {
      record(routing, 1.0 - dsum, tol,
             "node " + std::to_string(j) + " buyers not fully routed");
    }
    if (sol.supply_level[j] > 0) {
      record(routing, 1.0 - ssum, tol,
             "node " + std::to_string(j) + " sellers not fully routed");
    }
  }

  CheckFamily& balance = family("flow-balance");
  CheckFamily& lower = family("flow-lower");
  for (int f = 0; f < nf; ++f) {
    double dflow = 0.0;
    double sflow = 0.0;
    for (int j = 0; j < n; ++j) {
      dflow += instance.nodes[j].demand.volume() * sol.demand_level[j] *
               sol.demand_routing[f][j];
      sflow += instance.nodes[j].supply.volume() * sol.supply_level[j] *
               sol.supply_routing[f][j];
      const double xd = sol.demand_routing[f][j];
      const double xs = sol.supply_routing[f][j];
      rep.surplus += xd * dpt[j].cumulative - xs * spt[j].cumulative;
      rep.profit += xd * instance.nodes[j].demand.volume() * sol.demand_level[j] *
                        sol.price[j] -
                    xs * instance.nodes[j].supply.volume() * sol.supply_level[j] *
                        sol.wage[j];
    }
    rep.throughput += dflow;
    const std::string where = "facility at " + std::to_string(sol.facilities[f].location);
    record(balance, std::abs(dflow - sflow), tol, where);
    record(lower, instance.flow_lower_bound - dflow, tol, where);
  }

  CheckFamily& wbb = family("budget-balance");
  record(wbb, -rep.profit, tol, "total profit negative");

  for (const CheckFamily& f : rep.families) rep.feasible = rep.feasible && f.passed;
  return rep;
}

}  // namespace tsfl
