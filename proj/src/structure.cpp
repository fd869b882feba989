#include "tsfl/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tsfl/errors.hpp"

namespace tsfl {
namespace {

constexpr double kRoutingNoise = 1e-12;

double share(const FacilityBlock& f, Objective objective) {
  switch (objective) {
    case Objective::kSurplus:
      return f.surplus;
    case Objective::kProfit:
      return f.profit;
    case Objective::kThroughput:
      return f.demand_flow;
  }
  return f.surplus;
}

bool has_routing(const FractionalSolution& sol, const FacilityBlock& f) {
  for (int j = 0; j < sol.num_nodes(); ++j) {
    if (demand_mass(f, j) > 0 || supply_mass(f, j) > 0) return true;
  }
  return false;
}

// Largest factor by which the facility can be scaled before it is fully open
// or one of its nodes becomes fully utilized.
double scale_limit(const FractionalSolution& sol, int slot) {
  const FacilityBlock& f = sol.facilities[slot];
  double theta = 1.0 / f.y;
  for (int j = 0; j < sol.num_nodes(); ++j) {
    const double dm = demand_mass(f, j);
    if (dm > 0) {
      const double others = sol.demand_utilization[j] - dm;
      theta = std::min(theta, (1.0 - others) / dm);
    }
    const double sm = supply_mass(f, j);
    if (sm > 0) {
      const double others = sol.supply_utilization[j] - sm;
      theta = std::min(theta, (1.0 - others) / sm);
    }
  }
  return std::max(theta, 1.0);
}

void apply_scale(FractionalSolution& sol, int slot, double factor) {
  scale_facility(sol, slot, factor);
  FacilityBlock& f = sol.facilities[slot];
  if (f.y > 1.0) f.y = 1.0;
  resync_level_masses(sol);
  refresh_accounts(sol);
}

}  // namespace

bool is_partial(const FacilityBlock& f) {
  return f.y > 0.0 && f.y < 1.0 - kOpenTol;
}

bool is_fully_utilized_demand(const FractionalSolution& sol, NodeId j) {
  return sol.demand_utilization[j] >= 1.0 - kFullUtilizationTol;
}

bool is_fully_utilized_supply(const FractionalSolution& sol, NodeId j) {
  return sol.supply_utilization[j] >= 1.0 - kFullUtilizationTol;
}

bool is_compliant(const FractionalSolution& sol, int slot) {
  const FacilityBlock& f = sol.facilities[slot];
  if (!is_partial(f)) return true;
  for (int j = 0; j < sol.num_nodes(); ++j) {
    if (demand_mass(f, j) > 0 && is_fully_utilized_demand(sol, j)) return true;
    if (supply_mass(f, j) > 0 && is_fully_utilized_supply(sol, j)) return true;
  }
  return false;
}

FractionalSolution consolidate_prices(const Instance& instance,
                                      const FractionalSolution& sol) {
  FractionalSolution out = sol;
  const int n = sol.num_nodes();
  for (int j = 0; j < n; ++j) {
    for (int side = 0; side < 2; ++side) {
      const NodeMarket& m = side == 0 ? sol.demand[j] : sol.supply[j];
      const Curve& curve =
          side == 0 ? instance.nodes[j].demand : instance.nodes[j].supply;
      double mean = 0.0;
      for (size_t k = 1; k < m.levels.size(); ++k) mean += m.levels[k].level * m.mass[k];
      std::vector<double> moved(sol.facilities.size(), 0.0);
      double routed = 0.0;
      for (size_t i = 0; i < sol.facilities.size(); ++i) {
        const auto& z = side == 0 ? sol.facilities[i].demand[j]
                                  : sol.facilities[i].supply[j];
        for (size_t k = 1; k < z.size(); ++k) {
          moved[i] += z[k] * m.levels[k].level;
          routed += z[k];
        }
      }
      NodeMarket& target = side == 0 ? out.demand[j] : out.supply[j];
      target.levels = {curve.at_level(0.0)};
      target.mass = {1.0};
      if (mean <= 0.0) {
        if (routed > kRoutingNoise) {
          throw InvariantError("node " + std::to_string(j) +
                               " routes flow but has zero mean level");
        }
      } else {
        target.levels.push_back(curve.at_level(mean));
        target.mass = {0.0, 1.0};
      }
      for (size_t i = 0; i < sol.facilities.size(); ++i) {
        auto& z = side == 0 ? out.facilities[i].demand[j]
                            : out.facilities[i].supply[j];
        z.assign(target.levels.size(), 0.0);
        if (mean <= 0.0) continue;
        const auto& old = side == 0 ? sol.facilities[i].demand[j]
                                    : sol.facilities[i].supply[j];
        int used = 0;
        size_t last = 0;
        for (size_t k = 1; k < old.size(); ++k) {
          if (old[k] != 0.0) {
            ++used;
            last = k;
          }
        }
        // A facility already routing only at the mean level keeps its
        // routing bit for bit.
        z[1] = (used == 1 && m.levels[last].level == mean) ? old[last]
                                                           : moved[i] / mean;
      }
    }
  }
  refresh_accounts(out);
  return out;
}

RescaleResult rescale_structural(const FractionalSolution& sol,
                                 const std::vector<NodeId>& guessed,
                                 Objective objective) {
  RescaleResult result;
  FractionalSolution& s = result.solution;
  s = sol;
  refresh_accounts(s);
  RescaleReport& rep = result.report;
  rep.objective_before = s.objective(objective);
  const int m = static_cast<int>(s.facilities.size());
  auto guessed_slot = [&](int i) {
    return std::find(guessed.begin(), guessed.end(), s.facilities[i].location) !=
               guessed.end() &&
           s.facilities[i].y >= 1.0 - kOpenTol;
  };

  // Closing only helps both the objective share and profit.
  for (int i = 0; i < m; ++i) {
    FacilityBlock& f = s.facilities[i];
    if (f.y <= 0.0 || guessed_slot(i)) continue;
    const bool close = objective == Objective::kProfit
                           ? f.profit < 0.0 || !has_routing(s, f)
                           : share(f, objective) <= 0.0 || !has_routing(s, f);
    if (close) {
      scale_facility(s, i, 0.0);
      ++rep.closed_nonpositive;
    }
  }
  resync_level_masses(s);
  refresh_accounts(s);

  const int guard = 4 * m + 16;
  for (int iter = 0;; ++iter) {
    if (iter > guard) throw InvariantError("structural rescaling did not converge");
    std::vector<int> gain, loss;
    for (int i = 0; i < m; ++i) {
      if (guessed_slot(i) || is_compliant(s, i)) continue;
      (s.facilities[i].profit >= 0.0 || objective == Objective::kProfit
           ? gain
           : loss)
          .push_back(i);
    }
    if (!gain.empty()) {
      const int i = gain.front();
      apply_scale(s, i, scale_limit(s, i));
      ++rep.scaled_up;
      continue;
    }
    if (loss.size() >= 2) {
      auto ratio = [&](int i) {
        return share(s.facilities[i], objective) / -s.facilities[i].profit;
      };
      int hi = loss.front();
      int lo = loss.front();
      for (int i : loss) {
        if (ratio(i) > ratio(hi)) hi = i;
        if (ratio(i) < ratio(lo) || lo == hi) lo = i;
      }
      if (lo == hi) lo = loss.back() == hi ? loss.front() : loss.back();
      const double w_hi = share(s.facilities[hi], objective);
      const double w_lo = share(s.facilities[lo], objective);
      const double grow = scale_limit(s, hi) - 1.0;
      const double shrink_all = w_lo / w_hi;
      if (shrink_all <= grow) {
        apply_scale(s, hi, 1.0 + shrink_all);
        apply_scale(s, lo, 0.0);
      } else {
        apply_scale(s, hi, 1.0 + grow);
        apply_scale(s, lo, 1.0 - (w_hi / w_lo) * grow);
      }
      ++rep.exchanges;
      continue;
    }
    if (loss.size() == 1) {
      const int v = loss.front();
      rep.forfeited = share(s.facilities[v], objective);
      rep.closed_last_violator = true;
      apply_scale(s, v, 0.0);
    }
    break;
  }
  rep.objective_after = s.objective(objective);
  return result;
}

}  // namespace tsfl
