#include "tsfl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsfl/errors.hpp"

namespace tsfl {

const char* to_string(Objective objective) {
  switch (objective) {
    case Objective::kSurplus:
      return "surplus";
    case Objective::kProfit:
      return "profit";
    case Objective::kThroughput:
      return "throughput";
  }
  return "surplus";
}

Objective parse_objective(const std::string& text) {
  if (text == "surplus") return Objective::kSurplus;
  if (text == "profit") return Objective::kProfit;
  if (text == "throughput") return Objective::kThroughput;
  throw InputError("unknown objective '" + text +
                   "' (expected surplus, profit or throughput)");
}

const char* to_string(ConstraintTag tag) {
  switch (tag) {
    case ConstraintTag::kBudgetBalance:
      return "wbb";
    case ConstraintTag::kSinglePrice:
      return "single-price";
    case ConstraintTag::kSingleRoute:
      return "single-route";
    case ConstraintTag::kOpen:
      return "open";
    case ConstraintTag::kFlowBalance:
      return "flow-balance";
    case ConstraintTag::kFlowLower:
      return "flow-lower";
    case ConstraintTag::kSurplusCap:
      return "cap-W";
    case ConstraintTag::kForceOpen:
      return "force-open";
    case ConstraintTag::kTopSurplus:
      return "top-surplus";
    case ConstraintTag::kEnvyRouting:
      return "envy-routing";
    case ConstraintTag::kEnvyLottery:
      return "envy-lottery";
    case ConstraintTag::kEnvyLadder:
      return "envy-ladder";
    case ConstraintTag::kEnvyWeightedLower:
      return "envy-weighted-lower";
  }
  return "?";
}

int LPModel::add_column(std::string name, double lower, double upper,
                        double objective) {
  lp_.objective.push_back(objective);
  lp_.col_lower.push_back(lower);
  lp_.col_upper.push_back(upper);
  col_names_.push_back(std::move(name));
  return lp_.num_cols() - 1;
}

int LPModel::add_row(ConstraintTag tag, RowSense sense, double rhs,
                     std::string name) {
  lp_.row_sense.push_back(sense);
  lp_.row_rhs.push_back(rhs);
  row_names_.push_back(std::move(name));
  tags_.push_back(tag);
  return lp_.num_rows() - 1;
}

void LPModel::add_term(int row, int col, double value) {
  if (value == 0.0) return;
  lp_.entries.push_back({row, col, value});
}

int LPModel::count(ConstraintTag tag) const {
  return static_cast<int>(std::count(tags_.begin(), tags_.end(), tag));
}

std::string LPModel::to_lp_text() const {
  std::ostringstream out;
  out.precision(17);
  out << "Maximize\n obj:";
  for (int j = 0; j < lp_.num_cols(); ++j) {
    if (lp_.objective[j] != 0.0) {
      out << " " << (lp_.objective[j] >= 0 ? "+ " : "- ")
          << std::abs(lp_.objective[j]) << " " << col_names_[j];
    }
  }
  out << "\nSubject To\n";
  std::vector<std::vector<std::pair<int, double>>> rows(lp_.num_rows());
  for (const LpEntry& e : lp_.entries) rows[e.row].push_back({e.col, e.value});
  for (int i = 0; i < lp_.num_rows(); ++i) {
    out << " " << row_names_[i] << ":";
    for (auto [c, v] : rows[i]) {
      out << " " << (v >= 0 ? "+ " : "- ") << std::abs(v) << " " << col_names_[c];
    }
    if (rows[i].empty()) out << " 0";
    switch (lp_.row_sense[i]) {
      case RowSense::kLessEqual:
        out << " <= ";
        break;
      case RowSense::kGreaterEqual:
        out << " >= ";
        break;
      case RowSense::kEqual:
        out << " = ";
        break;
    }
    out << lp_.row_rhs[i] << "\n";
  }
  out << "Bounds\n";
  for (int j = 0; j < lp_.num_cols(); ++j) {
    out << " " << lp_.col_lower[j] << " <= " << col_names_[j] << " <= ";
    if (std::isinf(lp_.col_upper[j])) {
      out << "+inf";
    } else {
      out << lp_.col_upper[j];
    }
    out << "\n";
  }
  out << "End\n";
  return out.str();
}

double demand_share(Objective objective, double volume, const CurvePoint& p) {
  switch (objective) {
    case Objective::kSurplus:
      return p.cumulative;
    case Objective::kProfit:
      return volume * p.level * p.marginal;
    case Objective::kThroughput:
      return volume * p.level;
  }
  return 0.0;
}

double supply_share(Objective objective, double volume, const CurvePoint& p) {
  switch (objective) {
    case Objective::kSurplus:
      return -p.cumulative;
    case Objective::kProfit:
      return -volume * p.level * p.marginal;
    case Objective::kThroughput:
      return 0.0;
  }
  return 0.0;
}

int guess_size(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw InputError("epsilon must lie in (0, 1)");
  }
  return static_cast<int>(std::ceil(1.0 / epsilon - 1e-12));
}

namespace {

struct Strengthening {
  std::vector<NodeId> guessed;
  double threshold = 0.0;
  double epsilon = 0.0;
};

std::string idx(const char* base, std::initializer_list<int> ids) {
  std::string s = base;
  s += "[";
  bool first = true;
  for (int v : ids) {
    if (!first) s += ",";
    s += std::to_string(v);
    first = false;
  }
  return s + "]";
}

LPModel build(const Instance& instance, Objective objective,
              const std::vector<NodeId>& slots, bool fixed_open,
              const Strengthening* strong) {
  LPModel model;
  model.objective = objective;
  LpLayout& lay = model.layout;
  const int n = instance.size();
  const int m = static_cast<int>(slots.size());
  for (NodeId loc : slots) {
    if (!instance.is_candidate(loc)) {
      throw InputError("node " + std::to_string(loc) +
                       " is not a facility candidate");
    }
  }
  lay.slot_location = slots;
  lay.demand_levels.resize(n);
  lay.supply_levels.resize(n);
  lay.demand_volume.resize(n);
  lay.supply_volume.resize(n);
  for (int j = 0; j < n; ++j) {
    lay.demand_levels[j] = instance.nodes[j].demand.points();
    lay.supply_levels[j] = instance.nodes[j].supply.points();
    lay.demand_volume[j] = instance.nodes[j].demand.volume();
    lay.supply_volume[j] = instance.nodes[j].supply.volume();
    if (lay.demand_levels[j].empty() || lay.demand_levels[j][0].level != 0.0 ||
        lay.supply_levels[j].empty() || lay.supply_levels[j][0].level != 0.0) {
      throw InputError("node " + std::to_string(j) +
                       " has no zero level; the model is structurally infeasible");
    }
  }

  for (int i = 0; i < m; ++i) {
    const bool forced = fixed_open;
    lay.y.push_back(model.add_column(idx("y", {slots[i]}), forced ? 1.0 : 0.0,
                                     1.0));
  }
  const double inf = std::numeric_limits<double>::infinity();
  lay.alpha.resize(n);
  lay.beta.resize(n);
  for (int j = 0; j < n; ++j) {
    for (size_t k = 0; k < lay.demand_levels[j].size(); ++k) {
      const CurvePoint& p = lay.demand_levels[j][k];
      const double c = objective == Objective::kThroughput
                           ? 0.0
                           : demand_share(objective, lay.demand_volume[j], p);
      lay.alpha[j].push_back(
          model.add_column(idx("alpha", {j, static_cast<int>(k)}), 0.0, 1.0, c));
    }
    for (size_t k = 0; k < lay.supply_levels[j].size(); ++k) {
      const CurvePoint& p = lay.supply_levels[j][k];
      const double c = objective == Objective::kThroughput
                           ? 0.0
                           : supply_share(objective, lay.supply_volume[j], p);
      lay.beta[j].push_back(
          model.add_column(idx("beta", {j, static_cast<int>(k)}), 0.0, 1.0, c));
    }
  }
  lay.z_demand.assign(m, std::vector<std::vector<int>>(n));
  lay.z_supply.assign(m, std::vector<std::vector<int>>(n));
  std::vector<std::vector<int>> node_slots(n);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      lay.z_demand[i][j].assign(lay.demand_levels[j].size(), -1);
      lay.z_supply[i][j].assign(lay.supply_levels[j].size(), -1);
      if (instance.distance(slots[i], j) > instance.radius) continue;
      node_slots[j].push_back(i);
      for (size_t k = 0; k < lay.demand_levels[j].size(); ++k) {
        const double c =
            objective == Objective::kThroughput
                ? demand_share(objective, lay.demand_volume[j], lay.demand_levels[j][k])
                : 0.0;
        lay.z_demand[i][j][k] = model.add_column(
            idx("zd", {slots[i], j, static_cast<int>(k)}), 0.0, inf, c);
      }
      for (size_t k = 0; k < lay.supply_levels[j].size(); ++k) {
        lay.z_supply[i][j][k] = model.add_column(
            idx("zs", {slots[i], j, static_cast<int>(k)}), 0.0, inf);
      }
    }
  }

  if (objective != Objective::kProfit) {
    const int row = model.add_row(ConstraintTag::kBudgetBalance,
                                  RowSense::kGreaterEqual, 0.0, "wbb");
    for (int j = 0; j < n; ++j) {
      for (size_t k = 0; k < lay.demand_levels[j].size(); ++k) {
        model.add_term(row, lay.alpha[j][k],
                       demand_share(Objective::kProfit, lay.demand_volume[j],
                                    lay.demand_levels[j][k]));
      }
      for (size_t k = 0; k < lay.supply_levels[j].size(); ++k) {
        model.add_term(row, lay.beta[j][k],
                       supply_share(Objective::kProfit, lay.supply_volume[j],
                                    lay.supply_levels[j][k]));
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    int row = model.add_row(ConstraintTag::kSinglePrice, RowSense::kEqual, 1.0,
                            idx("price", {j}));
    for (int c : lay.alpha[j]) model.add_term(row, c, 1.0);
    row = model.add_row(ConstraintTag::kSinglePrice, RowSense::kEqual, 1.0,
                        idx("wage", {j}));
    for (int c : lay.beta[j]) model.add_term(row, c, 1.0);
  }
  for (int j = 0; j < n; ++j) {
    const bool reachable = !node_slots[j].empty();
    for (int side = 0; side < 2; ++side) {
      const auto& cols = side == 0 ? lay.alpha[j] : lay.beta[j];
      const auto& z = side == 0 ? lay.z_demand : lay.z_supply;
      for (size_t k = 0; k < cols.size(); ++k) {
        if (k == 0 && !reachable) continue;
        const int row = model.add_row(
            ConstraintTag::kSingleRoute, RowSense::kEqual, 0.0,
            idx(side == 0 ? "route_d" : "route_s", {j, static_cast<int>(k)}));
        for (int i : node_slots[j]) model.add_term(row, z[i][j][k], 1.0);
        model.add_term(row, cols[k], -1.0);
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      if (lay.z_demand[i][j][0] < 0) continue;
      for (int side = 0; side < 2; ++side) {
        const auto& z = side == 0 ? lay.z_demand[i][j] : lay.z_supply[i][j];
        const int row = model.add_row(
            ConstraintTag::kOpen, RowSense::kLessEqual, 0.0,
            idx(side == 0 ? "open_d" : "open_s", {slots[i], j}));
        for (size_t k = 1; k < z.size(); ++k) model.add_term(row, z[k], 1.0);
        model.add_term(row, lay.y[i], -1.0);
      }
    }
  }
  for (int i = 0; i < m; ++i) {
    const int bal = model.add_row(ConstraintTag::kFlowBalance, RowSense::kEqual,
                                  0.0, idx("balance", {slots[i]}));
    const int low = model.add_row(ConstraintTag::kFlowLower,
                                  RowSense::kGreaterEqual, 0.0,
                                  idx("lower", {slots[i]}));
    for (int j = 0; j < n; ++j) {
      if (lay.z_demand[i][j][0] < 0) continue;
      for (size_t k = 1; k < lay.demand_levels[j].size(); ++k) {
        const double f = lay.demand_volume[j] * lay.demand_levels[j][k].level;
        model.add_term(bal, lay.z_demand[i][j][k], f);
        model.add_term(low, lay.z_demand[i][j][k], f);
      }
      for (size_t k = 1; k < lay.supply_levels[j].size(); ++k) {
        const double f = lay.supply_volume[j] * lay.supply_levels[j][k].level;
        model.add_term(bal, lay.z_supply[i][j][k], -f);
      }
    }
    model.add_term(low, lay.y[i], -instance.flow_lower_bound);
  }

  if (strong != nullptr) {
    const int theta = guess_size(strong->epsilon);
    std::vector<bool> in_guess(m, false);
    for (NodeId g : strong->guessed) {
      auto it = std::find(slots.begin(), slots.end(), g);
      in_guess[it - slots.begin()] = true;
    }
    auto add_share = [&](int row, int i, double scale) {
      for (int j = 0; j < n; ++j) {
        if (lay.z_demand[i][j][0] < 0) continue;
        for (size_t k = 1; k < lay.demand_levels[j].size(); ++k) {
          model.add_term(row, lay.z_demand[i][j][k],
                         scale * demand_share(objective, lay.demand_volume[j],
                                              lay.demand_levels[j][k]));
        }
        for (size_t k = 1; k < lay.supply_levels[j].size(); ++k) {
          model.add_term(row, lay.z_supply[i][j][k],
                         scale * supply_share(objective, lay.supply_volume[j],
                                              lay.supply_levels[j][k]));
        }
      }
    };
    for (int i = 0; i < m; ++i) {
      if (in_guess[i]) {
        const int row = model.add_row(ConstraintTag::kForceOpen, RowSense::kEqual,
                                      1.0, idx("force", {slots[i]}));
        model.add_term(row, lay.y[i], 1.0);
      } else {
        const int row = model.add_row(ConstraintTag::kSurplusCap,
                                      RowSense::kLessEqual, 0.0,
                                      idx("cap", {slots[i]}));
        add_share(row, i, 1.0);
        model.add_term(row, lay.y[i], -strong->threshold);
      }
    }
    const int top = model.add_row(
        ConstraintTag::kTopSurplus, RowSense::kGreaterEqual,
        strong->threshold * theta * (1.0 - strong->epsilon), "top");
    for (int i = 0; i < m; ++i) {
      if (in_guess[i]) add_share(top, i, 1.0);
    }
  }
  return model;
}

}  // namespace

LPModel build_base_lp(const Instance& instance, Objective objective) {
  return build(instance, objective, instance.candidates, false, nullptr);
}

LPModel build_strengthened_lp(const Instance& instance, Objective objective,
                              const std::vector<NodeId>& guessed,
                              double threshold, double epsilon) {
  guess_size(epsilon);
  std::vector<NodeId> sorted = guessed;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InputError("guessed facility set has duplicates");
  }
  for (NodeId g : sorted) {
    if (!instance.is_candidate(g)) {
      throw InputError("guessed facility " + std::to_string(g) +
                       " is not a facility candidate");
    }
  }
  if (!(threshold >= 0) || !std::isfinite(threshold)) {
    throw InputError("surplus threshold must be finite and nonnegative");
  }
  Strengthening strong{sorted, threshold, epsilon};
  return build(instance, objective, instance.candidates, false, &strong);
}

LPModel build_fixed_facilities_lp(const Instance& instance, Objective objective,
                                  const std::vector<NodeId>& open) {
  std::vector<NodeId> sorted = open;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  // Closed candidates are omitted: with y pinned to 0 their routing is zero.
  return build(instance, objective, sorted, true, nullptr);
}

}  // namespace tsfl
