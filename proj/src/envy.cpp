#include "tsfl/envy.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tsfl/detail/rounding_phases.hpp"
#include "tsfl/errors.hpp"
#include "tsfl/fractional.hpp"
#include "tsfl/structure.hpp"

namespace tsfl {

double EnvyInstance::demand_participation(NodeId j, int k, int t) const {
  const double p = prices[t];
  if (p >= base.p_max) return 0.0;
  return nodes[j].subtypes[k].demand.levels_at_price(p).second;
}

double EnvyInstance::supply_participation(NodeId j, int k, int t) const {
  const double w = wages[t];
  if (w <= 0.0) return 0.0;
  return nodes[j].subtypes[k].supply.levels_at_price(w).second;
}

void EnvyInstance::validate() const {
  validate_metric(base);
  const int n = size();
  if (static_cast<int>(nodes.size()) != n) {
    throw InputError("envy block must list sub-types for every node");
  }
  if (prices.empty() || wages.empty()) throw InputError("price and wage grids must be nonempty");
  for (size_t t = 1; t < prices.size(); ++t) {
    if (!(prices[t] > prices[t - 1])) throw InputError("prices must be strictly ascending");
  }
  for (size_t t = 1; t < wages.size(); ++t) {
    if (!(wages[t] > wages[t - 1])) throw InputError("wages must be strictly ascending");
  }
  if (prices.front() < 0 || prices.back() != base.p_max) {
    throw InputError("price grid must lie in [0, p_max] and contain p_max");
  }
  if (wages.front() != 0.0) throw InputError("wage grid must contain 0");
  for (int j = 0; j < n; ++j) {
    const EnvyNode& node = nodes[j];
    const std::string where = "node " + std::to_string(j) + ": ";
    const int m = static_cast<int>(node.subtypes.size());
    if (m == 0) throw InputError(where + "needs at least one sub-type");
    for (const Subtype& s : node.subtypes) {
      if (!(s.weight > 0) || !std::isfinite(s.weight)) {
        throw InputError(where + "sub-type weights must be positive");
      }
      try {
        s.demand.validate();
        s.supply.validate();
      } catch (const InputError& e) {
        throw InputError(where + e.what());
      }
    }
    std::vector<int> indegree(m, 0);
    std::vector<std::vector<int>> out(m);
    for (auto [a, b] : node.edges) {
      if (a < 0 || a >= m || b < 0 || b >= m || a == b) {
        throw InputError(where + "envy edge (" + std::to_string(a) + "," +
                         std::to_string(b) + ") is invalid");
      }
      out[a].push_back(b);
      ++indegree[b];
    }
    std::vector<int> ready;
    for (int k = 0; k < m; ++k) {
      if (indegree[k] == 0) ready.push_back(k);
    }
    int seen = 0;
    while (!ready.empty()) {
      const int k = ready.back();
      ready.pop_back();
      ++seen;
      for (int b : out[k]) {
        if (--indegree[b] == 0) ready.push_back(b);
      }
    }
    if (seen != m) throw InputError(where + "envy graph has a cycle");
  }
}

namespace {

constexpr double kNoise = 1e-12;

double clean(double v) { return std::abs(v) < kNoise ? 0.0 : std::max(v, 0.0); }

void resize_facility(const EnvyInstance& inst, EnvyFacility& f) {
  const int n = inst.size();
  f.demand_route.assign(n, 0.0);
  f.supply_route.assign(n, 0.0);
  f.demand_lottery.resize(n);
  f.supply_lottery.resize(n);
  for (int j = 0; j < n; ++j) {
    const int m = static_cast<int>(inst.nodes[j].subtypes.size());
    f.demand_lottery[j].assign(m, std::vector<double>(inst.prices.size(), 0.0));
    f.supply_lottery[j].assign(m, std::vector<double>(inst.wages.size(), 0.0));
  }
}

void scale(EnvyFacility& f, double factor) {
  f.y = factor == 0.0 ? 0.0 : f.y * factor;
  for (double& v : f.demand_route) v *= factor;
  for (double& v : f.supply_route) v *= factor;
  for (auto& node : f.demand_lottery) {
    for (auto& sub : node) {
      for (double& v : sub) v *= factor;
    }
  }
  for (auto& node : f.supply_lottery) {
    for (auto& sub : node) {
      for (double& v : sub) v *= factor;
    }
  }
}

void add_into(EnvyFacility& to, const EnvyFacility& from) {
  to.y += from.y;
  for (size_t j = 0; j < to.demand_route.size(); ++j) {
    to.demand_route[j] += from.demand_route[j];
    to.supply_route[j] += from.supply_route[j];
    for (size_t k = 0; k < to.demand_lottery[j].size(); ++k) {
      for (size_t t = 0; t < to.demand_lottery[j][k].size(); ++t) {
        to.demand_lottery[j][k][t] += from.demand_lottery[j][k][t];
      }
      for (size_t t = 0; t < to.supply_lottery[j][k].size(); ++t) {
        to.supply_lottery[j][k][t] += from.supply_lottery[j][k][t];
      }
    }
  }
}

bool routes_anything(const EnvyFacility& f) {
  for (size_t j = 0; j < f.demand_route.size(); ++j) {
    if (f.demand_route[j] > 0 || f.supply_route[j] > 0) return true;
  }
  return false;
}

bool partial(const EnvyFacility& f) { return f.y > 0.0 && f.y < 1.0 - kOpenTol; }

bool compliant(const EnvySolution& s, const EnvyFacility& f) {
  if (!partial(f)) return true;
  for (size_t j = 0; j < f.demand_route.size(); ++j) {
    if (f.demand_route[j] > 0 && s.demand_utilization[j] >= 1.0 - kFullUtilizationTol) {
      return true;
    }
    if (f.supply_route[j] > 0 && s.supply_utilization[j] >= 1.0 - kFullUtilizationTol) {
      return true;
    }
  }
  return false;
}

class EnvyAdapter {
 public:
  EnvyAdapter(const EnvyInstance& inst, EnvySolution& sol) : inst_(inst), sol_(sol) {
    refresh_envy(inst_, sol_);
  }
  int num_slots() const { return static_cast<int>(sol_.facilities.size()); }
  int num_nodes() const { return inst_.size(); }
  double y(int i) const { return sol_.facilities[i].y; }
  NodeId location(int i) const { return sol_.facilities[i].location; }
  double demand_mass(int i, int j) const { return sol_.facilities[i].demand_route[j]; }
  double supply_mass(int i, int j) const { return sol_.facilities[i].supply_route[j]; }
  bool demand_full(int j) const {
    return sol_.demand_utilization[j] >= 1.0 - kFullUtilizationTol;
  }
  bool supply_full(int j) const {
    return sol_.supply_utilization[j] >= 1.0 - kFullUtilizationTol;
  }
  int add_slot(NodeId location) {
    EnvyFacility f;
    f.location = location;
    resize_facility(inst_, f);
    sol_.facilities.push_back(std::move(f));
    return num_slots() - 1;
  }
  void close(int i) { scale(sol_.facilities[i], 0.0); }
  void move(int src, int dst) {
    add_into(sol_.facilities[dst], sol_.facilities[src]);
    scale(sol_.facilities[src], 0.0);
  }

 private:
  const EnvyInstance& inst_;
  EnvySolution& sol_;
};

}  // namespace

void refresh_envy(const EnvyInstance& inst, EnvySolution& sol) {
  const int n = inst.size();
  sol.demand_utilization.assign(n, 0.0);
  sol.supply_utilization.assign(n, 0.0);
  sol.profit = 0.0;
  for (EnvyFacility& f : sol.facilities) {
    f.profit = f.demand_flow = f.supply_flow = f.weighted_flow = 0.0;
    for (int j = 0; j < n; ++j) {
      sol.demand_utilization[j] += f.demand_route[j];
      sol.supply_utilization[j] += f.supply_route[j];
      const auto& subs = inst.nodes[j].subtypes;
      for (size_t k = 0; k < subs.size(); ++k) {
        const double d = subs[k].demand.volume();
        const double s = subs[k].supply.volume();
        for (size_t t = 0; t < inst.prices.size(); ++t) {
          const double z = f.demand_lottery[j][k][t];
          if (z == 0.0) continue;
          const double flow = d * inst.demand_participation(j, static_cast<int>(k),
                                                            static_cast<int>(t)) * z;
          f.demand_flow += flow;
          f.weighted_flow += subs[k].weight * flow;
          f.profit += inst.prices[t] * flow;
        }
        for (size_t t = 0; t < inst.wages.size(); ++t) {
          const double z = f.supply_lottery[j][k][t];
          if (z == 0.0) continue;
          const double flow = s * inst.supply_participation(j, static_cast<int>(k),
                                                            static_cast<int>(t)) * z;
          f.supply_flow += flow;
          f.weighted_flow += subs[k].weight * flow;
          f.profit -= inst.wages[t] * flow;
        }
      }
    }
    sol.profit += f.profit;
  }
}

EnvyModel build_envy_lp(const EnvyInstance& inst) {
  EnvyModel em;
  LPModel& model = em.model;
  model.objective = Objective::kProfit;
  EnvyLayout& lay = em.layout;
  const int n = inst.size();
  const std::vector<NodeId>& slots = inst.base.candidates;
  const int ms = static_cast<int>(slots.size());
  const int np = static_cast<int>(inst.prices.size());
  const int nw = static_cast<int>(inst.wages.size());
  const double inf = std::numeric_limits<double>::infinity();
  lay.slot_location = slots;
  lay.xd.assign(ms, std::vector<int>(n, -1));
  lay.xs.assign(ms, std::vector<int>(n, -1));
  lay.zd.resize(ms);
  lay.zs.resize(ms);
  auto name = [](const char* base, std::initializer_list<int> ids) {
    std::string s = std::string(base) + "[";
    bool first = true;
    for (int v : ids) {
      s += (first ? "" : ",") + std::to_string(v);
      first = false;
    }
    return s + "]";
  };
  for (int i = 0; i < ms; ++i) {
    lay.y.push_back(model.add_column(name("y", {slots[i]}), 0.0, 1.0));
  }
  for (int i = 0; i < ms; ++i) {
    lay.zd[i].resize(n);
    lay.zs[i].resize(n);
    for (int j = 0; j < n; ++j) {
      if (inst.base.distance(slots[i], j) > inst.base.radius) continue;
      lay.xd[i][j] = model.add_column(name("xd", {slots[i], j}), 0.0, 1.0);
      lay.xs[i][j] = model.add_column(name("xs", {slots[i], j}), 0.0, 1.0);
      const auto& subs = inst.nodes[j].subtypes;
      lay.zd[i][j].resize(subs.size());
      lay.zs[i][j].resize(subs.size());
      for (int k = 0; k < static_cast<int>(subs.size()); ++k) {
        for (int t = 0; t < np; ++t) {
          const double flow = subs[k].demand.volume() * inst.demand_participation(j, k, t);
          lay.zd[i][j][k].push_back(model.add_column(
              name("zd", {slots[i], j, k, t}), 0.0, inf, inst.prices[t] * flow));
        }
        for (int t = 0; t < nw; ++t) {
          const double flow = subs[k].supply.volume() * inst.supply_participation(j, k, t);
          lay.zs[i][j][k].push_back(model.add_column(
              name("zs", {slots[i], j, k, t}), 0.0, inf, -inst.wages[t] * flow));
        }
      }
    }
  }
  for (int j = 0; j < n; ++j) {
    const int rd = model.add_row(ConstraintTag::kEnvyRouting, RowSense::kLessEqual, 1.0,
                                 name("route_d", {j}));
    const int rs = model.add_row(ConstraintTag::kEnvyRouting, RowSense::kLessEqual, 1.0,
                                 name("route_s", {j}));
    for (int i = 0; i < ms; ++i) {
      if (lay.xd[i][j] < 0) continue;
      model.add_term(rd, lay.xd[i][j], 1.0);
      model.add_term(rs, lay.xs[i][j], 1.0);
    }
  }
  for (int i = 0; i < ms; ++i) {
    for (int j = 0; j < n; ++j) {
      if (lay.xd[i][j] < 0) continue;
      const EnvyNode& node = inst.nodes[j];
      for (int k = 0; k < static_cast<int>(node.subtypes.size()); ++k) {
        int row = model.add_row(ConstraintTag::kEnvyLottery, RowSense::kEqual, 0.0,
                                name("lot_d", {slots[i], j, k}));
        for (int c : lay.zd[i][j][k]) model.add_term(row, c, 1.0);
        model.add_term(row, lay.xd[i][j], -1.0);
        row = model.add_row(ConstraintTag::kEnvyLottery, RowSense::kEqual, 0.0,
                            name("lot_s", {slots[i], j, k}));
        for (int c : lay.zs[i][j][k]) model.add_term(row, c, 1.0);
        model.add_term(row, lay.xs[i][j], -1.0);
      }
      int row = model.add_row(ConstraintTag::kOpen, RowSense::kLessEqual, 0.0,
                              name("open_d", {slots[i], j}));
      model.add_term(row, lay.xd[i][j], 1.0);
      model.add_term(row, lay.y[i], -1.0);
      row = model.add_row(ConstraintTag::kOpen, RowSense::kLessEqual, 0.0,
                          name("open_s", {slots[i], j}));
      model.add_term(row, lay.xs[i][j], 1.0);
      model.add_term(row, lay.y[i], -1.0);
      for (auto [a, b] : node.edges) {
        // Buyer of sub-type a is quoted stochastically higher prices than b.
        for (int t = 0; t + 1 < np; ++t) {
          const int r = model.add_row(ConstraintTag::kEnvyLadder, RowSense::kLessEqual,
                                      0.0, name("ladder_d", {slots[i], j, a, b, t}));
          for (int u = 0; u <= t; ++u) {
            model.add_term(r, lay.zd[i][j][a][u], 1.0);
            model.add_term(r, lay.zd[i][j][b][u], -1.0);
          }
        }
        for (int t = 0; t + 1 < nw; ++t) {
          const int r = model.add_row(ConstraintTag::kEnvyLadder,
                                      RowSense::kGreaterEqual, 0.0,
                                      name("ladder_s", {slots[i], j, a, b, t}));
          for (int u = 0; u <= t; ++u) {
            model.add_term(r, lay.zs[i][j][a][u], 1.0);
            model.add_term(r, lay.zs[i][j][b][u], -1.0);
          }
        }
      }
    }
  }
  for (int i = 0; i < ms; ++i) {
    const int bal = model.add_row(ConstraintTag::kFlowBalance, RowSense::kEqual, 0.0,
                                  name("balance", {slots[i]}));
    const int low = model.add_row(ConstraintTag::kEnvyWeightedLower,
                                  RowSense::kGreaterEqual, 0.0, name("lower", {slots[i]}));
    for (int j = 0; j < n; ++j) {
      if (lay.xd[i][j] < 0) continue;
      const auto& subs = inst.nodes[j].subtypes;
      for (int k = 0; k < static_cast<int>(subs.size()); ++k) {
        for (int t = 0; t < np; ++t) {
          const double f = subs[k].demand.volume() * inst.demand_participation(j, k, t);
          model.add_term(bal, lay.zd[i][j][k][t], f);
          model.add_term(low, lay.zd[i][j][k][t], subs[k].weight * f);
        }
        for (int t = 0; t < nw; ++t) {
          const double f = subs[k].supply.volume() * inst.supply_participation(j, k, t);
          model.add_term(bal, lay.zs[i][j][k][t], -f);
          model.add_term(low, lay.zs[i][j][k][t], subs[k].weight * f);
        }
      }
    }
    model.add_term(low, lay.y[i], -inst.base.flow_lower_bound);
  }
  return em;
}

EnvyLpResult solve_envy_lp(const EnvyInstance& inst, double tolerance,
                           LpSolver* solver) {
  EnvyModel em = build_envy_lp(inst);
  std::unique_ptr<LpSolver> local;
  if (solver == nullptr) {
    local = make_default_solver();
    solver = local.get();
  }
  const LpResult raw = solver->solve(em.model.program());
  if (raw.status == LpStatus::kError) {
    throw SolverError("LP backend failed: " + raw.message);
  }
  EnvyLpResult out;
  out.status = raw.status;
  if (raw.status != LpStatus::kOptimal) return out;
  out.objective = raw.objective;
  const double residual = max_row_residual(em.model.program(), raw.x);
  if (residual > tolerance) {
    throw SolverError("envy LP solution violates a row by " + std::to_string(residual));
  }
  const EnvyLayout& lay = em.layout;
  const int n = inst.size();
  for (size_t i = 0; i < lay.slot_location.size(); ++i) {
    EnvyFacility f;
    f.location = lay.slot_location[i];
    resize_facility(inst, f);
    f.y = std::min(1.0, clean(raw.x[lay.y[i]]));
    for (int j = 0; j < n; ++j) {
      if (lay.xd[i][j] < 0) continue;
      f.demand_route[j] = clean(raw.x[lay.xd[i][j]]);
      f.supply_route[j] = clean(raw.x[lay.xs[i][j]]);
      for (size_t k = 0; k < lay.zd[i][j].size(); ++k) {
        for (size_t t = 0; t < lay.zd[i][j][k].size(); ++t) {
          f.demand_lottery[j][k][t] = clean(raw.x[lay.zd[i][j][k][t]]);
        }
        for (size_t t = 0; t < lay.zs[i][j][k].size(); ++t) {
          f.supply_lottery[j][k][t] = clean(raw.x[lay.zs[i][j][k][t]]);
        }
      }
    }
    out.solution.facilities.push_back(std::move(f));
  }
  refresh_envy(inst, out.solution);
  return out;
}

EnvySolution rescale_envy(const EnvyInstance& inst, const EnvySolution& sol) {
  EnvySolution s = sol;
  refresh_envy(inst, s);
  for (EnvyFacility& f : s.facilities) {
    if (f.y > 0.0 && (f.profit < 0.0 || !routes_anything(f))) scale(f, 0.0);
  }
  refresh_envy(inst, s);
  const int m = static_cast<int>(s.facilities.size());
  for (int iter = 0;; ++iter) {
    if (iter > 4 * m + 16) throw InvariantError("envy rescaling did not converge");
    int pick = -1;
    for (int i = 0; i < m && pick < 0; ++i) {
      if (!compliant(s, s.facilities[i])) pick = i;
    }
    if (pick < 0) break;
    EnvyFacility& f = s.facilities[pick];
    double theta = 1.0 / f.y;
    for (int j = 0; j < inst.size(); ++j) {
      if (f.demand_route[j] > 0) {
        theta = std::min(theta, (1.0 - (s.demand_utilization[j] - f.demand_route[j])) /
                                    f.demand_route[j]);
      }
      if (f.supply_route[j] > 0) {
        theta = std::min(theta, (1.0 - (s.supply_utilization[j] - f.supply_route[j])) /
                                    f.supply_route[j]);
      }
    }
    scale(f, std::max(theta, 1.0));
    f.y = std::min(f.y, 1.0);
    refresh_envy(inst, s);
  }
  return s;
}

EnvyRounding round_envy(const EnvyInstance& inst, const EnvySolution& rescaled) {
  EnvyRounding out;
  out.solution = rescaled;
  EnvyAdapter adapter(inst, out.solution);
  detail::run_rounding(adapter, inst.base, out.trace);
  refresh_envy(inst, out.solution);
  return out;
}

LotteryPolicy to_policy(const EnvyInstance& inst, const EnvySolution& rounded) {
  LotteryPolicy policy;
  std::map<NodeId, int> by_location;
  std::vector<EnvyFacility> merged;
  for (const EnvyFacility& f : rounded.facilities) {
    if (f.y <= 0.0) {
      if (routes_anything(f)) throw InvariantError("closed facility carries routing");
      continue;
    }
    if (f.y < 1.0 - kOpenTol) {
      throw InvariantError("facility at node " + std::to_string(f.location) +
                           " is only partially open");
    }
    if (!routes_anything(f)) continue;
    auto [it, fresh] = by_location.try_emplace(f.location, static_cast<int>(merged.size()));
    if (fresh) {
      merged.push_back(f);
    } else {
      add_into(merged[it->second], f);
    }
  }
  for (const EnvyFacility& f : merged) {
    policy.facilities.push_back(f.location);
    policy.demand_route.push_back(f.demand_route);
    policy.supply_route.push_back(f.supply_route);
    policy.demand_lottery.push_back(f.demand_lottery);
    policy.supply_lottery.push_back(f.supply_lottery);
  }
  policy.profit = policy_profit(inst, policy);
  return policy;
}

double policy_profit(const EnvyInstance& inst, const LotteryPolicy& policy) {
  double profit = 0.0;
  for (size_t f = 0; f < policy.facilities.size(); ++f) {
    for (int j = 0; j < inst.size(); ++j) {
      const auto& subs = inst.nodes[j].subtypes;
      for (int k = 0; k < static_cast<int>(subs.size()); ++k) {
        for (int t = 0; t < static_cast<int>(inst.prices.size()); ++t) {
          profit += inst.prices[t] * subs[k].demand.volume() *
                    inst.demand_participation(j, k, t) *
                    policy.demand_lottery[f][j][k][t];
        }
        for (int t = 0; t < static_cast<int>(inst.wages.size()); ++t) {
          profit -= inst.wages[t] * subs[k].supply.volume() *
                    inst.supply_participation(j, k, t) *
                    policy.supply_lottery[f][j][k][t];
        }
      }
    }
  }
  return profit;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

}  // namespace

LadderDraw sample_ladder(const EnvyInstance& inst, const LotteryPolicy& policy,
                         NodeId node, Side side, std::uint64_t seed,
                         std::uint64_t draw) {
  if (node < 0 || node >= inst.size()) {
    throw InputError("unknown node id " + std::to_string(node));
  }
  std::uint64_t h = splitmix(seed);
  h = splitmix(h ^ static_cast<std::uint64_t>(node));
  h = splitmix(h ^ (side == Side::kDemand ? 0x5eedULL : 0xca11ULL));
  h = splitmix(h ^ draw);
  const double pick = unit(splitmix(h));
  const double alpha = unit(splitmix(h + 1));

  const bool demand = side == Side::kDemand;
  const int m = static_cast<int>(inst.nodes[node].subtypes.size());
  const int grid = static_cast<int>(demand ? inst.prices.size() : inst.wages.size());
  LadderDraw out;
  double acc = 0.0;
  for (size_t f = 0; f < policy.facilities.size(); ++f) {
    const double x = demand ? policy.demand_route[f][node] : policy.supply_route[f][node];
    if (x <= 0.0) continue;
    if (pick < acc + x) {
      out.facility = static_cast<int>(f);
      break;
    }
    acc += x;
  }
  out.grid_index.assign(m, demand ? grid - 1 : 0);
  if (out.facility < 0) return out;
  const int f = out.facility;
  const double x = demand ? policy.demand_route[f][node] : policy.supply_route[f][node];
  for (int k = 0; k < m; ++k) {
    const auto& lottery = demand ? policy.demand_lottery[f][node][k]
                                 : policy.supply_lottery[f][node][k];
    double cum = 0.0;
    int chosen = -1;
    int last_positive = -1;
    for (int t = 0; t < grid; ++t) {
      if (lottery[t] <= 0.0) continue;
      last_positive = t;
      cum += lottery[t] / x;
      if (alpha < cum) {
        chosen = t;
        break;
      }
    }
    out.grid_index[k] = chosen >= 0 ? chosen : last_positive;
  }
  return out;
}

}  // namespace tsfl
