#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "tsfl/driver.hpp"
#include "tsfl/envy.hpp"
#include "tsfl/generators.hpp"
#include "tsfl/model.hpp"
#include "tsfl/oracle.hpp"
#include "tsfl/queueing.hpp"
#include "tsfl/structure.hpp"

using namespace tsfl;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Tally {
  int checked = 0;
  int failed = 0;
  std::string first;
  void expect(bool ok, const std::string& what) {
    ++checked;
    if (ok) return;
    if (failed++ == 0) first = what;
  }
  Outcome outcome(const std::string& summary) const {
    std::string d = summary + "; " + std::to_string(checked) + " checks";
    if (failed > 0) d += ", " + std::to_string(failed) + " failed, first: " + first;
    return {failed == 0, d};
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
}

// Abandonment fraction of the two-sided birth-death chain as a product series:
// n sellers waiting has weight prod_{m<=n} mu / (lambda + m gamma), and
// symmetrically for buyers.
double series_abandonment(double lambda, double mu, double gamma, double kappa) {
  double z = 1.0, lost = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double in = side == 0 ? mu : lambda;
    const double out = side == 0 ? lambda : mu;
    const double rate = side == 0 ? gamma : kappa;
    double term = 1.0;
    for (long long n = 1; n < 100'000'000; ++n) {
      term *= in / (out + n * rate);
      z += term;
      lost += n * rate * term;
      if (term < 1e-18 * z && in < out + n * rate) break;
    }
  }
  return lost / z / (lambda + mu);
}

Outcome gap_reproduction() {
  Tally t;
  const double L = 10.0, eps = 0.01;
  const Instance gap = gen_integrality_gap(L, 0.5, eps);
  const double ip = exact_oracle(gap).value;
  const double lp = solve_lp(build_base_lp(gap, Objective::kSurplus)).objective;
  t.expect(rel_close(ip, 20.0, 1e-6), fmt("oracle %.9g vs 20", ip));
  t.expect(rel_close(lp, (2.0 / 1.01 + 2.0) * 10.0, 1e-6), fmt("LP %.9g vs 39.80198", lp));
  double last = 0.0;
  std::string ratios;
  for (double c : {0.5, 0.8, 0.9}) {
    const double cp = 2.0 * c / (1.0 - c);
    const Instance inst = gen_integrality_gap(L, c, eps);
    const double v_ip = exact_oracle(inst).value;
    const double v_lp = solve_lp(build_base_lp(inst, Objective::kSurplus)).objective;
    const double ratio = v_lp / v_ip;
    const double expected = (2.0 + cp / (1.0 + eps)) / 2.0;
    t.expect(rel_close(ratio, expected, 1e-6),
             fmt("c=%.2f ratio %.9g vs %.9g", c, ratio, expected));
    t.expect(ratio > last, fmt("ratio not increasing at c=%.2f", c));
    last = ratio;
    ratios += fmt(" %.4f", ratio);
  }
  return t.outcome(fmt("oracle %.6f, LP %.6f, ratios", ip, lp) + ratios);
}

RandomParams criterion_two_params(std::uint64_t seed) {
  RandomParams p;
  p.seed = seed;
  p.n = 3 + static_cast<int>(seed % 4);
  p.grid_size = 3 + static_cast<int>((seed / 4) % 3);
  p.family = CurveFamily::kMixed;
  p.L = 0.4 + 0.2 * static_cast<double>(seed % 5);
  p.R = 0.35;
  return p;
}

Outcome bicriteria() {
  Tally t;
  int nonempty = 0;
  double worst_ratio = 1e300;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = gen_random(criterion_two_params(seed));
    SolverConfig cfg;
    cfg.epsilon = 0.34;
    cfg.delta = 1e-4 * inst.max_surplus();
    const SolveOutcome out = solve(inst, cfg);
    const FeasibilityReport rep = verify_feasibility(inst, out.solution, 4.0, 1e-6);
    const std::string tag = "seed " + std::to_string(seed);
    t.expect(rep.feasible, tag + " infeasible at factor 4");
    const double best = exact_oracle(inst).value;
    t.expect(rep.surplus >= (1.0 - cfg.epsilon) * best - cfg.delta,
             tag + fmt(" surplus %.9g below (1-eps) * %.9g", rep.surplus, best));
    if (best > 0) {
      ++nonempty;
      worst_ratio = std::min(worst_ratio, rep.surplus / best);
    }
  }
  return t.outcome(std::to_string(nonempty) + " instances with positive optimum, worst ratio " +
                   fmt("%.4f", nonempty ? worst_ratio : 1.0));
}

Outcome consolidation_properties() {
  Tally t;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int made = 0;
  double gained = 0.0;
  for (std::uint64_t seed = 1; made < 200; ++seed) {
    RandomParams p;
    p.seed = 1000 + seed;
    p.n = 2 + static_cast<int>(seed % 4);
    p.grid_size = 3 + static_cast<int>(seed % 4);
    p.family = CurveFamily::kMixed;
    p.L = 0.3 * static_cast<double>(seed % 4);
    p.R = 0.5;
    const Instance inst = gen_random(p);
    std::vector<FractionalSolution> pool;
    for (Objective obj : {Objective::kSurplus, Objective::kThroughput, Objective::kProfit}) {
      const LpSolveResult r = solve_lp(build_base_lp(inst, obj));
      if (r.status == LpStatus::kOptimal) pool.push_back(r.solution);
    }
    if (pool.size() < 2) continue;
    for (int rep = 0; rep < 2 && made < 200; ++rep, ++made) {
      const FractionalSolution ab = oracle::mix(pool[0], pool[1], u(rng));
      const FractionalSolution sol = oracle::mix(ab, pool.back(), 0.5 * u(rng));
      const FractionalSolution c = consolidate_prices(inst, sol);
      const std::string tag = "solution " + std::to_string(made);
      for (size_t i = 0; i < sol.facilities.size(); ++i) {
        t.expect(std::abs(c.facilities[i].demand_flow - sol.facilities[i].demand_flow) <= 1e-12,
                 tag + " demand flow moved");
        t.expect(std::abs(c.facilities[i].supply_flow - sol.facilities[i].supply_flow) <= 1e-12,
                 tag + " supply flow moved");
      }
      t.expect(c.surplus >= sol.surplus - 1e-9,
               tag + fmt(" surplus %.12g -> %.12g", sol.surplus, c.surplus));
      t.expect(c.profit >= sol.profit - 1e-9,
               tag + fmt(" profit %.12g -> %.12g", sol.profit, c.profit));
      gained += c.surplus - sol.surplus;
    }
  }
  return t.outcome(fmt("200 solutions, total surplus gained %.6g", gained));
}

// A partial facility complies when some node it serves is fully utilized on
// that side.
int noncompliant_partials(const FractionalSolution& sol) {
  const int n = sol.num_nodes();
  std::vector<double> eta(n, 0.0), phi(n, 0.0);
  auto total = [](const std::vector<double>& row) {
    double s = 0.0;
    for (double v : row) s += v;
    return s;
  };
  for (const FacilityBlock& f : sol.facilities) {
    for (int j = 0; j < n; ++j) {
      eta[j] += total(f.demand[j]);
      phi[j] += total(f.supply[j]);
    }
  }
  int bad = 0;
  for (const FacilityBlock& f : sol.facilities) {
    if (!(f.y > 1e-7 && f.y < 1.0 - 1e-7)) continue;
    bool ok = false;
    for (int j = 0; j < n && !ok; ++j) {
      ok = (total(f.demand[j]) > 0 && eta[j] >= 1.0 - 1e-7) ||
           (total(f.supply[j]) > 0 && phi[j] >= 1.0 - 1e-7);
    }
    bad += !ok;
  }
  return bad;
}

Outcome structural_invariant() {
  Tally t;
  long long guesses = 0;
  double worst = 1e300;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Instance inst = gen_random(criterion_two_params(seed));
    SolverConfig cfg;
    cfg.epsilon = 0.34;
    cfg.delta = 1e-4 * inst.max_surplus();
    const GuessPlan plan = enumerate_guesses(inst, cfg);
    for (long long k = 0; k < plan.count(); ++k) {
      const auto [guessed, threshold] = plan.guess(k);
      const LpSolveResult r = solve_lp(build_strengthened_lp(
          inst, Objective::kSurplus, guessed, threshold, cfg.epsilon));
      if (r.status != LpStatus::kOptimal) continue;
      ++guesses;
      const RescaleResult res = rescale_structural(r.solution, guessed, Objective::kSurplus);
      const std::string tag = "seed " + std::to_string(seed) + " guess " + std::to_string(k);
      const int bad = noncompliant_partials(res.solution);
      t.expect(bad == 0, tag + " has " + std::to_string(bad) + " non-compliant partials");
      const double pre = r.solution.surplus;
      t.expect(res.solution.surplus >= (1.0 - cfg.epsilon) * pre - 1e-9,
               tag + fmt(" retained %.9g of %.9g", res.solution.surplus, pre));
      if (pre > 1e-9) worst = std::min(worst, res.solution.surplus / pre);
    }
  }
  return t.outcome(std::to_string(guesses) + " solved guesses, worst retention " +
                   fmt("%.4f", guesses ? worst : 1.0));
}

Outcome queueing_exactness() {
  Tally t;
  const double unit = abandonment_probability({1, 1, 1, 1}).probability;
  const double closed = 1.0 / (2.0 * std::exp(1.0) - 3.0);
  t.expect(std::abs(unit - closed) <= 1e-9, fmt("unit rates %.15g vs %.15g", unit, closed));
  t.expect(std::abs(series_abandonment(1, 1, 1, 1) - closed) <= 1e-9, "series oracle disagrees");
  const double busy = abandonment_probability({150, 150, 1, 1}).probability;
  t.expect(busy <= 0.1, fmt("lambda = mu = 150 gives %.6g", busy));
  t.expect(std::abs(busy - series_abandonment(150, 150, 1, 1)) <= 1e-9, "busy market vs series");
  for (int i = 0; i < 20; ++i) {
    const double c = std::pow(10.0, -4.0 + 4.0 * (i + 1) / 20.0);
    const Sandwich s = sandwich_check(c);
    const double exact = series_abandonment(1, 1, c, c);
    t.expect(s.holds, fmt("sandwich fails at c=%.3g", c));
    t.expect(std::sqrt(c) / 7.0 <= exact && exact <= std::min(std::sqrt(1.5 * c), 1.0),
             fmt("series outside bounds at c=%.3g", c));
    t.expect(std::abs(s.exact - exact) <= 1e-9, fmt("exact vs series at c=%.3g", c));
  }
  return t.outcome(fmt("q0(1,1,1,1) = %.12f, q0(150,150,1,1) = %.6f", unit, busy));
}

Outcome simulation_concordance() {
  Tally t;
  const MarketRates balanced{150, 150, 1, 1};
  const double exact = series_abandonment(150, 150, 1, 1);
  const SimulationResult sim = simulate_fifo(balanced, 1e4, 20, 17);
  t.expect(std::abs(sim.mean - exact) <= 3.0 * sim.stderr_,
           fmt("empirical %.6g vs exact %.6g, se %.3g", sim.mean, exact, sim.stderr_));
  const MarketRates lopsided{150, 120, 1, 1};
  const SimulationResult off = simulate_fifo(lopsided, 1e4, 20, 18);
  t.expect(off.mean > 0.1, fmt("mu = 0.8 lambda abandons only %.6g", off.mean));
  return t.outcome(fmt("balanced %.6f (exact %.6f, se %.2g)", sim.mean, exact, sim.stderr_) +
                   fmt(", unbalanced %.4f", off.mean));
}

Outcome hardness_consistency() {
  Tally t;
  const double delta = 0.25;
  std::string found;
  for (const Graph& g : {cycle_graph(4), hypercube_graph(3)}) {
    const int k = g.degrees().front();
    const int alpha = oracle::mis(g.vertices, g.edges);
    const double value = exact_oracle(gen_hardness(g, 1.0, delta)).value;
    t.expect(rel_close(value, delta * k * alpha, 1e-6),
             fmt("%d vertices: oracle %.9g vs %.9g", g.vertices, value, delta * k * alpha));
    found += " " + std::to_string(g.vertices) + ":" + std::to_string(alpha);
  }
  return t.outcome("vertices:MIS" + found);
}

Outcome envy_optimality() {
  Tally t;
  const int draws = 100'000;
  long long entries = 0;
  int entry_misses = 0;
  long long ladder_violations = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomEnvyParams p;
    p.seed = seed;
    p.n = 2 + static_cast<int>(seed % 3);
    p.grid = 3 + static_cast<int>(seed % 2);
    p.max_subtypes = 3;
    const EnvyInstance inst = gen_random_envy(p);
    const std::string tag = "seed " + std::to_string(seed);
    const EnvyLpResult lp = solve_envy_lp(inst);
    t.expect(lp.status == LpStatus::kOptimal, tag + " envy LP not optimal");
    if (lp.status != LpStatus::kOptimal) continue;
    const EnvyRounding rounded = round_envy(inst, rescale_envy(inst, lp.solution));
    const LotteryPolicy policy = to_policy(inst, rounded.solution);
    t.expect(rel_close(rounded.solution.profit, lp.objective, 1e-6),
             tag + fmt(" rounded profit %.9g vs LP %.9g", rounded.solution.profit, lp.objective));
    t.expect(rel_close(policy.profit, lp.objective, 1e-6),
             tag + fmt(" policy profit %.9g vs LP %.9g", policy.profit, lp.objective));

    const double R = inst.base.radius;
    const int n = inst.size();
    for (size_t f = 0; f < policy.facilities.size(); ++f) {
      double dflow = 0.0, sflow = 0.0, weighted = 0.0;
      for (int j = 0; j < n; ++j) {
        if (policy.demand_route[f][j] > 0 || policy.supply_route[f][j] > 0) {
          t.expect(inst.base.distance(j, policy.facilities[f]) <= 4.0 * R * (1 + 1e-12),
                   tag + " route beyond 4R");
        }
        const auto& subs = inst.nodes[j].subtypes;
        for (int k = 0; k < static_cast<int>(subs.size()); ++k) {
          for (size_t q = 0; q < inst.prices.size(); ++q) {
            const double fl = subs[k].demand.volume() *
                              inst.demand_participation(j, k, static_cast<int>(q)) *
                              policy.demand_lottery[f][j][k][q];
            dflow += fl;
            weighted += subs[k].weight * fl;
          }
          for (size_t q = 0; q < inst.wages.size(); ++q) {
            const double fl = subs[k].supply.volume() *
                              inst.supply_participation(j, k, static_cast<int>(q)) *
                              policy.supply_lottery[f][j][k][q];
            sflow += fl;
            weighted += subs[k].weight * fl;
          }
        }
      }
      t.expect(std::abs(dflow - sflow) <= 1e-6, tag + fmt(" imbalance %.3g", dflow - sflow));
      t.expect(weighted >= inst.base.flow_lower_bound - 1e-6,
               tag + fmt(" weighted flow %.9g below L", weighted));
    }

    for (int j = 0; j < n; ++j) {
      const auto& node = inst.nodes[j];
      const int m = static_cast<int>(node.subtypes.size());
      for (Side side : {Side::kDemand, Side::kSupply}) {
        const bool demand = side == Side::kDemand;
        const int grid = static_cast<int>(demand ? inst.prices.size() : inst.wages.size());
        const size_t nf = policy.facilities.size();
        std::vector<long long> hits(nf * m * grid, 0);
        for (int d = 0; d < draws; ++d) {
          const LadderDraw draw = sample_ladder(inst, policy, j, side, seed, d);
          for (auto [a, b] : node.edges) {
            const bool ok = demand ? draw.grid_index[a] >= draw.grid_index[b]
                                   : draw.grid_index[a] <= draw.grid_index[b];
            ladder_violations += !ok;
          }
          if (draw.facility < 0) continue;
          for (int k = 0; k < m; ++k) {
            ++hits[(draw.facility * m + k) * grid + draw.grid_index[k]];
          }
        }
        for (size_t f = 0; f < nf; ++f) {
          for (int k = 0; k < m; ++k) {
            for (int q = 0; q < grid; ++q) {
              const double prob = demand ? policy.demand_lottery[f][j][k][q]
                                         : policy.supply_lottery[f][j][k][q];
              const double seen =
                  static_cast<double>(hits[(f * m + k) * grid + q]) / draws;
              const double se = std::sqrt(prob * (1.0 - prob) / draws);
              if (prob <= 0.0 && seen == 0.0) continue;
              ++entries;
              if (std::abs(seen - prob) > 3.0 * se) {
                ++entry_misses;
                t.expect(false, tag + fmt(" node %.0f entry %.6g sampled %.6g", j, prob, seen));
              }
            }
          }
        }
      }
    }
  }
  t.expect(ladder_violations == 0, std::to_string(ladder_violations) + " ladder violations");
  return t.outcome(std::to_string(entries) + " lottery entries, " +
                   std::to_string(entry_misses) + " outside 3 se, " +
                   std::to_string(ladder_violations) + " ladder violations");
}

Outcome zero_lower_bound() {
  Tally t;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    RandomParams p;
    p.seed = 500 + seed;
    p.n = 2 + static_cast<int>(seed % 5);
    p.grid_size = 3 + static_cast<int>(seed % 3);
    p.family = CurveFamily::kMixed;
    p.L = 0.0;
    const Instance inst = gen_random(p);
    const LpSolveResult lp = solve_lp(build_base_lp(inst, Objective::kSurplus));
    const double consolidated = consolidate_prices(inst, lp.solution).surplus;
    const double best = exact_oracle(inst).value;
    worst = std::max(worst, std::abs(consolidated - best) / std::max(1.0, std::abs(best)));
    t.expect(rel_close(consolidated, best, 1e-6),
             "seed " + std::to_string(seed) + fmt(": LP %.9g vs oracle %.9g", consolidated, best));
  }
  return t.outcome(fmt("worst relative difference %.3g", worst));
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    std::function<Outcome()> run;
    double budget;  // seconds, 0 for none
  };
  const std::vector<Entry> entries = {
      {1, "integrality gap reproduction", gap_reproduction, 5},
      {2, "bicriteria guarantee", bicriteria, 600},
      {3, "price consolidation properties", consolidation_properties, 60},
      {4, "structural rescaling invariant", structural_invariant, 0},
      {5, "queueing exactness", queueing_exactness, 10},
      {6, "simulation concordance", simulation_concordance, 120},
      {7, "hardness instance consistency", hardness_consistency, 30},
      {8, "envy-free optimality", envy_optimality, 300},
      {9, "zero lower bound solvability", zero_lower_bound, 0},
  };
  int failed = 0;
  for (const Entry& e : entries) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = e.run();
    } catch (const std::exception& ex) {
      out = {false, std::string("exception: ") + ex.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (e.budget > 0 && secs > e.budget) {
      out.pass = false;
      out.detail += fmt("; over the %.0f s budget", e.budget);
    }
    failed += !out.pass;
    std::printf("%s %d %s: %s (%.2f s)\n", out.pass ? "PASS" : "FAIL", e.id, e.name,
                out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
