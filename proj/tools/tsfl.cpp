#include <cstdio>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "tsfl/driver.hpp"
#include "tsfl/envy.hpp"
#include "tsfl/errors.hpp"
#include "tsfl/generators.hpp"
#include "tsfl/io.hpp"
#include "tsfl/oracle.hpp"
#include "tsfl/queueing.hpp"

using namespace tsfl;

namespace {

constexpr int kOk = 0;
constexpr int kInfeasible = 1;
constexpr int kInputError = 2;
constexpr int kInternalError = 3;

std::string fmt(double x) {
  std::ostringstream out;
  out << std::setprecision(12) << x;
  return out.str();
}

std::string join(const std::vector<NodeId>& ids) {
  std::string s = "[";
  for (size_t i = 0; i < ids.size(); ++i) s += (i ? "," : "") + std::to_string(ids[i]);
  return s + "]";
}

void emit(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
  } else {
    write_file(out, text);
  }
}

struct Common {
  double epsilon = 0.34;
  double delta = -1.0;
  std::string objective = "surplus";
  double radius_factor = 4.0;
  std::uint64_t seed = 1;
  int grid_size = Curve::kDefaultGridSize;
  int jobs = 1;
  std::string out;
};

SolverConfig config_of(const Common& c) {
  SolverConfig cfg;
  cfg.epsilon = c.epsilon;
  cfg.delta = c.delta;
  cfg.objective = parse_objective(c.objective);
  cfg.jobs = c.jobs;
  cfg.seed = c.seed;
  return cfg;
}

void add_solver_flags(CLI::App* cmd, Common& c) {
  cmd->add_option("--epsilon", c.epsilon, "approximation parameter")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", c.delta, "additive slack (default 1e-4 * W_max)");
  cmd->add_option("--objective", c.objective, "surplus|profit|throughput");
  cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", c.seed, "seed");
  cmd->add_option("--out", c.out, "output file (default stdout)");
}

void print_rates(std::ostream& os, const MarketRates& r) {
  os << "lambda: " << fmt(r.lambda) << "\nmu: " << fmt(r.mu) << "\ngamma: " << fmt(r.gamma)
     << "\nkappa: " << fmt(r.kappa) << "\n";
}

int run(int argc, char** argv) {
  CLI::App app{"Two-sided facility location with posted prices and wages"};
  app.require_subcommand(1);
  Common c;
  int code = kOk;

  std::string instance_path, solution_path, policy_path;

  auto* solve_cmd = app.add_subcommand("solve", "bicriteria approximation");
  solve_cmd->add_option("instance", instance_path)->required();
  add_solver_flags(solve_cmd, c);
  std::string report_path;
  solve_cmd->add_option("--report", report_path, "write the run report here too");
  solve_cmd->callback([&] {
    const Instance inst = parse_instance(read_file(instance_path));
    inst.validate(true);
    const SolveOutcome res = solve(inst, config_of(c));
    if (!c.out.empty()) write_file(c.out, serialize_solution(res.solution));
    if (!report_path.empty()) write_file(report_path, res.report.to_text());
    std::cout << res.report.to_text();
    if (c.out.empty()) std::cout << serialize_solution(res.solution);
  });

  auto* oracle_cmd = app.add_subcommand("oracle", "exhaustive optimum over facility subsets");
  oracle_cmd->add_option("instance", instance_path)->required();
  add_solver_flags(oracle_cmd, c);
  oracle_cmd->callback([&] {
    const Instance inst = parse_instance(read_file(instance_path));
    const OracleResult res = exact_oracle(inst, parse_objective(c.objective), c.jobs);
    std::cout << "objective: " << c.objective << "\nvalue: " << fmt(res.value)
              << "\nopen: " << join(res.open) << "\nsubsets: " << res.subsets
              << "\ninfeasible_subsets: " << res.infeasible << "\n";
    if (!c.out.empty()) write_file(c.out, serialize_solution(res.solution));
  });

  bool dump_lp = false;
  auto* lp_cmd = app.add_subcommand("lp", "solve the base LP relaxation only");
  lp_cmd->add_option("instance", instance_path)->required();
  add_solver_flags(lp_cmd, c);
  lp_cmd->add_flag("--dump", dump_lp, "write the LP in text form to --out");
  lp_cmd->callback([&] {
    const Instance inst = parse_instance(read_file(instance_path));
    const LPModel model = build_base_lp(inst, parse_objective(c.objective));
    if (dump_lp) emit(c.out, model.to_lp_text());
    const LpSolveResult res = solve_lp(model);
    std::ostream& os = dump_lp && c.out.empty() ? std::cerr : std::cout;
    os << "status: " << to_string(res.status) << "\ncolumns: " << model.program().num_cols()
       << "\nrows: " << model.program().num_rows() << "\n";
    if (res.status == LpStatus::kOptimal) {
      os << "objective: " << fmt(res.objective) << "\niterations: " << res.iterations
         << "\nmax_residual: " << fmt(res.max_residual) << "\n";
    } else {
      code = kInfeasible;
    }
  });

  auto* check_cmd = app.add_subcommand("check", "verify a solution against an instance");
  check_cmd->add_option("instance", instance_path)->required();
  check_cmd->add_option("solution", solution_path)->required();
  check_cmd->add_option("--radius-factor", c.radius_factor, "allowed distance over R");
  check_cmd->callback([&] {
    const Instance inst = parse_instance(read_file(instance_path));
    const IntegralSolution sol = parse_solution(read_file(solution_path));
    const FeasibilityReport rep = verify_feasibility(inst, sol, c.radius_factor);
    std::cout << rep.to_text();
    if (!rep.feasible) code = kInfeasible;
  });

  MarketRates rates;
  double eta = 0.1;
  double cparam = -1.0;
  double buyer_deadline = -1.0, seller_deadline = -1.0;
  auto add_rates = [&](CLI::App* cmd) {
    cmd->add_option("--lambda", rates.lambda)->check(CLI::PositiveNumber);
    cmd->add_option("--mu", rates.mu)->check(CLI::PositiveNumber);
    cmd->add_option("--gamma", rates.gamma, "seller abandonment rate")->check(CLI::PositiveNumber);
    cmd->add_option("--kappa", rates.kappa, "buyer abandonment rate")->check(CLI::PositiveNumber);
  };
  auto* queue_cmd = app.add_subcommand("queue", "abandonment analytics for one facility");
  add_rates(queue_cmd);
  queue_cmd->add_option("--eta", eta, "target abandonment probability");
  queue_cmd->add_option("--c", cparam, "also run the sandwich check at this c");
  queue_cmd->add_option("--buyer-deadline", buyer_deadline, "mean buyer deadline for EDF");
  queue_cmd->add_option("--seller-deadline", seller_deadline, "mean seller deadline for EDF");
  queue_cmd->add_option("--out", c.out);
  queue_cmd->callback([&] {
    std::ostringstream os;
    print_rates(os, rates);
    const AbandonmentResult ab = abandonment_probability(rates);
    os << "abandonment: " << fmt(ab.probability) << "\nerror_estimate: "
       << fmt(ab.error_estimate) << "\nstates: " << ab.states << "\n";
    os << "eta: " << fmt(eta) << "\nsufficient_flow: "
       << fmt(sufficient_flow(rates.gamma, rates.kappa, eta)) << "\n";
    if (eta <= 1.0 / 6.0) {
      const NecessaryFlow nf = necessary_flow(rates.gamma, rates.kappa, eta);
      os << "necessary_flow: " << fmt(nf.flow) << "\nbalanced_ratio: [" << fmt(nf.ratio_lo)
         << ", " << fmt(nf.ratio_hi) << "]\n";
    }
    if (cparam > 0) {
      const Sandwich s = sandwich_check(cparam);
      os << "sandwich_c: " << fmt(cparam) << "\nsandwich_lower: " << fmt(s.lower)
         << "\nsandwich_exact: " << fmt(s.exact) << "\nsandwich_upper: " << fmt(s.upper)
         << "\nsandwich_holds: " << (s.holds ? "true" : "false") << "\n";
    }
    if (buyer_deadline > 0 && seller_deadline > 0) {
      const EdfBound b = edf_abandonment_bound(rates.lambda, buyer_deadline, seller_deadline);
      os << "edf_bound: " << fmt(b.overall) << "\nedf_bound_buyers: " << fmt(b.buyers)
         << "\nedf_bound_sellers: " << fmt(b.sellers)
         << "\nedf_weight_lower_bound: " << fmt(edf_weight_lower_bound(eta)) << "\n";
    }
    emit(c.out, os.str());
  });

  double horizon = 1e4;
  int replications = 20;
  auto* sim_cmd = app.add_subcommand("simulate", "FIFO matching simulation");
  add_rates(sim_cmd);
  sim_cmd->add_option("--horizon", horizon)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--replications", replications)->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", c.seed);
  sim_cmd->add_option("--out", c.out);
  sim_cmd->callback([&] {
    std::ostringstream os;
    print_rates(os, rates);
    const SimulationResult sim = simulate_fifo(rates, horizon, replications, c.seed);
    os << "horizon: " << fmt(horizon) << "\nreplications: " << replications
       << "\nmean_abandonment: " << fmt(sim.mean) << "\nstderr: " << fmt(sim.stderr_)
       << "\narrivals: " << sim.arrivals << "\nabandoned: " << sim.abandoned << "\n";
    try {
      os << "exact_abandonment: " << fmt(abandonment_probability(rates).probability) << "\n";
    } catch (const TruncationError&) {
      os << "exact_abandonment: unavailable\n";
    }
    emit(c.out, os.str());
  });

  auto* envy_cmd = app.add_subcommand("envy-solve", "envy-free lottery pricing");
  envy_cmd->add_option("instance", instance_path)->required();
  envy_cmd->add_option("--out", c.out, "write the lottery policy here");
  envy_cmd->callback([&] {
    const EnvyInstance inst = parse_envy_instance(read_file(instance_path));
    const EnvyLpResult lp = solve_envy_lp(inst);
    std::cout << "lp_status: " << to_string(lp.status) << "\n";
    if (lp.status != LpStatus::kOptimal) {
      code = kInfeasible;
      return;
    }
    const EnvySolution rescaled = rescale_envy(inst, lp.solution);
    const EnvyRounding rounded = round_envy(inst, rescaled);
    const LotteryPolicy policy = to_policy(inst, rounded.solution);
    std::cout << "lp_profit: " << fmt(lp.objective) << "\nrescaled_profit: "
              << fmt(rescaled.profit) << "\nrounded_profit: " << fmt(rounded.solution.profit)
              << "\npolicy_profit: " << fmt(policy.profit)
              << "\nopen: " << join(policy.facilities) << "\nphase1_factor: "
              << fmt(rounded.trace.phase1_factor) << "\nphase2_factor: "
              << fmt(rounded.trace.phase2_factor) << "\n";
    if (!c.out.empty()) write_file(c.out, serialize_policy(inst, policy));
  });

  int node = 0;
  std::string side = "demand";
  long long draws = 10;
  auto* sample_cmd = app.add_subcommand("envy-sample", "draw price or wage ladders");
  sample_cmd->add_option("instance", instance_path)->required();
  sample_cmd->add_option("policy", policy_path)->required();
  sample_cmd->add_option("--node", node);
  sample_cmd->add_option("--side", side, "demand|supply");
  sample_cmd->add_option("--draws", draws)->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", c.seed);
  sample_cmd->add_option("--out", c.out);
  sample_cmd->callback([&] {
    const EnvyInstance inst = parse_envy_instance(read_file(instance_path));
    const LotteryPolicy policy = parse_policy(read_file(policy_path));
    if (side != "demand" && side != "supply") throw InputError("--side must be demand or supply");
    const Side s = side == "demand" ? Side::kDemand : Side::kSupply;
    const auto& grid = s == Side::kDemand ? inst.prices : inst.wages;
    std::ostringstream os;
    for (long long d = 0; d < draws; ++d) {
      const LadderDraw ld = sample_ladder(inst, policy, node, s, c.seed, d);
      os << d << " facility="
         << (ld.facility >= 0 ? std::to_string(policy.facilities[ld.facility]) : "none");
      for (int idx : ld.grid_index) os << " " << fmt(grid[idx]);
      os << "\n";
    }
    emit(c.out, os.str());
  });

  auto* gen_cmd = app.add_subcommand("gen", "instance generators");
  gen_cmd->require_subcommand(1);
  double L = 10.0, cc = 0.5, eps = 0.0;
  auto* gap_cmd = gen_cmd->add_subcommand("gap", "integrality-gap instance");
  gap_cmd->add_option("--L", L);
  gap_cmd->add_option("--c", cc);
  gap_cmd->add_option("--eps", eps);
  gap_cmd->add_option("--grid-size", c.grid_size);
  gap_cmd->add_option("--out", c.out);
  gap_cmd->callback([&] {
    emit(c.out, serialize_instance(gen_integrality_gap(L, cc, eps, c.grid_size)));
  });
  int k = 2, nv = 4;
  double R = 1.0, delta = 0.1;
  auto* hard_cmd = gen_cmd->add_subcommand("hardness", "independent-set reduction instance");
  hard_cmd->add_option("--k", k, "degree");
  hard_cmd->add_option("--n", nv, "vertices");
  hard_cmd->add_option("--R", R);
  hard_cmd->add_option("--delta", delta);
  hard_cmd->add_option("--out", c.out);
  hard_cmd->callback([&] { emit(c.out, serialize_instance(gen_hardness(k, nv, R, delta))); });
  RandomParams rp;
  std::string family = "uniform";
  auto* rand_cmd = gen_cmd->add_subcommand("random", "seeded random instance");
  rand_cmd->add_option("--n", rp.n);
  rand_cmd->add_option("--seed", rp.seed);
  rand_cmd->add_option("--family", family, "uniform|exponential|normal|mixed");
  rand_cmd->add_option("--scale", rp.scale);
  rand_cmd->add_option("--L", rp.L);
  rand_cmd->add_option("--R", rp.R);
  rand_cmd->add_option("--grid-size", rp.grid_size);
  rand_cmd->add_option("--out", c.out);
  rand_cmd->callback([&] {
    rp.family = parse_curve_family(family);
    emit(c.out, serialize_instance(gen_random(rp)));
  });
  RandomEnvyParams ep;
  auto* renvy_cmd = gen_cmd->add_subcommand("envy", "seeded random envy instance");
  renvy_cmd->add_option("--n", ep.n);
  renvy_cmd->add_option("--seed", ep.seed);
  renvy_cmd->add_option("--subtypes", ep.max_subtypes);
  renvy_cmd->add_option("--grid", ep.grid);
  renvy_cmd->add_option("--L", ep.L);
  renvy_cmd->add_option("--R", ep.R);
  renvy_cmd->add_option("--out", c.out);
  renvy_cmd->callback([&] { emit(c.out, serialize_envy_instance(gen_random_envy(ep))); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
}
