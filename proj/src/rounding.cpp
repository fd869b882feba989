#include "tsfl/rounding.hpp"

#include <cstdio>
#include <sstream>

#include "tsfl/detail/rounding_phases.hpp"
#include "tsfl/errors.hpp"
#include "tsfl/structure.hpp"

namespace tsfl {
namespace {

class FractionalAdapter {
 public:
  explicit FractionalAdapter(FractionalSolution& sol) : sol_(sol) {
    refresh_accounts(sol_);
  }

  int num_slots() const { return static_cast<int>(sol_.facilities.size()); }
  int num_nodes() const { return sol_.num_nodes(); }
  double y(int i) const { return sol_.facilities[i].y; }
  NodeId location(int i) const { return sol_.facilities[i].location; }
  double demand_mass(int i, int j) const {
    return tsfl::demand_mass(sol_.facilities[i], j);
  }
  double supply_mass(int i, int j) const {
    return tsfl::supply_mass(sol_.facilities[i], j);
  }
  bool demand_full(int j) const { return is_fully_utilized_demand(sol_, j); }
  bool supply_full(int j) const { return is_fully_utilized_supply(sol_, j); }
  int add_slot(NodeId location) { return add_facility(sol_, location); }
  void close(int i) { scale_facility(sol_, i, 0.0); }
  void move(int src, int dst) {
    FacilityBlock& from = sol_.facilities[src];
    FacilityBlock& to = sol_.facilities[dst];
    to.y += from.y;
    for (size_t j = 0; j < to.demand.size(); ++j) {
      for (size_t k = 0; k < to.demand[j].size(); ++k) to.demand[j][k] += from.demand[j][k];
      for (size_t k = 0; k < to.supply[j].size(); ++k) to.supply[j][k] += from.supply[j][k];
    }
    scale_facility(sol_, src, 0.0);
  }

 private:
  FractionalSolution& sol_;
};

}  // namespace

std::string RoundingTrace::to_text() const {
  std::ostringstream out;
  out << "# phase source@location target@location mass\n";
  char buf[64];
  for (const RoundingMove& m : moves) {
    std::snprintf(buf, sizeof buf, "%.17g", m.mass);
    out << m.phase << " " << m.source << "@" << m.source_location << " "
        << m.target << "@" << m.target_location << " " << buf << "\n";
  }
  std::snprintf(buf, sizeof buf, "%.17g", phase1_factor);
  out << "# phase1_factor " << buf << "\n";
  std::snprintf(buf, sizeof buf, "%.17g", phase2_factor);
  out << "# phase2_factor " << buf << "\n";
  return out.str();
}

RoundingTrace RoundingTrace::parse(const std::string& text) {
  RoundingTrace trace;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream meta(line.substr(1));
      std::string key;
      double value = 0.0;
      if (meta >> key >> value) {
        if (key == "phase1_factor") trace.phase1_factor = value;
        if (key == "phase2_factor") trace.phase2_factor = value;
      }
      continue;
    }
    RoundingMove m;
    char at1 = 0;
    char at2 = 0;
    std::istringstream row(line);
    if (!(row >> m.phase >> m.source >> at1 >> m.source_location >> m.target >>
          at2 >> m.target_location >> m.mass) ||
        at1 != '@' || at2 != '@') {
      throw InputError("trace line " + std::to_string(lineno) + ": malformed move");
    }
    trace.moves.push_back(m);
  }
  return trace;
}

RoundingResult round_solution(const Instance& instance,
                              const FractionalSolution& sol) {
  RoundingResult result;
  result.solution = sol;
  FractionalAdapter adapter(result.solution);
  detail::run_rounding(adapter, instance, result.trace);
  resync_level_masses(result.solution);
  refresh_accounts(result.solution);
  return result;
}

FractionalSolution replay_trace(const FractionalSolution& sol,
                                const RoundingTrace& trace) {
  FractionalSolution out = sol;
  FractionalAdapter adapter(out);
  detail::replay_moves(adapter, trace);
  resync_level_masses(out);
  refresh_accounts(out);
  return out;
}

}  // namespace tsfl
