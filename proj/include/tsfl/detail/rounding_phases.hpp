#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "tsfl/errors.hpp"
#include "tsfl/instance.hpp"
#include "tsfl/rounding.hpp"

namespace tsfl::detail {

inline constexpr double kRoundOpenTol = 1e-7;

// Adapter requirements: num_slots(), num_nodes(), y(i), location(i),
// demand_mass(i, j), supply_mass(i, j), demand_full(j), supply_full(j),
// add_slot(location) -> index, move(src, dst), close(i).
template <class Adapter>
void run_rounding(Adapter& a, const Instance& instance, RoundingTrace& trace) {
  enum class Status { kClosed, kPartial, kComplete };
  const int n = a.num_nodes();
  const double radius = instance.radius;
  std::vector<bool> dfull(n), sfull(n);
  for (int j = 0; j < n; ++j) {
    dfull[j] = a.demand_full(j);
    sfull[j] = a.supply_full(j);
  }
  std::vector<Status> status;
  for (int i = 0; i < a.num_slots(); ++i) {
    status.push_back(a.y(i) > 0.0 ? Status::kPartial : Status::kClosed);
  }
  auto connected = [&](int i, int j) {
    return a.demand_mass(i, j) > 0.0 || a.supply_mass(i, j) > 0.0;
  };
  auto factor = [&](double d) { return radius > 0 ? d / radius : (d > 0 ? 1e300 : 0.0); };

  std::vector<bool> touched(n, false);
  for (int j = 0; j < n; ++j) {
    if (touched[j] || !(dfull[j] || sfull[j])) continue;
    bool untouched = true;
    for (int i = 0; i < a.num_slots(); ++i) {
      if (connected(i, j) && status[i] != Status::kPartial) untouched = false;
    }
    if (!untouched) continue;
    const bool demand_side = dfull[j];
    std::vector<int> group;
    for (int i = 0; i < a.num_slots(); ++i) {
      if (status[i] != Status::kPartial) continue;
      const double mass = demand_side ? a.demand_mass(i, j) : a.supply_mass(i, j);
      if (mass > 0.0) group.push_back(i);
    }
    if (group.empty()) continue;
    if (group.size() == 1 && a.y(group[0]) >= 1.0 - kRoundOpenTol) {
      const int kept = group[0];
      status[kept] = Status::kComplete;
      for (int k = 0; k < n; ++k) {
        if (!connected(kept, k)) continue;
        touched[k] = true;
        trace.phase1_factor = std::max(
            trace.phase1_factor, factor(instance.distance(k, a.location(kept))));
      }
      continue;
    }
    const int target = a.add_slot(j);
    status.push_back(Status::kComplete);
    for (int i : group) {
      trace.moves.push_back({1, i, a.location(i), target, j, a.y(i)});
      a.move(i, target);
      status[i] = Status::kClosed;
    }
    for (int k = 0; k < n; ++k) {
      if (!connected(target, k)) continue;
      touched[k] = true;
      trace.phase1_factor =
          std::max(trace.phase1_factor, factor(instance.distance(k, j)));
    }
  }

  const int slots = a.num_slots();
  for (int i = 0; i < slots; ++i) {
    if (status[i] != Status::kPartial || a.y(i) >= 1.0 - kRoundOpenTol) continue;
    bool any = false;
    for (int k = 0; k < n && !any; ++k) any = connected(i, k);
    if (!any) {
      trace.moves.push_back({2, i, a.location(i), -1, -1, a.y(i)});
      a.close(i);
      status[i] = Status::kClosed;
      continue;
    }
    int via = -1;
    bool via_demand = false;
    for (int j = 0; j < n && via < 0; ++j) {
      if (!touched[j]) continue;
      if (dfull[j] && a.demand_mass(i, j) > 0.0) {
        via = j;
        via_demand = true;
      } else if (sfull[j] && a.supply_mass(i, j) > 0.0) {
        via = j;
      }
    }
    if (via < 0) {
      throw InvariantError("partially open facility slot " + std::to_string(i) +
                           " has no touched fully utilized neighbor");
    }
    int target = -1;
    int best_rank = 3;
    double best_dist = 0.0;
    for (int t = 0; t < a.num_slots(); ++t) {
      if (status[t] != Status::kComplete || !connected(t, via)) continue;
      const bool same_side = via_demand ? a.demand_mass(t, via) > 0.0
                                        : a.supply_mass(t, via) > 0.0;
      const int rank = same_side ? 0 : 1;
      const double d = instance.distance(a.location(t), via);
      if (rank < best_rank || (rank == best_rank && d < best_dist)) {
        best_rank = rank;
        best_dist = d;
        target = t;
      }
    }
    if (target < 0) {
      throw InvariantError("no completely open facility serves node " +
                           std::to_string(via));
    }
    for (int k = 0; k < n; ++k) {
      if (!connected(i, k)) continue;
      trace.phase2_factor = std::max(
          trace.phase2_factor,
          factor(instance.distance(k, a.location(target))));
    }
    trace.moves.push_back({2, i, a.location(i), target, a.location(target), a.y(i)});
    a.move(i, target);
    status[i] = Status::kClosed;
  }
}

template <class Adapter>
void replay_moves(Adapter& a, const RoundingTrace& trace) {
  for (const RoundingMove& mv : trace.moves) {
    if (mv.source < 0 || mv.source >= a.num_slots()) {
      throw InputError("trace move references unknown slot " +
                       std::to_string(mv.source));
    }
    if (mv.target < 0) {
      a.close(mv.source);
      continue;
    }
    if (mv.target == a.num_slots()) a.add_slot(mv.target_location);
    if (mv.target > a.num_slots()) {
      throw InputError("trace move targets slot " + std::to_string(mv.target) +
                       " out of order");
    }
    a.move(mv.source, mv.target);
  }
}

}  // namespace tsfl::detail
