#pragma once

#include "tsfl/instance.hpp"

namespace fixture {

// One market with values U[2,3], costs U[0,1] and d = s = L.
inline tsfl::Instance single_node(double L = 1.0, int grid = 2) {
  tsfl::Instance inst;
  inst.p_max = 3.0;
  inst.flow_lower_bound = L;
  inst.radius = 1.0;
  inst.grid_size = grid;
  inst.nodes.push_back({"v", tsfl::make_uniform_demand_curve(L, 2, 3, grid, 3.0),
                        tsfl::make_uniform_supply_curve(L, 0, 1, grid, 3.0), {}});
  inst.distances = {0.0};
  inst.candidates = {0};
  return inst;
}

// Nodes on a line at the given positions, uniform curves.
inline tsfl::Instance line(const std::vector<double>& xs, double L, double R, int grid = 3) {
  tsfl::Instance inst;
  inst.p_max = 3.0;
  inst.flow_lower_bound = L;
  inst.radius = R;
  inst.grid_size = grid;
  std::vector<std::vector<double>> pts;
  for (size_t j = 0; j < xs.size(); ++j) {
    const double d = 1.0 + 0.25 * static_cast<double>(j % 3);
    inst.nodes.push_back({"n" + std::to_string(j),
                          tsfl::make_uniform_demand_curve(d, 1.0 + 0.2 * (j % 2), 3.0, grid, 3.0),
                          tsfl::make_uniform_supply_curve(1.5, 0.0, 1.0 + 0.3 * (j % 2), grid, 3.0),
                          {xs[j], 0.0}});
    pts.push_back(inst.nodes.back().coordinates);
    inst.candidates.push_back(static_cast<tsfl::NodeId>(j));
  }
  inst.distances = tsfl::euclidean_distances(pts);
  return inst;
}

}  // namespace fixture
