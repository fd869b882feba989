#pragma once

#include <limits>
#include <map>
#include <string>
#include <vector>

#include "tsfl/curve.hpp"

namespace tsfl {

using NodeId = int;

// Distance between nodes in different components. IEEE infinity, so it is
// absorbing under addition in triangle-inequality checks.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct Node {
  std::string name;
  Curve demand;
  Curve supply;
  // Planar coordinates, present when the metric was given as points.
  std::vector<double> coordinates;
};

struct Instance {
  std::vector<Node> nodes;
  std::vector<double> distances;  // row-major n x n
  std::vector<NodeId> candidates;  // facility locations, ascending
  double flow_lower_bound = 0.0;   // L
  double radius = 0.0;             // R
  double p_max = 0.0;
  int grid_size = Curve::kDefaultGridSize;
  std::map<std::string, double> metadata;

  int size() const { return static_cast<int>(nodes.size()); }
  double distance(NodeId a, NodeId b) const {
    return distances[static_cast<size_t>(a) * nodes.size() + b];
  }
  bool is_candidate(NodeId v) const;
  // Sum over nodes of d_j * p_max; the largest surplus any solution can earn.
  double max_surplus() const;

  // Metric, curve, and parameter checks; throws InputError. Regularity of
  // every curve is required unless `require_regular` is false.
  void validate(bool require_regular = true) const;
};

// Distance matrix, parameters and candidate checks only; throws InputError.
void validate_metric(const Instance& instance);

// All nodes within `radius` of `center` (inclusive).
std::vector<NodeId> ball(const Instance& instance, NodeId center, double radius);
// Facility candidates within `radius` of `node`.
std::vector<NodeId> candidate_ball(const Instance& instance, NodeId node,
                                   double radius);

std::vector<double> euclidean_distances(
    const std::vector<std::vector<double>>& points);

}  // namespace tsfl
