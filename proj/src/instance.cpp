#include "tsfl/instance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tsfl/errors.hpp"

namespace tsfl {
namespace {

constexpr double kMetricTol = 1e-9;

void check_node(const Instance& instance, NodeId v) {
  if (v < 0 || v >= instance.size()) {
    throw InputError("unknown node id " + std::to_string(v));
  }
}

}  // namespace

bool Instance::is_candidate(NodeId v) const {
  return std::binary_search(candidates.begin(), candidates.end(), v);
}

double Instance::max_surplus() const {
  double total = 0.0;
  for (const Node& node : nodes) total += node.demand.volume();
  return total * p_max;
}

void validate_metric(const Instance& instance) {
  const int n = instance.size();
  if (n == 0) throw InputError("instance has no nodes");
  if (instance.distances.size() != static_cast<size_t>(n) * n) {
    throw InputError("distance matrix must be n x n");
  }
  if (!(instance.p_max > 0) || !std::isfinite(instance.p_max)) {
    throw InputError("instance.p_max must be positive and finite");
  }
  if (!(instance.flow_lower_bound >= 0) || !std::isfinite(instance.flow_lower_bound)) {
    throw InputError("L must be finite and nonnegative");
  }
  if (!(instance.radius >= 0) || !std::isfinite(instance.radius)) {
    throw InputError("R must be finite and nonnegative");
  }
  for (int a = 0; a < n; ++a) {
    if (instance.distance(a, a) != 0.0) {
      throw InputError("instance.distance(" + std::to_string(a) + "," +
                       std::to_string(a) + ") must be 0");
    }
    for (int b = 0; b < n; ++b) {
      const double dab = instance.distance(a, b);
      if (std::isnan(dab) || dab < 0) {
        throw InputError("negative or NaN distance at (" + std::to_string(a) +
                         "," + std::to_string(b) + ")");
      }
      if (std::abs(dab - instance.distance(b, a)) > kMetricTol &&
          !(std::isinf(dab) && std::isinf(instance.distance(b, a)))) {
        throw InputError("distance matrix not symmetric at (" +
                         std::to_string(a) + "," + std::to_string(b) + ")");
      }
    }
  }
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const double via = instance.distance(a, c) + instance.distance(c, b);
        if (instance.distance(a, b) > via + kMetricTol * std::max(1.0, via)) {
          std::ostringstream out;
          out << "triangle inequality fails for (" << a << "," << b
              << ") via " << c;
          throw InputError(out.str());
        }
      }
    }
  }
  for (size_t k = 0; k < instance.candidates.size(); ++k) {
    check_node(instance, instance.candidates[k]);
    if (k > 0 && instance.candidates[k] <= instance.candidates[k - 1]) {
      throw InputError("facility instance.candidates must be strictly ascending");
    }
  }
}

void Instance::validate(bool require_regular) const {
  validate_metric(*this);
  const int n = size();
  for (int v = 0; v < n; ++v) {
    const Node& node = nodes[v];
    for (const Curve* curve : {&node.demand, &node.supply}) {
      try {
        curve->validate();
      } catch (const InputError& e) {
        throw InputError("node " + std::to_string(v) + ": " + e.what());
      }
      if (std::abs(curve->p_max() - p_max) > 1e-12 * p_max) {
        throw InputError("node " + std::to_string(v) +
                         ": curve built with a different p_max");
      }
      if (require_regular) {
        const RegularityResult reg = check_regularity(*curve);
        if (!reg.regular) {
          throw InputError("node " + std::to_string(v) + ": " +
                           (curve == &node.demand ? "demand" : "supply") +
                           " curve is not regular at point " +
                           std::to_string(reg.first_violation));
        }
      }
    }
  }
}

std::vector<NodeId> ball(const Instance& instance, NodeId center,
                         double radius) {
  check_node(instance, center);
  std::vector<NodeId> out;
  for (NodeId v = 0; v < instance.size(); ++v) {
    if (instance.distance(center, v) <= radius) out.push_back(v);
  }
  return out;
}

std::vector<NodeId> candidate_ball(const Instance& instance, NodeId node,
                                   double radius) {
  check_node(instance, node);
  std::vector<NodeId> out;
  for (NodeId i : instance.candidates) {
    if (instance.distance(i, node) <= radius) out.push_back(i);
  }
  return out;
}

std::vector<double> euclidean_distances(
    const std::vector<std::vector<double>>& points) {
  const size_t n = points.size();
  std::vector<double> d(n * n, 0.0);
  for (size_t a = 0; a < n; ++a) {
    for (size_t b = 0; b < n; ++b) {
      if (points[a].size() != points[b].size()) {
        throw InputError("coordinates must share a dimension");
      }
      double sum = 0.0;
      for (size_t k = 0; k < points[a].size(); ++k) {
        const double diff = points[a][k] - points[b][k];
        sum += diff * diff;
      }
      d[a * n + b] = std::sqrt(sum);
    }
  }
  return d;
}

}  // namespace tsfl
