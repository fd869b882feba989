#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "tsfl/envy.hpp"
#include "tsfl/instance.hpp"

namespace tsfl {

// Two isolated markets whose LP relaxation beats every integral solution.
// Metadata: c_prime, integer_opt, lp_value, gap.
Instance gen_integrality_gap(double L, double c, double eps, int grid_size = 17);

struct Graph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<int> degrees() const;
};

Graph cycle_graph(int n);
Graph hypercube_graph(int dimension);
// Vertex i joined to i +- 1..k/2 (mod n), plus i + n/2 when k is odd.
Graph circulant_graph(int n, int k);

// Independent-set reduction: supply nodes at the vertices (s = k, wage
// 1 - delta), one unit-demand node at every edge midpoint (value 1), edges of
// length 2R, L = k and facilities only at the vertices.
Instance gen_hardness(const Graph& g, double R, double delta);
// Uses the k-cube when n = 2^k, otherwise the circulant graph.
Instance gen_hardness(int k, int n_vertices, double R, double delta);

int max_independent_set(const Graph& g);

enum class CurveFamily { kUniform, kExponential, kNormal, kMixed };
CurveFamily parse_curve_family(const std::string& name);

struct RandomParams {
  int n = 6;
  std::uint64_t seed = 1;
  CurveFamily family = CurveFamily::kUniform;
  double scale = 1.0;  // side of the coordinate box
  double L = 1.0;
  double R = 0.35;
  int grid_size = 5;
};

Instance gen_random(const RandomParams& params);

struct RandomEnvyParams {
  int n = 3;
  std::uint64_t seed = 1;
  int max_subtypes = 3;
  int grid = 4;  // |prices| = |wages|
  double scale = 1.0;
  double L = 0.5;
  double R = 0.4;
};

EnvyInstance gen_random_envy(const RandomEnvyParams& params);

}  // namespace tsfl
