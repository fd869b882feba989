#include "tsfl/generators.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

#include "tsfl/errors.hpp"

namespace tsfl {

Instance gen_integrality_gap(double L, double c, double eps, int grid_size) {
  if (!(c > 0.0 && c < 1.0)) throw InputError("gap instance needs c in (0, 1)");
  if (!(L > 0.0)) throw InputError("gap instance needs L > 0");
  if (!(eps >= 0.0)) throw InputError("gap instance needs eps >= 0");
  const double cp = 2.0 * c / (1.0 - c);
  if (cp - 1.0 - eps < 0.0) {
    throw InputError("gap instance needs c' - 1 - eps >= 0 (c >= 1/3 when eps = 0)");
  }
  Instance inst;
  inst.p_max = std::max(3.0, 2.0 * cp + 1.0 + eps);
  inst.flow_lower_bound = L;
  inst.radius = 1.0;
  inst.grid_size = grid_size;
  Node v{"v", make_uniform_demand_curve(L, 2.0, 3.0, grid_size, inst.p_max),
         make_uniform_supply_curve(L, 0.0, 1.0, grid_size, inst.p_max), {}};
  Node w{"v'",
         make_uniform_demand_curve(L, cp - 1.0 - eps, 2.0 * cp + 1.0 + eps, grid_size,
                                   inst.p_max),
         make_uniform_supply_curve(L, 0.0, cp, grid_size, inst.p_max), {}};
  inst.nodes = {v, w};
  inst.distances = {0.0, kUnreachable, kUnreachable, 0.0};
  inst.candidates = {0, 1};
  const double ip = eps == 0.0 ? (2.0 + cp) * L : 2.0 * L;
  const double lp = (2.0 + cp / (1.0 + eps)) * L;
  inst.metadata = {{"c", c}, {"c_prime", cp}, {"eps", eps},
                   {"integer_opt", ip}, {"lp_value", lp}, {"gap", lp / ip}};
  inst.validate();
  return inst;
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(vertices, 0);
  for (auto [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

Graph cycle_graph(int n) {
  if (n < 3) throw InputError("a cycle needs at least 3 vertices");
  Graph g{n, {}};
  for (int i = 0; i < n; ++i) g.edges.emplace_back(i, (i + 1) % n);
  return g;
}

Graph hypercube_graph(int dimension) {
  if (dimension < 1 || dimension > 20) throw InputError("hypercube dimension out of range");
  Graph g{1 << dimension, {}};
  for (int v = 0; v < g.vertices; ++v) {
    for (int b = 0; b < dimension; ++b) {
      const int u = v ^ (1 << b);
      if (v < u) g.edges.emplace_back(v, u);
    }
  }
  return g;
}

Graph circulant_graph(int n, int k) {
  if (k < 1 || k >= n) throw InputError("need 1 <= k < n for a k-regular graph");
  if ((k * n) % 2 != 0) throw InputError("no k-regular graph on n vertices when k*n is odd");
  Graph g{n, {}};
  for (int i = 0; i < n; ++i) {
    for (int s = 1; s <= k / 2; ++s) {
      const int j = (i + s) % n;
      if (2 * s == n) {
        if (i < j) g.edges.emplace_back(i, j);
      } else {
        g.edges.emplace_back(i, j);
      }
    }
    if (k % 2 == 1 && i < n / 2) g.edges.emplace_back(i, i + n / 2);
  }
  return g;
}

Instance gen_hardness(const Graph& g, double R, double delta) {
  if (!(R > 0.0)) throw InputError("hardness instance needs R > 0");
  if (!(delta >= 0.0 && delta < 1.0)) throw InputError("hardness instance needs delta in [0, 1)");
  const std::vector<int> deg = g.degrees();
  if (deg.empty()) throw InputError("graph has no vertices");
  const int k = deg[0];
  for (int d : deg) {
    if (d != k) throw InputError("graph is not regular");
  }
  const int nv = g.vertices;
  const int ne = static_cast<int>(g.edges.size());
  const int n = nv + ne;
  Instance inst;
  inst.p_max = 2.0;
  inst.flow_lower_bound = k;
  inst.radius = R;
  inst.grid_size = 2;
  const std::vector<CurvePoint> none_d = {{0.0, inst.p_max, 0.0}, {1.0, inst.p_max, 0.0}};
  const std::vector<CurvePoint> none_s = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}};
  for (int v = 0; v < nv; ++v) {
    Node node;
    node.name = "v" + std::to_string(v);
    node.demand = Curve::from_points(CurveRole::kDemand, 0.0, none_d, inst.p_max);
    node.supply = Curve::from_points(CurveRole::kSupply, k,
                                     {{0.0, 0.0, 0.0}, {1.0, 1.0 - delta, k * (1.0 - delta)}},
                                     inst.p_max);
    inst.nodes.push_back(std::move(node));
    inst.candidates.push_back(v);
  }
  for (auto [a, b] : g.edges) {
    Node node;
    node.name = "e" + std::to_string(a) + "_" + std::to_string(b);
    node.demand = Curve::from_points(CurveRole::kDemand, 1.0,
                                     {{0.0, inst.p_max, 0.0}, {1.0, 1.0, 1.0}}, inst.p_max);
    node.supply = Curve::from_points(CurveRole::kSupply, 0.0, none_s, inst.p_max);
    inst.nodes.push_back(std::move(node));
  }
  // Shortest paths on the subdivided graph, every half-edge of length R.
  std::vector<double> d(static_cast<size_t>(n) * n, kUnreachable);
  for (int i = 0; i < n; ++i) d[static_cast<size_t>(i) * n + i] = 0.0;
  for (int e = 0; e < ne; ++e) {
    const int m = nv + e;
    for (int v : {g.edges[e].first, g.edges[e].second}) {
      d[static_cast<size_t>(m) * n + v] = R;
      d[static_cast<size_t>(v) * n + m] = R;
    }
  }
  for (int via = 0; via < n; ++via) {
    for (int i = 0; i < n; ++i) {
      const double a = d[static_cast<size_t>(i) * n + via];
      if (std::isinf(a)) continue;
      for (int j = 0; j < n; ++j) {
        const double cand = a + d[static_cast<size_t>(via) * n + j];
        double& cur = d[static_cast<size_t>(i) * n + j];
        if (cand < cur) cur = cand;
      }
    }
  }
  inst.distances = std::move(d);
  inst.metadata = {{"k", static_cast<double>(k)},
                   {"vertices", static_cast<double>(nv)},
                   {"delta", delta},
                   {"facility_surplus", k * delta}};
  if (nv <= 24) {
    const int mis = max_independent_set(g);
    inst.metadata["mis"] = mis;
    inst.metadata["optimal_surplus"] = k * delta * mis;
  }
  inst.validate(false);
  return inst;
}

Instance gen_hardness(int k, int n_vertices, double R, double delta) {
  if (k >= 1 && k <= 20 && n_vertices == (1 << k)) return gen_hardness(hypercube_graph(k), R, delta);
  return gen_hardness(circulant_graph(n_vertices, k), R, delta);
}

int max_independent_set(const Graph& g) {
  const int n = g.vertices;
  if (n > 30) throw InputError("independent set enumeration is limited to 30 vertices");
  std::vector<std::uint32_t> adj(n, 0);
  for (auto [a, b] : g.edges) {
    adj[a] |= 1u << b;
    adj[b] |= 1u << a;
  }
  int best = 0;
  const std::uint64_t total = 1ull << n;
  for (std::uint64_t mask = 0; mask < total; ++mask) {
    const auto m = static_cast<std::uint32_t>(mask);
    const int size = std::popcount(m);
    if (size <= best) continue;
    bool ok = true;
    for (int v = 0; v < n && ok; ++v) {
      if ((m >> v & 1u) && (adj[v] & m)) ok = false;
    }
    if (ok) best = size;
  }
  return best;
}

CurveFamily parse_curve_family(const std::string& name) {
  if (name == "uniform") return CurveFamily::kUniform;
  if (name == "exponential") return CurveFamily::kExponential;
  if (name == "normal") return CurveFamily::kNormal;
  if (name == "mixed") return CurveFamily::kMixed;
  throw InputError("unknown curve family '" + name + "'");
}

namespace {

struct Draw {
  CurveFamily family;
  double a = 0.0;
  double b = 0.0;
};

Distribution make_dist(const Draw& d) {
  switch (d.family) {
    case CurveFamily::kExponential:
      return Distribution::exponential(d.a);
    case CurveFamily::kNormal:
      return Distribution::normal(d.a, d.b);
    default:
      return Distribution::uniform(d.a, d.b);
  }
}

Draw draw_dist(std::mt19937_64& rng, CurveFamily family, bool demand) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (family == CurveFamily::kMixed) {
    const double r = u(rng);
    family = r < 0.5 ? CurveFamily::kUniform
                     : (r < 0.75 ? CurveFamily::kExponential : CurveFamily::kNormal);
  }
  Draw d{family};
  switch (family) {
    case CurveFamily::kUniform:
      d.a = demand ? 0.5 + 1.0 * u(rng) : 0.5 * u(rng);
      d.b = d.a + 0.5 + (demand ? 1.5 : 1.0) * u(rng);
      break;
    case CurveFamily::kExponential:
      d.a = demand ? 1.5 + 1.5 * u(rng) : 2.0 + 2.0 * u(rng);
      break;
    case CurveFamily::kNormal:
      d.a = demand ? 1.5 + u(rng) : 0.5 + 0.5 * u(rng);
      d.b = 0.2 + 0.3 * u(rng);
      break;
    case CurveFamily::kMixed:
      break;
  }
  return d;
}

}  // namespace

Instance gen_random(const RandomParams& p) {
  if (p.n < 1) throw InputError("random instance needs n >= 1");
  if (p.grid_size < 2) throw InputError("grid size must be at least 2");
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance inst;
  inst.flow_lower_bound = p.L;
  inst.radius = p.R;
  inst.grid_size = p.grid_size;
  std::vector<std::vector<double>> pts;
  std::vector<double> dvol, svol;
  std::vector<Draw> dd, sd;
  double top = 0.0;
  for (int j = 0; j < p.n; ++j) {
    pts.push_back({p.scale * u(rng), p.scale * u(rng)});
    dvol.push_back(1.0 + 2.0 * u(rng));
    svol.push_back(1.0 + 2.0 * u(rng));
    dd.push_back(draw_dist(rng, p.family, true));
    sd.push_back(draw_dist(rng, p.family, false));
    top = std::max(top, make_dist(dd.back()).hi());
  }
  inst.p_max = std::ceil(top);
  for (int j = 0; j < p.n; ++j) {
    Node node;
    node.name = "n" + std::to_string(j);
    node.coordinates = pts[j];
    for (int tries = 0;; ++tries) {
      if (tries > 1000) throw InvariantError("could not draw a regular demand curve");
      node.demand = Curve::from_distribution(CurveRole::kDemand, dvol[j], make_dist(dd[j]),
                                             p.grid_size, inst.p_max);
      if (check_regularity(node.demand).regular) break;
      do {
        dd[j] = draw_dist(rng, p.family, true);
      } while (make_dist(dd[j]).hi() > inst.p_max);
    }
    for (int tries = 0;; ++tries) {
      if (tries > 1000) throw InvariantError("could not draw a regular supply curve");
      node.supply = Curve::from_distribution(CurveRole::kSupply, svol[j], make_dist(sd[j]),
                                             p.grid_size, inst.p_max);
      if (check_regularity(node.supply).regular) break;
      sd[j] = draw_dist(rng, p.family, false);
    }
    inst.nodes.push_back(std::move(node));
    inst.candidates.push_back(j);
  }
  inst.distances = euclidean_distances(pts);
  inst.metadata = {{"seed", static_cast<double>(p.seed)}};
  inst.validate(true);
  return inst;
}

EnvyInstance gen_random_envy(const RandomEnvyParams& p) {
  if (p.n < 1 || p.max_subtypes < 1 || p.grid < 2) {
    throw InputError("random envy instance needs n, subtypes >= 1 and grid >= 2");
  }
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  EnvyInstance inst;
  Instance& base = inst.base;
  base.p_max = 3.0;
  base.flow_lower_bound = p.L;
  base.radius = p.R;
  base.grid_size = 5;
  std::vector<std::vector<double>> pts;
  for (int j = 0; j < p.n; ++j) {
    pts.push_back({p.scale * u(rng), p.scale * u(rng)});
    Node node;
    node.name = "n" + std::to_string(j);
    node.coordinates = pts.back();
    base.nodes.push_back(std::move(node));
    base.candidates.push_back(j);
  }
  base.distances = euclidean_distances(pts);
  for (int t = 0; t < p.grid; ++t) {
    inst.prices.push_back(base.p_max * (t + 1) / p.grid);
    inst.wages.push_back(base.p_max * t / p.grid);
  }
  for (int j = 0; j < p.n; ++j) {
    EnvyNode node;
    const int m = 1 + static_cast<int>(u(rng) * p.max_subtypes) % p.max_subtypes;
    for (int k = 0; k < m; ++k) {
      Subtype s;
      s.weight = 0.5 + 1.5 * u(rng);
      const double a = 1.0 * u(rng);
      const double b = std::min(base.p_max, a + 0.8 + 1.2 * u(rng));
      s.demand = make_uniform_demand_curve(0.5 + u(rng), a, b, base.grid_size, base.p_max);
      const double c = 0.8 * u(rng);
      s.supply = make_uniform_supply_curve(0.5 + u(rng), c, c + 0.6 + 1.2 * u(rng),
                                           base.grid_size, base.p_max);
      node.subtypes.push_back(std::move(s));
    }
    for (int a = 0; a < m; ++a) {
      for (int b = a + 1; b < m; ++b) {
        if (u(rng) < 0.5) node.edges.emplace_back(a, b);
      }
    }
    inst.nodes.push_back(std::move(node));
  }
  inst.base.metadata = {{"seed", static_cast<double>(p.seed)}};
  inst.validate();
  return inst;
}

}  // namespace tsfl
