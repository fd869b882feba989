#include "tsfl/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "tsfl/errors.hpp"

namespace tsfl {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw InputError((path.empty() ? std::string("/") : path) + ": " + what);
}

Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    size_t line = 1, col = 1;
    const size_t end = std::min<size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError("syntax error at line " + std::to_string(line) + ", column " +
                     std::to_string(col));
  }
}

const Json& require(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "missing required field");
  return *it;
}

double number(const Json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string() && v.get<std::string>() == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  fail(path, "expected a number");
}

double number_field(const Json& obj, const std::string& key, const std::string& path) {
  return number(require(obj, key, path), path + "/" + key);
}

int integer(const Json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<int>();
}

const Json& array(const Json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

std::vector<double> numbers(const Json& v, const std::string& path) {
  std::vector<double> out;
  array(v, path);
  for (size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], path + "/" + std::to_string(i)));
  return out;
}

Json encode(double x) {
  if (std::isinf(x) && x > 0) return "inf";
  return x;
}

template <class T>
Json encode(const std::vector<T>& xs) {
  Json out = Json::array();
  for (const auto& x : xs) out.push_back(encode(x));
  return out;
}

std::vector<std::vector<double>> matrix(const Json& v, const std::string& path) {
  std::vector<std::vector<double>> out;
  array(v, path);
  for (size_t i = 0; i < v.size(); ++i) out.push_back(numbers(v[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<std::vector<std::vector<double>>> cube(const Json& v, const std::string& path) {
  std::vector<std::vector<std::vector<double>>> out;
  array(v, path);
  for (size_t i = 0; i < v.size(); ++i) out.push_back(matrix(v[i], path + "/" + std::to_string(i)));
  return out;
}

const char* kind_name(Distribution::Kind k) {
  switch (k) {
    case Distribution::Kind::kUniform:
      return "uniform";
    case Distribution::Kind::kExponential:
      return "exponential";
    case Distribution::Kind::kNormal:
      return "normal";
  }
  return "uniform";
}

Curve parse_curve(CurveRole role, const Json& obj, const std::string& path, double p_max,
                  int grid_size) {
  if (!obj.is_object()) fail(path, "expected an object");
  const double volume = number_field(obj, "volume", path);
  try {
    if (obj.contains("points")) {
      std::vector<CurvePoint> pts;
      const Json& raw = array(obj["points"], path + "/points");
      for (size_t i = 0; i < raw.size(); ++i) {
        const std::string at = path + "/points/" + std::to_string(i);
        std::vector<double> p = numbers(raw[i], at);
        if (p.size() != 3) fail(at, "expected [level, marginal, cumulative]");
        pts.push_back({p[0], p[1], p[2]});
      }
      if (pts.empty()) fail(path + "/points", "needs at least one point");
      return Curve::from_points(role, volume, std::move(pts), p_max);
    }
    const Json& kind = require(obj, "distribution", path);
    if (!kind.is_string()) fail(path + "/distribution", "expected a string");
    const std::vector<double> params = numbers(require(obj, "params", path), path + "/params");
    int grid = grid_size;
    if (obj.contains("grid_size")) grid = integer(obj["grid_size"], path + "/grid_size");
    const std::string k = kind.get<std::string>();
    auto want = [&](size_t count) {
      if (params.size() != count) {
        fail(path + "/params", k + " takes " + std::to_string(count) + " parameters");
      }
    };
    if (k == "uniform") {
      want(2);
      if (role == CurveRole::kDemand) {
        return make_uniform_demand_curve(volume, params[0], params[1], grid, p_max);
      }
      return make_uniform_supply_curve(volume, params[0], params[1], grid, p_max);
    }
    if (k == "exponential") {
      want(1);
      return Curve::from_distribution(role, volume, Distribution::exponential(params[0]),
                                      grid, p_max);
    }
    if (k == "normal") {
      want(2);
      return Curve::from_distribution(role, volume,
                                      Distribution::normal(params[0], params[1]), grid,
                                      p_max);
    }
    fail(path + "/distribution", "unknown distribution '" + k + "'");
  } catch (const InputError& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    fail(path, msg);
  }
}

Json curve_json(const Curve& c, int grid_size) {
  Json out;
  out["volume"] = c.volume();
  if (const auto& d = c.distribution()) {
    out["distribution"] = kind_name(d->kind());
    Json params = Json::array();
    params.push_back(d->param1());
    if (d->kind() != Distribution::Kind::kExponential) params.push_back(d->param2());
    out["params"] = params;
    if (c.grid_size() != grid_size) out["grid_size"] = c.grid_size();
  } else {
    Json pts = Json::array();
    for (const CurvePoint& p : c.points()) pts.push_back({p.level, p.marginal, p.cumulative});
    out["points"] = pts;
  }
  return out;
}

bool curve_present(const Curve& c) { return !c.points().empty(); }

Instance parse_base(const Json& doc, bool curves_optional) {
  if (!doc.is_object()) fail("", "expected an object");
  const Json& format = require(doc, "format", "");
  if (!format.is_string() || format.get<std::string>() != kInstanceFormat) {
    fail("/format", std::string("expected \"") + kInstanceFormat + "\"");
  }
  Instance inst;
  inst.p_max = number_field(doc, "p_max", "");
  inst.flow_lower_bound = number_field(doc, "L", "");
  inst.radius = number_field(doc, "R", "");
  if (doc.contains("grid_size")) inst.grid_size = integer(doc["grid_size"], "/grid_size");

  const Json& nodes = array(require(doc, "nodes", ""), "/nodes");
  if (nodes.empty()) fail("/nodes", "needs at least one node");
  bool all_coords = true;
  for (size_t j = 0; j < nodes.size(); ++j) {
    const std::string at = "/nodes/" + std::to_string(j);
    const Json& nj = nodes[j];
    if (!nj.is_object()) fail(at, "expected an object");
    Node node;
    if (nj.contains("name")) {
      if (!nj["name"].is_string()) fail(at + "/name", "expected a string");
      node.name = nj["name"].get<std::string>();
    }
    if (!curves_optional || nj.contains("demand")) {
      node.demand = parse_curve(CurveRole::kDemand, require(nj, "demand", at), at + "/demand",
                                inst.p_max, inst.grid_size);
    }
    if (!curves_optional || nj.contains("supply")) {
      node.supply = parse_curve(CurveRole::kSupply, require(nj, "supply", at), at + "/supply",
                                inst.p_max, inst.grid_size);
    }
    if (nj.contains("coordinates")) {
      node.coordinates = numbers(nj["coordinates"], at + "/coordinates");
    } else {
      all_coords = false;
    }
    inst.nodes.push_back(std::move(node));
  }
  const size_t n = inst.nodes.size();
  if (doc.contains("distances")) {
    const auto rows = matrix(doc["distances"], "/distances");
    if (rows.size() != n) fail("/distances", "expected " + std::to_string(n) + " rows");
    for (size_t i = 0; i < n; ++i) {
      if (rows[i].size() != n) {
        fail("/distances/" + std::to_string(i), "expected " + std::to_string(n) + " entries");
      }
      inst.distances.insert(inst.distances.end(), rows[i].begin(), rows[i].end());
    }
  } else if (all_coords) {
    std::vector<std::vector<double>> pts;
    for (const Node& node : inst.nodes) pts.push_back(node.coordinates);
    const size_t dim = pts[0].size();
    for (size_t j = 0; j < n; ++j) {
      if (pts[j].size() != dim || dim == 0) {
        fail("/nodes/" + std::to_string(j) + "/coordinates", "dimension mismatch");
      }
    }
    inst.distances = euclidean_distances(pts);
  } else {
    fail("/distances", "missing required field (or coordinates on every node)");
  }

  if (doc.contains("candidates")) {
    const Json& c = array(doc["candidates"], "/candidates");
    for (size_t i = 0; i < c.size(); ++i) {
      const int v = integer(c[i], "/candidates/" + std::to_string(i));
      if (v < 0 || v >= static_cast<int>(n)) {
        fail("/candidates/" + std::to_string(i), "node id out of range");
      }
      inst.candidates.push_back(v);
    }
    std::sort(inst.candidates.begin(), inst.candidates.end());
    inst.candidates.erase(std::unique(inst.candidates.begin(), inst.candidates.end()),
                          inst.candidates.end());
  } else {
    for (size_t j = 0; j < n; ++j) inst.candidates.push_back(static_cast<NodeId>(j));
  }
  if (doc.contains("metadata")) {
    const Json& meta = doc["metadata"];
    if (!meta.is_object()) fail("/metadata", "expected an object");
    for (auto it = meta.begin(); it != meta.end(); ++it) {
      inst.metadata[it.key()] = number(it.value(), "/metadata/" + it.key());
    }
  }
  return inst;
}

Json base_json(const Instance& inst) {
  Json doc;
  doc["format"] = kInstanceFormat;
  doc["p_max"] = inst.p_max;
  doc["L"] = inst.flow_lower_bound;
  doc["R"] = encode(inst.radius);
  doc["grid_size"] = inst.grid_size;
  bool all_coords = true;
  std::vector<std::vector<double>> pts;
  Json nodes = Json::array();
  for (const Node& node : inst.nodes) {
    Json nj;
    nj["name"] = node.name;
    if (curve_present(node.demand)) nj["demand"] = curve_json(node.demand, inst.grid_size);
    if (curve_present(node.supply)) nj["supply"] = curve_json(node.supply, inst.grid_size);
    if (!node.coordinates.empty()) nj["coordinates"] = node.coordinates;
    all_coords = all_coords && !node.coordinates.empty();
    pts.push_back(node.coordinates);
    nodes.push_back(nj);
  }
  doc["nodes"] = nodes;
  if (!all_coords || euclidean_distances(pts) != inst.distances) {
    const size_t n = inst.nodes.size();
    Json rows = Json::array();
    for (size_t i = 0; i < n; ++i) {
      rows.push_back(encode(std::vector<double>(inst.distances.begin() + i * n,
                                                inst.distances.begin() + (i + 1) * n)));
    }
    doc["distances"] = rows;
  }
  doc["candidates"] = inst.candidates;
  if (!inst.metadata.empty()) {
    Json meta = Json::object();
    for (const auto& [k, v] : inst.metadata) meta[k] = encode(v);
    doc["metadata"] = meta;
  }
  return doc;
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

}  // namespace

Instance parse_instance(const std::string& text) {
  Instance inst = parse_base(parse_text(text), false);
  inst.validate(false);
  return inst;
}

std::string serialize_instance(const Instance& instance) {
  return dump(base_json(instance));
}

bool has_envy_block(const std::string& text) {
  const Json doc = parse_text(text);
  return doc.is_object() && doc.contains("envy");
}

EnvyInstance parse_envy_instance(const std::string& text) {
  const Json doc = parse_text(text);
  EnvyInstance inst;
  inst.base = parse_base(doc, true);
  const Json& envy = require(doc, "envy", "");
  inst.prices = numbers(require(envy, "prices", "/envy"), "/envy/prices");
  inst.wages = numbers(require(envy, "wages", "/envy"), "/envy/wages");
  const Json& nodes = array(require(envy, "nodes", "/envy"), "/envy/nodes");
  if (nodes.size() != inst.base.nodes.size()) {
    fail("/envy/nodes", "expected one entry per node");
  }
  for (size_t j = 0; j < nodes.size(); ++j) {
    const std::string at = "/envy/nodes/" + std::to_string(j);
    EnvyNode node;
    const Json& subs = array(require(nodes[j], "subtypes", at), at + "/subtypes");
    for (size_t k = 0; k < subs.size(); ++k) {
      const std::string sat = at + "/subtypes/" + std::to_string(k);
      Subtype s;
      s.weight = number_field(subs[k], "weight", sat);
      s.demand = parse_curve(CurveRole::kDemand, require(subs[k], "demand", sat),
                             sat + "/demand", inst.base.p_max, inst.base.grid_size);
      s.supply = parse_curve(CurveRole::kSupply, require(subs[k], "supply", sat),
                             sat + "/supply", inst.base.p_max, inst.base.grid_size);
      node.subtypes.push_back(std::move(s));
    }
    if (nodes[j].contains("edges")) {
      const Json& edges = array(nodes[j]["edges"], at + "/edges");
      for (size_t e = 0; e < edges.size(); ++e) {
        const std::string eat = at + "/edges/" + std::to_string(e);
        if (!edges[e].is_array() || edges[e].size() != 2) fail(eat, "expected [k, k2]");
        node.edges.emplace_back(integer(edges[e][0], eat + "/0"),
                                integer(edges[e][1], eat + "/1"));
      }
    }
    inst.nodes.push_back(std::move(node));
  }
  inst.validate();
  return inst;
}

std::string serialize_envy_instance(const EnvyInstance& instance) {
  Json doc = base_json(instance.base);
  Json envy;
  envy["prices"] = instance.prices;
  envy["wages"] = instance.wages;
  Json nodes = Json::array();
  for (const EnvyNode& node : instance.nodes) {
    Json nj;
    Json subs = Json::array();
    for (const Subtype& s : node.subtypes) {
      Json sj;
      sj["weight"] = s.weight;
      sj["demand"] = curve_json(s.demand, instance.base.grid_size);
      sj["supply"] = curve_json(s.supply, instance.base.grid_size);
      subs.push_back(sj);
    }
    nj["subtypes"] = subs;
    Json edges = Json::array();
    for (auto [a, b] : node.edges) edges.push_back({a, b});
    nj["edges"] = edges;
    nodes.push_back(nj);
  }
  envy["nodes"] = nodes;
  doc["envy"] = envy;
  return dump(doc);
}

std::string serialize_solution(const IntegralSolution& sol) {
  Json doc;
  doc["format"] = kSolutionFormat;
  doc["surplus"] = sol.surplus;
  doc["profit"] = sol.profit;
  doc["throughput"] = sol.throughput;
  doc["distance_factor"] = sol.distance_factor;
  Json facilities = Json::array();
  for (size_t f = 0; f < sol.facilities.size(); ++f) {
    const OpenFacility& of = sol.facilities[f];
    Json fj;
    fj["location"] = of.location;
    fj["demand_flow"] = of.demand_flow;
    fj["supply_flow"] = of.supply_flow;
    fj["surplus"] = of.surplus;
    fj["profit"] = of.profit;
    fj["demand_routing"] = sol.demand_routing[f];
    fj["supply_routing"] = sol.supply_routing[f];
    facilities.push_back(fj);
  }
  doc["facilities"] = facilities;
  doc["price"] = sol.price;
  doc["wage"] = sol.wage;
  doc["demand_level"] = sol.demand_level;
  doc["supply_level"] = sol.supply_level;
  return dump(doc);
}

IntegralSolution parse_solution(const std::string& text) {
  const Json doc = parse_text(text);
  const Json& format = require(doc, "format", "");
  if (!format.is_string() || format.get<std::string>() != kSolutionFormat) {
    fail("/format", std::string("expected \"") + kSolutionFormat + "\"");
  }
  IntegralSolution sol;
  sol.surplus = number_field(doc, "surplus", "");
  sol.profit = number_field(doc, "profit", "");
  sol.throughput = number_field(doc, "throughput", "");
  sol.distance_factor = number_field(doc, "distance_factor", "");
  sol.price = numbers(require(doc, "price", ""), "/price");
  sol.wage = numbers(require(doc, "wage", ""), "/wage");
  sol.demand_level = numbers(require(doc, "demand_level", ""), "/demand_level");
  sol.supply_level = numbers(require(doc, "supply_level", ""), "/supply_level");
  const size_t n = sol.price.size();
  if (sol.wage.size() != n || sol.demand_level.size() != n || sol.supply_level.size() != n) {
    fail("", "price, wage and level arrays must have one entry per node");
  }
  const Json& facilities = array(require(doc, "facilities", ""), "/facilities");
  for (size_t f = 0; f < facilities.size(); ++f) {
    const std::string at = "/facilities/" + std::to_string(f);
    const Json& fj = facilities[f];
    OpenFacility of;
    of.location = integer(require(fj, "location", at), at + "/location");
    of.demand_flow = number_field(fj, "demand_flow", at);
    of.supply_flow = number_field(fj, "supply_flow", at);
    of.surplus = number_field(fj, "surplus", at);
    of.profit = number_field(fj, "profit", at);
    sol.facilities.push_back(of);
    sol.demand_routing.push_back(
        numbers(require(fj, "demand_routing", at), at + "/demand_routing"));
    sol.supply_routing.push_back(
        numbers(require(fj, "supply_routing", at), at + "/supply_routing"));
    if (sol.demand_routing.back().size() != n || sol.supply_routing.back().size() != n) {
      fail(at, "routing arrays must have one entry per node");
    }
  }
  return sol;
}

namespace {

Json cdf_json(const std::vector<double>& grid, const std::vector<double>& lottery,
              double route) {
  Json out = Json::array();
  double cum = 0.0;
  for (size_t t = 0; t < grid.size(); ++t) {
    if (lottery[t] <= 0.0) continue;
    cum += lottery[t] / route;
    out.push_back({grid[t], cum});
  }
  return out;
}

}  // namespace

std::string serialize_policy(const EnvyInstance& instance, const LotteryPolicy& policy) {
  Json doc;
  doc["format"] = kPolicyFormat;
  doc["profit"] = policy.profit;
  doc["prices"] = instance.prices;
  doc["wages"] = instance.wages;
  Json facilities = Json::array();
  for (size_t f = 0; f < policy.facilities.size(); ++f) {
    Json fj;
    fj["location"] = policy.facilities[f];
    fj["demand_route"] = policy.demand_route[f];
    fj["supply_route"] = policy.supply_route[f];
    fj["demand_lottery"] = encode(policy.demand_lottery[f]);
    fj["supply_lottery"] = encode(policy.supply_lottery[f]);
    Json cdfs = Json::array();
    for (size_t j = 0; j < policy.demand_route[f].size(); ++j) {
      const double xd = policy.demand_route[f][j];
      const double xs = policy.supply_route[f][j];
      if (xd <= 0.0 && xs <= 0.0) continue;
      Json nj;
      nj["node"] = j;
      Json subs = Json::array();
      for (size_t k = 0; k < policy.demand_lottery[f][j].size(); ++k) {
        Json sj;
        sj["demand_cdf"] =
            xd > 0.0 ? cdf_json(instance.prices, policy.demand_lottery[f][j][k], xd) : Json::array();
        sj["supply_cdf"] =
            xs > 0.0 ? cdf_json(instance.wages, policy.supply_lottery[f][j][k], xs) : Json::array();
        subs.push_back(sj);
      }
      nj["subtypes"] = subs;
      cdfs.push_back(nj);
    }
    fj["cdf"] = cdfs;
    facilities.push_back(fj);
  }
  doc["facilities"] = facilities;
  return dump(doc);
}

LotteryPolicy parse_policy(const std::string& text) {
  const Json doc = parse_text(text);
  const Json& format = require(doc, "format", "");
  if (!format.is_string() || format.get<std::string>() != kPolicyFormat) {
    fail("/format", std::string("expected \"") + kPolicyFormat + "\"");
  }
  LotteryPolicy policy;
  policy.profit = number_field(doc, "profit", "");
  const Json& facilities = array(require(doc, "facilities", ""), "/facilities");
  for (size_t f = 0; f < facilities.size(); ++f) {
    const std::string at = "/facilities/" + std::to_string(f);
    const Json& fj = facilities[f];
    policy.facilities.push_back(integer(require(fj, "location", at), at + "/location"));
    policy.demand_route.push_back(numbers(require(fj, "demand_route", at), at + "/demand_route"));
    policy.supply_route.push_back(numbers(require(fj, "supply_route", at), at + "/supply_route"));
    policy.demand_lottery.push_back(
        cube(require(fj, "demand_lottery", at), at + "/demand_lottery"));
    policy.supply_lottery.push_back(
        cube(require(fj, "supply_lottery", at), at + "/supply_lottery"));
  }
  return policy;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

}  // namespace tsfl
