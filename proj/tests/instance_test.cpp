#include "doctest.h"
#include "tsfl/errors.hpp"
#include "tsfl/instance.hpp"

using namespace tsfl;

namespace {

Instance line(int n, double spacing) {
  Instance inst;
  inst.p_max = 3.0;
  inst.flow_lower_bound = 1.0;
  inst.radius = spacing;
  std::vector<std::vector<double>> pts;
  for (int j = 0; j < n; ++j) {
    inst.nodes.push_back({"n" + std::to_string(j),
                          make_uniform_demand_curve(2.0, 1.0, 3.0, 5, 3.0),
                          make_uniform_supply_curve(2.0, 0.0, 1.0, 5, 3.0),
                          {j * spacing, 0.0}});
    pts.push_back(inst.nodes.back().coordinates);
    inst.candidates.push_back(j);
  }
  inst.distances = euclidean_distances(pts);
  return inst;
}

}  // namespace

TEST_CASE("valid instance passes") {
  const Instance inst = line(4, 1.0);
  CHECK_NOTHROW(inst.validate());
  CHECK(inst.distance(0, 3) == doctest::Approx(3.0));
  CHECK(inst.max_surplus() == doctest::Approx(4 * 2.0 * 3.0));
  CHECK(inst.is_candidate(2));
}

TEST_CASE("metric violations are rejected") {
  Instance inst = line(3, 1.0);
  SUBCASE("asymmetric") {
    inst.distances[1] = 1.5;
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("triangle") {
    inst.distances[2] = inst.distances[6] = 5.0;
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("negative") {
    inst.distances[1] = inst.distances[3] = -1.0;
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("nonzero diagonal") {
    inst.distances[4] = 0.1;
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("bad candidate") {
    inst.candidates = {0, 7};
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
  SUBCASE("negative radius") {
    inst.radius = -1.0;
    CHECK_THROWS_AS(inst.validate(), InputError);
  }
}

TEST_CASE("unreachable components are allowed") {
  Instance inst = line(2, 1.0);
  inst.distances = {0.0, kUnreachable, kUnreachable, 0.0};
  CHECK_NOTHROW(inst.validate());
  CHECK(ball(inst, 0, 1e9) == std::vector<NodeId>{0});
}

TEST_CASE("balls are inclusive") {
  const Instance inst = line(5, 1.0);
  CHECK(ball(inst, 2, 1.0) == std::vector<NodeId>{1, 2, 3});
  Instance some = inst;
  some.candidates = {0, 4};
  CHECK(candidate_ball(some, 3, 1.0) == std::vector<NodeId>{4});
}

TEST_CASE("regularity is enforced on request") {
  Instance inst = line(2, 1.0);
  inst.nodes[0].demand = Curve::from_points(
      CurveRole::kDemand, 1.0, {{0, 3, 0}, {0.25, 1, 0.3}, {0.5, 0.6, 0.5}, {1.0, 0.6, 0.8}}, 3.0);
  CHECK_THROWS_AS(inst.validate(true), InputError);
  CHECK_NOTHROW(inst.validate(false));
}
