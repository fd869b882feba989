#pragma once

#include <optional>
#include <utility>
#include <vector>

namespace tsfl {

enum class CurveRole { kDemand, kSupply };

// One grid point. For demand, `marginal` is F^{-1}(level), the price at which
// `level` of the buyers participate, and `cumulative` is the total value V of
// the participating buyers (volume included). For supply, `marginal` is the
// wage H^{-1}(level) and `cumulative` the total cost C.
struct CurvePoint {
  double level = 0.0;
  double marginal = 0.0;
  double cumulative = 0.0;
};

// A valuation (demand) or cost (supply) distribution truncated to a finite
// support [lo, hi].
class Distribution {
 public:
  enum class Kind { kUniform, kExponential, kNormal };

  static Distribution uniform(double a, double b);
  // Truncated at the 1 - kTailMass quantile.
  static Distribution exponential(double rate);
  // Truncated at both kTailMass tails, lower end clipped at 0.
  static Distribution normal(double mean, double stddev);

  Kind kind() const { return kind_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

  double cdf(double x) const;
  double quantile(double u) const;
  // Integral of v * density(v) over [x0, x1] (clamped to the support).
  double partial_expectation(double x0, double x1) const;

  static constexpr double kTailMass = 1e-6;

 private:
  Distribution(Kind kind, double p1, double p2);

  Kind kind_;
  double p1_;
  double p2_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  double base_cdf_lo_ = 0.0;
  double mass_ = 1.0;
};

class Curve {
 public:
  static constexpr int kDefaultGridSize = 17;

  Curve() = default;

  // Explicit grid. Points must start at level 0; validate() checks the rest.
  static Curve from_points(CurveRole role, double volume,
                           std::vector<CurvePoint> points, double p_max);
  static Curve from_distribution(CurveRole role, double volume,
                                 const Distribution& dist, int grid_size,
                                 double p_max);

  CurveRole role() const { return role_; }
  double volume() const { return volume_; }
  double p_max() const { return p_max_; }
  const std::vector<CurvePoint>& points() const { return points_; }
  const std::optional<Distribution>& distribution() const { return dist_; }
  int grid_size() const { return static_cast<int>(points_.size()); }

  // Exact for distribution-backed curves; linear interpolation of marginal
  // and cumulative between grid points otherwise.
  CurvePoint at_level(double level) const;

  // Range of participation levels consistent with posting `price` (a wage on
  // the supply side). The range is a single point unless the marginal is flat.
  std::pair<double, double> levels_at_price(double price) const;

  // Throws InputError describing the first violated invariant.
  void validate() const;

 private:
  CurveRole role_ = CurveRole::kDemand;
  double volume_ = 0.0;
  double p_max_ = 0.0;
  std::vector<CurvePoint> points_;
  std::optional<Distribution> dist_;
};

Curve make_uniform_demand_curve(double volume, double a, double b,
                                int grid_size, double p_max);
Curve make_uniform_supply_curve(double volume, double a, double b,
                                int grid_size, double p_max);

struct RegularityResult {
  bool regular = true;
  int first_violation = -1;  // index of the point where the slope test fails
};

// Discrete check that level * marginal is concave (demand) or convex (supply).
// Works on raw points, without full validation.
RegularityResult check_regularity(CurveRole role,
                                  const std::vector<CurvePoint>& points,
                                  double tol = 1e-9);
RegularityResult check_regularity(const Curve& curve, double tol = 1e-9);

std::vector<double> uniform_levels(int grid_size);

}  // namespace tsfl
