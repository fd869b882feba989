#include "tsfl/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/distributions/normal.hpp>

#include "tsfl/errors.hpp"

namespace tsfl {
namespace {

const boost::math::normal_distribution<double> kStdNormal(0.0, 1.0);

double std_cdf(double z) { return boost::math::cdf(kStdNormal, z); }
double std_pdf(double z) { return boost::math::pdf(kStdNormal, z); }
double std_quantile(double p) { return boost::math::quantile(kStdNormal, p); }

const char* role_name(CurveRole role) {
  return role == CurveRole::kDemand ? "demand" : "supply";
}

[[noreturn]] void fail(CurveRole role, int index, const std::string& what) {
  std::ostringstream out;
  out << role_name(role) << " curve point " << index << ": " << what;
  throw InputError(out.str());
}

}  // namespace

Distribution::Distribution(Kind kind, double p1, double p2)
    : kind_(kind), p1_(p1), p2_(p2) {}

Distribution Distribution::uniform(double a, double b) {
  if (!(a < b)) throw InputError("uniform distribution needs a < b");
  if (a < 0) throw InputError("uniform distribution needs a >= 0");
  Distribution d(Kind::kUniform, a, b);
  d.lo_ = a;
  d.hi_ = b;
  return d;
}

Distribution Distribution::exponential(double rate) {
  if (!(rate > 0) || !std::isfinite(rate)) {
    throw InputError("exponential distribution needs a positive rate");
  }
  Distribution d(Kind::kExponential, rate, 0.0);
  d.lo_ = 0.0;
  d.hi_ = -std::log(kTailMass) / rate;
  d.mass_ = 1.0 - kTailMass;
  return d;
}

Distribution Distribution::normal(double mean, double stddev) {
  if (!(stddev > 0) || !std::isfinite(mean) || !std::isfinite(stddev)) {
    throw InputError("normal distribution needs finite mean and positive sd");
  }
  Distribution d(Kind::kNormal, mean, stddev);
  const double z = std_quantile(1.0 - kTailMass);
  d.hi_ = mean + z * stddev;
  d.lo_ = std::max(0.0, mean - z * stddev);
  if (!(d.hi_ > d.lo_)) {
    throw InputError("normal distribution has no mass above zero");
  }
  d.base_cdf_lo_ = std_cdf((d.lo_ - mean) / stddev);
  d.mass_ = std_cdf((d.hi_ - mean) / stddev) - d.base_cdf_lo_;
  return d;
}

double Distribution::cdf(double x) const {
  if (x <= lo_) return 0.0;
  if (x >= hi_) return 1.0;
  switch (kind_) {
    case Kind::kUniform:
      return (x - lo_) / (hi_ - lo_);
    case Kind::kExponential:
      return -std::expm1(-p1_ * x) / mass_;
    case Kind::kNormal:
      return (std_cdf((x - p1_) / p2_) - base_cdf_lo_) / mass_;
  }
  return 0.0;
}

double Distribution::quantile(double u) const {
  u = std::clamp(u, 0.0, 1.0);
  if (u == 0.0) return lo_;
  if (u == 1.0) return hi_;
  double x = 0.0;
  switch (kind_) {
    case Kind::kUniform:
      x = lo_ + u * (hi_ - lo_);
      break;
    case Kind::kExponential:
      x = -std::log1p(-u * mass_) / p1_;
      break;
    case Kind::kNormal:
      x = p1_ + p2_ * std_quantile(base_cdf_lo_ + u * mass_);
      break;
  }
  return std::clamp(x, lo_, hi_);
}

double Distribution::partial_expectation(double x0, double x1) const {
  x0 = std::clamp(x0, lo_, hi_);
  x1 = std::clamp(x1, lo_, hi_);
  if (x1 <= x0) return 0.0;
  switch (kind_) {
    case Kind::kUniform:
      return (x1 - x0) * (x1 + x0) / (2.0 * (hi_ - lo_));
    case Kind::kExponential: {
      const double r = p1_;
      return ((x0 + 1.0 / r) * std::exp(-r * x0) -
              (x1 + 1.0 / r) * std::exp(-r * x1)) /
             mass_;
    }
    case Kind::kNormal: {
      const double a = (x0 - p1_) / p2_;
      const double b = (x1 - p1_) / p2_;
      return (p1_ * (std_cdf(b) - std_cdf(a)) + p2_ * (std_pdf(a) - std_pdf(b))) /
             mass_;
    }
  }
  return 0.0;
}

std::vector<double> uniform_levels(int grid_size) {
  if (grid_size < 2) throw InputError("grid size must be at least 2");
  std::vector<double> levels(grid_size);
  for (int k = 0; k < grid_size; ++k) {
    levels[k] = static_cast<double>(k) / (grid_size - 1);
  }
  levels.back() = 1.0;
  return levels;
}

Curve Curve::from_points(CurveRole role, double volume,
                         std::vector<CurvePoint> points, double p_max) {
  Curve c;
  c.role_ = role;
  c.volume_ = volume;
  c.p_max_ = p_max;
  c.points_ = std::move(points);
  c.validate();
  return c;
}

Curve Curve::from_distribution(CurveRole role, double volume,
                               const Distribution& dist, int grid_size,
                               double p_max) {
  if (role == CurveRole::kDemand && dist.hi() > p_max) {
    throw InputError("demand distribution support exceeds p_max");
  }
  Curve c;
  c.role_ = role;
  c.volume_ = volume;
  c.p_max_ = p_max;
  c.dist_ = dist;
  for (double level : uniform_levels(grid_size)) {
    c.points_.push_back(c.at_level(level));
  }
  c.validate();
  return c;
}

CurvePoint Curve::at_level(double level) const {
  level = std::clamp(level, 0.0, 1.0);
  if (dist_) {
    const Distribution& d = *dist_;
    if (role_ == CurveRole::kDemand) {
      if (level == 0.0) return {0.0, p_max_, 0.0};
      const double m = d.quantile(1.0 - level);
      return {level, m, volume_ * d.partial_expectation(m, d.hi())};
    }
    if (level == 0.0) return {0.0, 0.0, 0.0};
    const double m = d.quantile(level);
    return {level, m, volume_ * d.partial_expectation(d.lo(), m)};
  }
  auto it = std::lower_bound(
      points_.begin(), points_.end(), level,
      [](const CurvePoint& p, double l) { return p.level < l; });
  if (it == points_.end()) return points_.back();
  if (it->level == level || it == points_.begin()) return *it;
  const CurvePoint& a = *(it - 1);
  const CurvePoint& b = *it;
  const double t = (level - a.level) / (b.level - a.level);
  return {level, a.marginal + t * (b.marginal - a.marginal),
          a.cumulative + t * (b.cumulative - a.cumulative)};
}

std::pair<double, double> Curve::levels_at_price(double price) const {
  const bool demand = role_ == CurveRole::kDemand;
  if (dist_) {
    const Distribution& d = *dist_;
    if (demand) {
      if (price >= p_max_) return {0.0, 0.0};
      const double q = 1.0 - d.cdf(price);
      return {q, q};
    }
    if (price <= 0.0) return {0.0, 0.0};
    const double r = d.cdf(price);
    return {r, r};
  }
  // Sign-flip so the marginal is nonincreasing along the grid in both roles.
  const double sign = demand ? 1.0 : -1.0;
  const double p = sign * price;
  const double eps = 1e-12 * std::max(1.0, std::abs(price));
  double lo = 2.0;
  double hi = -1.0;
  auto take = [&](double q) {
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  };
  for (size_t k = 0; k + 1 < points_.size(); ++k) {
    const double m0 = sign * points_[k].marginal;
    const double m1 = sign * points_[k + 1].marginal;
    if (p > m0 + eps || p < m1 - eps) continue;
    if (m0 - m1 <= eps) {
      take(points_[k].level);
      take(points_[k + 1].level);
    } else {
      const double t = std::clamp((m0 - p) / (m0 - m1), 0.0, 1.0);
      take(points_[k].level + t * (points_[k + 1].level - points_[k].level));
    }
  }
  if (hi < 0.0) {
    const double first = sign * points_.front().marginal;
    const double q = p > first ? 0.0 : points_.back().level;
    return {q, q};
  }
  return {lo, hi};
}

void Curve::validate() const {
  const bool demand = role_ == CurveRole::kDemand;
  if (!(volume_ >= 0) || !std::isfinite(volume_)) {
    throw InputError(std::string(role_name(role_)) +
                     " volume must be finite and nonnegative");
  }
  if (points_.size() < 2) fail(role_, 0, "need at least two grid points");
  const CurvePoint& first = points_.front();
  const double base_marginal = demand ? p_max_ : 0.0;
  if (first.level != 0.0) fail(role_, 0, "first level must be 0");
  if (std::abs(first.marginal - base_marginal) > 1e-9 * std::max(1.0, p_max_)) {
    fail(role_, 0, demand ? "level-0 marginal must equal p_max"
                          : "level-0 marginal must be 0");
  }
  if (first.cumulative != 0.0) fail(role_, 0, "level-0 cumulative must be 0");
  double scale = 1.0;
  for (const CurvePoint& p : points_) {
    scale = std::max({scale, std::abs(p.marginal), std::abs(p.cumulative)});
  }
  const double tol = 1e-9 * scale;
  double prev_slope = 0.0;
  for (size_t k = 1; k < points_.size(); ++k) {
    const CurvePoint& a = points_[k - 1];
    const CurvePoint& b = points_[k];
    const int idx = static_cast<int>(k);
    if (!std::isfinite(b.level) || !std::isfinite(b.marginal) ||
        !std::isfinite(b.cumulative)) {
      fail(role_, idx, "non-finite value");
    }
    if (!(b.level > a.level) || b.level > 1.0) {
      fail(role_, idx, "levels must increase strictly within [0, 1]");
    }
    if (b.marginal < 0) fail(role_, idx, "negative marginal");
    if (demand ? b.marginal > a.marginal + tol : b.marginal < a.marginal - tol) {
      fail(role_, idx, demand ? "marginal must be nonincreasing"
                              : "marginal must be nondecreasing");
    }
    if (b.cumulative < a.cumulative - tol) {
      fail(role_, idx, "cumulative must be nondecreasing");
    }
    const double slope = (b.cumulative - a.cumulative) / (b.level - a.level);
    if (k >= 2 && (demand ? slope > prev_slope + tol : slope < prev_slope - tol)) {
      fail(role_, idx, demand ? "cumulative must be concave"
                              : "cumulative must be convex");
    }
    prev_slope = slope;
    const double revenue = volume_ * b.level * b.marginal;
    if (demand ? b.cumulative < revenue - tol : b.cumulative > revenue + tol) {
      fail(role_, idx, demand ? "total value below revenue"
                              : "total cost above wage bill");
    }
  }
}

Curve make_uniform_demand_curve(double volume, double a, double b,
                                int grid_size, double p_max) {
  if (!(a < b)) throw InputError("uniform demand curve needs a < b");
  if (grid_size < 2) throw InputError("grid size must be at least 2");
  if (b > p_max) throw InputError("uniform demand curve needs b <= p_max");
  return Curve::from_distribution(CurveRole::kDemand, volume,
                                  Distribution::uniform(a, b), grid_size, p_max);
}

Curve make_uniform_supply_curve(double volume, double a, double b,
                                int grid_size, double p_max) {
  if (!(a < b)) throw InputError("uniform supply curve needs a < b");
  if (grid_size < 2) throw InputError("grid size must be at least 2");
  return Curve::from_distribution(CurveRole::kSupply, volume,
                                  Distribution::uniform(a, b), grid_size, p_max);
}

RegularityResult check_regularity(CurveRole role,
                                  const std::vector<CurvePoint>& points,
                                  double tol) {
  RegularityResult result;
  const bool demand = role == CurveRole::kDemand;
  double prev = 0.0;
  for (size_t k = 0; k + 1 < points.size(); ++k) {
    const CurvePoint& a = points[k];
    const CurvePoint& b = points[k + 1];
    const double slope = (b.level * b.marginal - a.level * a.marginal) /
                         (b.level - a.level);
    if (k > 0) {
      const double slack = tol * std::max({1.0, std::abs(prev), std::abs(slope)});
      if (demand ? slope > prev + slack : slope < prev - slack) {
        result.regular = false;
        result.first_violation = static_cast<int>(k + 1);
        return result;
      }
    }
    prev = slope;
  }
  return result;
}

RegularityResult check_regularity(const Curve& curve, double tol) {
  return check_regularity(curve.role(), curve.points(), tol);
}

}  // namespace tsfl
