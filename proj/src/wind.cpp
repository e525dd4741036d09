#include "zermelo/wind.hpp"

#include <cmath>
#include <limits>

namespace zermelo {

namespace {

constexpr double kBoundTolerance = 1e-12;
constexpr double kExpansionStart = 0.125;
constexpr double kExpansionLimit = 1e8;

double river_profile(const WindField &field, double y) { return field.eval({0.0, y}).x; }

// Bisection on |f| - 1 inside [inside, outside]; returns the last point with |f| < 1.
double bisect_bound(const WindField &field, double inside, double outside) {
  while (std::abs(outside - inside) > kBoundTolerance) {
    const double mid = 0.5 * (inside + outside);
    if (std::abs(river_profile(field, mid)) < 1.0)
      inside = mid;
    else
      outside = mid;
  }
  return inside;
}

double expand_to_bound(const WindField &field, double axis, double direction) {
  double prev = axis;
  for (double step = kExpansionStart; step <= kExpansionLimit; step *= 2.0) {
    const double probe = axis + direction * step;
    if (std::abs(river_profile(field, probe)) >= 1.0) return bisect_bound(field, prev, probe);
    prev = probe;
  }
  return direction * std::numeric_limits<double>::infinity();
}

}  // namespace

const char *to_string(WindKind kind) {
  switch (kind) {
    case WindKind::shear: return "shear";
    case WindKind::quartic: return "quartic";
    case WindKind::gaussian: return "gaussian";
    case WindKind::constant: return "constant";
    case WindKind::zero: return "zero";
    case WindKind::custom: return "custom";
  }
  return "?";
}

WindKind wind_kind_from_string(const std::string &name) {
  for (WindKind k : {WindKind::shear, WindKind::quartic, WindKind::gaussian, WindKind::constant,
                     WindKind::zero})
    if (name == to_string(k)) return k;
  throw BadParams("unknown wind kind '" + name + "'");
}

double ConvexityDomain::margin(const Point &p) const {
  return std::min(p.y - y_min, y_max - p.y);
}

WindField WindField::zero() { return {}; }

WindField WindField::shear(double scale) {
  WindField w;
  w.kind_ = WindKind::shear;
  w.params_.scale = scale;
  return w;
}

WindField WindField::quartic(double a, double b, double scale) {
  WindField w;
  w.kind_ = WindKind::quartic;
  w.params_.a = a;
  w.params_.b = b;
  w.params_.scale = scale;
  return w;
}

WindField WindField::gaussian(double a, double b, double c, double scale) {
  if (c == 0.0) throw BadParams("gaussian wind needs c != 0");
  WindField w;
  w.kind_ = WindKind::gaussian;
  w.params_.a = a;
  w.params_.b = b;
  w.params_.c = c;
  w.params_.scale = scale;
  return w;
}

WindField WindField::constant(double p, double q) {
  WindField w;
  w.kind_ = WindKind::constant;
  w.params_.p = p;
  w.params_.q = q;
  return w;
}

WindField WindField::custom(CustomWind wind) {
  if (!wind.value || !wind.jacobian) throw BadParams("custom wind needs value and jacobian");
  WindField w;
  w.kind_ = WindKind::custom;
  w.custom_ = std::make_shared<const CustomWind>(std::move(wind));
  return w;
}

WindField WindField::scaled(double k) const {
  WindField w = *this;
  switch (kind_) {
    case WindKind::constant:
      w.params_.p *= k;
      w.params_.q *= k;
      break;
    case WindKind::custom: {
      CustomWind c = *custom_;
      auto value = c.value;
      auto jac = c.jacobian;
      c.value = [value, k](const Point &p) { return k * value(p); };
      c.jacobian = [jac, k](const Point &p) {
        Mat2 m = jac(p);
        for (auto &row : m.m)
          for (double &e : row) e *= k;
        return m;
      };
      w.custom_ = std::make_shared<const CustomWind>(std::move(c));
      break;
    }
    default:
      w.params_.scale *= k;
  }
  return w;
}

Vec2 WindField::eval(const Point &pos) const {
  if (kind_ == WindKind::custom) return custom_->value(pos);
  Vec2 w;
  Mat2 j;
  eval_with_jacobian(pos.x, pos.y, w, j);
  return w;
}

Mat2 WindField::jacobian(const Point &pos) const {
  if (kind_ == WindKind::custom) return custom_->jacobian(pos);
  Vec2 w;
  Mat2 j;
  eval_with_jacobian(pos.x, pos.y, w, j);
  return j;
}

Vec2 eval_wind(const WindField &field, const Point &pos) { return field.eval(pos); }

ConvexityDomain convexity_bound(const WindField &field) {
  switch (field.kind()) {
    case WindKind::zero:
      return {};
    case WindKind::constant: {
      const auto &p = field.params();
      if (p.p * p.p + p.q * p.q >= 1.0)
        throw NotWeakEverywhere("constant wind with |W| >= 1 is nowhere weak");
      return {};
    }
    case WindKind::custom:
      return field.custom_wind()->domain;
    default:
      break;
  }
  const double axis = field.axis();
  if (std::abs(river_profile(field, axis)) >= 1.0)
    throw NotWeakEverywhere(std::string(to_string(field.kind())) +
                            " wind has |f| >= 1 at its axis; no weak neighbourhood");
  ConvexityDomain d;
  d.y_min = expand_to_bound(field, axis, -1.0);
  d.y_max = expand_to_bound(field, axis, +1.0);
  return d;
}

}  // namespace zermelo
