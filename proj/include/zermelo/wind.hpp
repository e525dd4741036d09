#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <string>

#include "zermelo/errors.hpp"
#include "zermelo/vec2.hpp"

namespace zermelo {

enum class WindKind { shear, quartic, gaussian, constant, zero, custom };

const char *to_string(WindKind kind);
WindKind wind_kind_from_string(const std::string &name);

/// Open y-interval (x unbounded) on which |W| < 1.
struct ConvexityDomain {
  double y_min = -std::numeric_limits<double>::infinity();
  double y_max = std::numeric_limits<double>::infinity();
  bool strict = true;

  bool bounded() const { return std::isfinite(y_min) || std::isfinite(y_max); }
  bool contains(const Point &p) const { return p.y > y_min && p.y < y_max; }
  // Signed distance to the nearest bound, positive inside.
  double margin(const Point &p) const;
};

/// Plug-in wind: value and exact jacobian supplied by the caller.
struct CustomWind {
  std::function<Vec2(const Point &)> value;
  std::function<Mat2(const Point &)> jacobian;
  ConvexityDomain domain;
  std::string name = "custom";
};

/// Stationary planar perturbation W(x, y).
///
/// River-type kinds (shear, quartic, gaussian) have W = (f(y), 0). Every
/// catalogue kind also accepts an overall multiplier `scale`, which is how
/// wind-strength sweeps are expressed (shear with scale k is W = (k y, 0)).
class WindField {
 public:
  struct Params {
    double a = 0.0, b = 0.0, c = 1.0;  // quartic: a, b; gaussian: a, b, c
    double p = 0.0, q = 0.0;           // constant
    double scale = 1.0;
  };

  WindField() = default;

  static WindField zero();
  static WindField shear(double scale = 1.0);
  static WindField quartic(double a, double b, double scale = 1.0);
  static WindField gaussian(double a, double b, double c, double scale = 1.0);
  static WindField constant(double p, double q);
  static WindField custom(CustomWind wind);

  WindKind kind() const { return kind_; }
  const Params &params() const { return params_; }
  const CustomWind *custom_wind() const { return custom_.get(); }

  bool is_river() const {
    return kind_ == WindKind::shear || kind_ == WindKind::quartic || kind_ == WindKind::gaussian;
  }
  // Catalogue kinds can be evaluated on jets, so every derivative is exact.
  bool analytic() const { return kind_ != WindKind::custom; }

  WindField scaled(double k) const;

  Vec2 eval(const Point &pos) const;
  Mat2 jacobian(const Point &pos) const;

  /// W and its jacobian on a generic scalar. Catalogue kinds only.
  template <class T>
  void eval_with_jacobian(const T &x, const T &y, Vec2T<T> &w, Mat2T<T> &jac) const;

  /// Symmetry axis used as the starting point of convexity root-finding.
  double axis() const { return kind_ == WindKind::gaussian ? params_.b : 0.0; }

 private:
  WindKind kind_ = WindKind::zero;
  Params params_;
  std::shared_ptr<const CustomWind> custom_;
};

Vec2 eval_wind(const WindField &field, const Point &pos);

/// Maximal open y-interval around the field's axis with |f(y)| < 1.
ConvexityDomain convexity_bound(const WindField &field);

// ---------------------------------------------------------------------------

template <class T>
void WindField::eval_with_jacobian(const T &, const T &y, Vec2T<T> &w, Mat2T<T> &jac) const {
  using std::exp;
  const double k = params_.scale;
  w = {T(0.0), T(0.0)};
  jac = Mat2T<T>{};
  switch (kind_) {
    case WindKind::zero:
      return;
    case WindKind::constant:
      w = {T(params_.p), T(params_.q)};
      return;
    case WindKind::shear:
      w.x = k * y;
      jac(0, 1) = T(k);
      return;
    case WindKind::quartic: {
      const T d = params_.b - y * y;
      w.x = (k * params_.a) * d * d;
      jac(0, 1) = (-4.0 * k * params_.a) * y * d;
      return;
    }
    case WindKind::gaussian: {
      const double c2 = params_.c * params_.c;
      const T dy = y - params_.b;
      const T e = exp(-(dy * dy) / (2.0 * c2));
      w.x = (k * params_.a) * e;
      jac(0, 1) = (-k * params_.a / c2) * dy * e;
      return;
    }
    case WindKind::custom:
      break;
  }
  throw BadParams("custom wind fields cannot be evaluated on jets");
}

}  // namespace zermelo
