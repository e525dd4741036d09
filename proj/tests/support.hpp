#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "zermelo/finsler.hpp"
#include "zermelo/wind.hpp"

namespace testing {

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}

inline oracle::WindFn wind_fn(const zermelo::WindField &field) {
  return [field](double x, double y) {
    const zermelo::Vec2 w = field.eval({x, y});
    return oracle::V2{w.x, w.y};
  };
}

// Catalogue winds recoded in extended precision from their defining formulas.
inline oracle::WindFnL wind_fn_long(const zermelo::WindField &field) {
  using oracle::Real;
  const zermelo::WindField::Params p = field.params();
  const zermelo::WindKind kind = field.kind();
  return [p, kind](Real, Real y, Real &wx, Real &wy) {
    wx = wy = 0;
    switch (kind) {
      case zermelo::WindKind::shear: wx = p.scale * y; break;
      case zermelo::WindKind::quartic: wx = p.scale * p.a * (p.b - y * y) * (p.b - y * y); break;
      case zermelo::WindKind::gaussian:
        wx = p.scale * p.a * std::exp(-(y - p.b) * (y - p.b) / (2 * Real(p.c) * p.c));
        break;
      case zermelo::WindKind::constant: wx = p.p; wy = p.q; break;
      default: break;
    }
  };
}

// Independent F for any catalogue field via the navigation quadratic.
inline oracle::ScalarFn navigation_F(const zermelo::WindField &field) {
  return [fn = wind_fn_long(field)](oracle::Real x, oracle::Real y, oracle::Real u, oracle::Real v) {
    return oracle::navigation_F(fn, x, y, u, v);
  };
}

inline std::vector<zermelo::WindField> catalogue() {
  return {zermelo::WindField::zero(), zermelo::WindField::shear(),
          zermelo::WindField::quartic(0.8, 1.0),
          zermelo::WindField::gaussian(5.0 / (2.0 * std::sqrt(2.0 * M_PI)), 0.0, 1.0),
          zermelo::WindField::constant(0.3, -0.4)};
}

// Tangent samples with y inset 10% inside the convexity domain and within [-1, 1].
inline std::vector<zermelo::TangentSample> random_samples(const zermelo::WindField &field, int n,
                                                          unsigned seed) {
  const zermelo::ConvexityDomain dom = zermelo::convexity_bound(field);
  const double lo = std::max(-1.0, dom.y_min), hi = std::min(1.0, dom.y_max);
  const double pad = 0.1 * (hi - lo);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(-1, 1), uy(lo + pad, hi - pad), ang(0, 2 * M_PI),
      mag(0.3, 2.0);
  std::vector<zermelo::TangentSample> out;
  for (int i = 0; i < n; ++i) {
    const double a = ang(rng), m = mag(rng);
    out.push_back({{ux(rng), uy(rng)}, {m * std::cos(a), m * std::sin(a)}});
  }
  return out;
}

}  // namespace testing
