#pragma once

#include <vector>

#include "zermelo/vec2.hpp"
#include "zermelo/wind.hpp"

namespace zermelo {

/// A point of TM minus the zero section: position (x, y), velocity (u, v).
struct TangentSample {
  Point pos;
  Vec2 vel;
};

struct FundamentalTensor {
  Mat2 g;  // 1/2 Hessian of F^2 in the velocity
  double det = 0;
};

struct SprayCoefficients {
  double G = 0;
  double H = 0;
  double L = 0;  // F^2 / 2
};

enum class MetricPart { randers, alpha };

enum class CurvatureMethod {
  automatic,          // exact for catalogue winds, finite differences for plug-ins
  exact,              // second-order jets through the closed-form spray
  finite_difference,  // Richardson-extrapolated central differences of G, H
};

FundamentalTensor fundamental_tensor(const WindField &field, const TangentSample &s);

SprayCoefficients spray_coefficients(const WindField &field, const TangentSample &s);

/// Spray of the Riemannian term alpha alone.
SprayCoefficients riemannian_spray(const WindField &field, const TangentSample &s);

/// Flag (Gauss) curvature Ric / F^2 via the Q = G_u + H_v form.
double gauss_curvature(const WindField &field, const TangentSample &s,
                       CurvatureMethod method = CurvatureMethod::automatic);

/// (u M_xu + v M_yu - M_x, u M_xv + v M_yv - M_y) for M = F or M = alpha.
Vec2 projective_flatness_residual(const WindField &field, const TangentSample &s,
                                  MetricPart which = MetricPart::randers);

struct CurvatureSample {
  double angle = 0;
  double K = 0;
};

/// K along the resultants unit(theta_k) + W(pos), theta_k = 2 pi k / n.
std::vector<CurvatureSample> curvature_profile(const WindField &field, const Point &pos, int n,
                                               CurvatureMethod method = CurvatureMethod::automatic);
std::vector<CurvatureSample> curvature_profile_serial(
    const WindField &field, const Point &pos, int n,
    CurvatureMethod method = CurvatureMethod::automatic);

}  // namespace zermelo
