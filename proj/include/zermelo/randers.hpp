#pragma once

#include <vector>

#include "zermelo/vec2.hpp"
#include "zermelo/wind.hpp"

namespace zermelo {

/// Randers data F = alpha + beta induced by (delta_ij, W) at one point.
struct RandersData {
  Mat2 a;             // a_ij = delta_ij / lambda + W_i W_j / lambda^2
  Vec2 b;             // b_i = -W_i / lambda
  double lambda = 1;  // 1 - |W|^2
  Vec2 w;
};

struct AlphaBeta {
  double alpha = 0;
  double beta = 0;
};

/// Points with |W| >= 1 - kConvexityGuard are rejected; lambda -> 0 amplifies rounding.
inline constexpr double kConvexityGuard = 1e-12;

/// Throws ConvexityViolation unless |w| < 1 - kConvexityGuard.
void require_weak(const Vec2 &w, const Point &pos);

RandersData build_randers(const WindField &field, const Point &pos);

/// F for an already-evaluated wind vector. Uses the cancellation-free branch
/// |v|^2 / (S + <W,v>) when the wind has a tailwind component.
double randers_norm(const Vec2 &w, const Vec2 &vel);

double eval_F(const WindField &field, const Point &pos, const Vec2 &vel);
AlphaBeta eval_alpha_beta(const WindField &field, const Point &pos, const Vec2 &vel);

/// n samples of the unit F-sphere: the W-translate of the Euclidean unit circle.
std::vector<Vec2> indicatrix(const WindField &field, const Point &pos, int n);

}  // namespace zermelo
