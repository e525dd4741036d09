#include "zermelo/randers.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace zermelo {

namespace {

void require_nonzero(const Vec2 &vel) {
  if (vel.x == 0.0 && vel.y == 0.0) throw ZeroVector("tangent vector must be nonzero");
}

}  // namespace

void require_weak(const Vec2 &w, const Point &pos) {
  const double limit = 1.0 - kConvexityGuard;
  if (!(dot(w, w) < limit * limit)) {
    std::ostringstream os;
    os.precision(17);
    os << "|W| = " << norm(w) << " >= 1 at (" << pos.x << ", " << pos.y << ")";
    throw ConvexityViolation(os.str());
  }
}

RandersData build_randers(const WindField &field, const Point &pos) {
  RandersData r;
  r.w = field.eval(pos);
  require_weak(r.w, pos);
  r.lambda = 1.0 - dot(r.w, r.w);
  const double inv = 1.0 / r.lambda;
  const double wi[2] = {r.w.x, r.w.y};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r.a(i, j) = (i == j ? inv : 0.0) + wi[i] * wi[j] * inv * inv;
  r.b = -inv * r.w;
  return r;
}

double randers_norm(const Vec2 &w, const Vec2 &vel) {
  const double lambda = 1.0 - dot(w, w);
  const double s = dot(w, vel);
  const double n2 = dot(vel, vel);
  const double S = std::sqrt(lambda * n2 + s * s);
  if (s > 0.0) return n2 / (S + s);
  return (S - s) / lambda;
}

double eval_F(const WindField &field, const Point &pos, const Vec2 &vel) {
  require_nonzero(vel);
  const Vec2 w = field.eval(pos);
  require_weak(w, pos);
  return randers_norm(w, vel);
}

AlphaBeta eval_alpha_beta(const WindField &field, const Point &pos, const Vec2 &vel) {
  require_nonzero(vel);
  const Vec2 w = field.eval(pos);
  require_weak(w, pos);
  const double lambda = 1.0 - dot(w, w);
  const double s = dot(w, vel);
  const double S = std::sqrt(lambda * dot(vel, vel) + s * s);
  return {S / lambda, -s / lambda};
}

std::vector<Vec2> indicatrix(const WindField &field, const Point &pos, int n) {
  if (n < 3) throw BadParams("indicatrix needs n >= 3");
  const Vec2 w = field.eval(pos);
  require_weak(w, pos);
  std::vector<Vec2> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(unit(2.0 * std::numbers::pi * k / n) + w);
  return out;
}

}  // namespace zermelo
