#include "zermelo/finsler.hpp"

#include <cmath>
#include <numbers>

#include "zermelo/detail/metric_derivatives.hpp"
#include "zermelo/detail/parallel.hpp"
#include "zermelo/jet.hpp"
#include "zermelo/randers.hpp"

namespace zermelo {

namespace {

using detail::MetricDerivatives;
using J4 = Jet<4>;

// Index order of the jet variables.
enum Var { kX = 0, kY = 1, kU = 2, kV = 3 };

// Richardson-extrapolated central differences of the closed-form spray.
constexpr double kFdStep = 1e-4;

void validate(const WindField &field, const TangentSample &s) {
  if (s.vel.x == 0.0 && s.vel.y == 0.0) throw ZeroVector("tangent vector must be nonzero");
  require_weak(field.eval(s.pos), s.pos);
}

MetricDerivatives<double> metric_at(const WindField &field, const TangentSample &s,
                                    MetricPart which) {
  const auto t = detail::navigation_terms(field.eval(s.pos), field.jacobian(s.pos), s.vel);
  return which == MetricPart::randers ? detail::randers_derivatives(t)
                                      : detail::alpha_derivatives(t);
}

SprayCoefficients spray_of(const WindField &field, const TangentSample &s, MetricPart which) {
  validate(field, s);
  const auto e = detail::energy_derivatives(metric_at(field, s, which));
  const auto sp = detail::spray_terms(e, s.vel);
  if (!(sp.det > 0.0) || !std::isfinite(sp.G) || !std::isfinite(sp.H))
    throw DegenerateHessian("velocity Hessian of F^2/2 is not positive definite");
  return {sp.G, sp.H, sp.L};
}

// Value, gradient and the needed second partials of G and H in (x, y, u, v).
struct SprayDerivatives {
  double F = 0;
  double G = 0, H = 0;
  double dG[4]{}, dH[4]{};
  double hG[4][4]{}, hH[4][4]{};
};

SprayDerivatives exact_spray_derivatives(const WindField &field, const TangentSample &s) {
  const J4 x = J4::variable(s.pos.x, kX);
  const J4 y = J4::variable(s.pos.y, kY);
  const Vec2T<J4> p{J4::variable(s.vel.x, kU), J4::variable(s.vel.y, kV)};
  Vec2T<J4> w;
  Mat2T<J4> jac;
  field.eval_with_jacobian(x, y, w, jac);
  const auto m = detail::randers_derivatives(detail::navigation_terms(w, jac, p));
  const auto sp = detail::spray_terms(detail::energy_derivatives(m), p);
  SprayDerivatives d;
  d.F = m.value.v;
  d.G = sp.G.v;
  d.H = sp.H.v;
  for (int i = 0; i < 4; ++i) {
    d.dG[i] = sp.G.g[i];
    d.dH[i] = sp.H.g[i];
    for (int j = 0; j < 4; ++j) {
      d.hG[i][j] = sp.G.h[i][j];
      d.hH[i][j] = sp.H.h[i][j];
    }
  }
  return d;
}

struct GH {
  double G, H;
};

GH spray_at(const WindField &field, const double z[4]) {
  const auto sp = spray_of(field, {{z[0], z[1]}, {z[2], z[3]}}, MetricPart::randers);
  return {sp.G, sp.H};
}

SprayDerivatives fd_spray_derivatives(const WindField &field, const TangentSample &s) {
  const double z0[4] = {s.pos.x, s.pos.y, s.vel.x, s.vel.y};
  double step[4];
  for (int i = 0; i < 4; ++i) step[i] = kFdStep * std::max(1.0, std::abs(z0[i]));

  auto eval = [&](int i, double di, int j, double dj) {
    double z[4] = {z0[0], z0[1], z0[2], z0[3]};
    z[i] += di;
    z[j] += dj;
    return spray_at(field, z);
  };

  SprayDerivatives d;
  const GH c = spray_at(field, z0);
  d.G = c.G;
  d.H = c.H;
  d.F = eval_F(field, s.pos, s.vel);

  for (int i = 0; i < 4; ++i) {
    auto central = [&](double h) {
      const GH a = eval(i, h, i, 0.0), b = eval(i, -h, i, 0.0);
      return GH{(a.G - b.G) / (2 * h), (a.H - b.H) / (2 * h)};
    };
    const GH coarse = central(step[i]), fine = central(0.5 * step[i]);
    d.dG[i] = (4.0 * fine.G - coarse.G) / 3.0;
    d.dH[i] = (4.0 * fine.H - coarse.H) / 3.0;
  }

  auto second = [&](int i, int j) {
    auto at = [&](double scale) {
      const double hi = scale * step[i], hj = scale * step[j];
      if (i == j) {
        const GH a = eval(i, hi, i, 0.0), b = eval(i, -hi, i, 0.0);
        return GH{(a.G - 2 * c.G + b.G) / (hi * hi), (a.H - 2 * c.H + b.H) / (hi * hi)};
      }
      const GH pp = eval(i, hi, j, hj), pm = eval(i, hi, j, -hj);
      const GH mp = eval(i, -hi, j, hj), mm = eval(i, -hi, j, -hj);
      const double den = 4 * hi * hj;
      return GH{(pp.G - pm.G - mp.G + mm.G) / den, (pp.H - pm.H - mp.H + mm.H) / den};
    };
    const GH coarse = at(1.0), fine = at(0.5);
    const GH r{(4.0 * fine.G - coarse.G) / 3.0, (4.0 * fine.H - coarse.H) / 3.0};
    d.hG[i][j] = d.hG[j][i] = r.G;
    d.hH[i][j] = d.hH[j][i] = r.H;
  };
  for (int i : {kX, kY, kU, kV})
    for (int j : {kU, kV})
      if (i <= j || i < kU) second(i, j);
  return d;
}

double curvature_from(const SprayDerivatives &d, const Vec2 &vel) {
  const double u = vel.x, v = vel.y;
  const double Gu = d.dG[kU], Gv = d.dG[kV], Gx = d.dG[kX];
  const double Hu = d.dH[kU], Hv = d.dH[kV], Hy = d.dH[kY];
  const double Qu = d.hG[kU][kU] + d.hH[kV][kU];
  const double Qv = d.hG[kU][kV] + d.hH[kV][kV];
  const double Qx = d.hG[kU][kX] + d.hH[kV][kX];
  const double Qy = d.hG[kU][kY] + d.hH[kV][kY];
  const double ric = -2 * Gv * Hu + 2 * d.G * Qu - Gu * Gu + 2 * Gx + 2 * d.H * Qv - Hv * Hv +
                     2 * Hy - u * Qx - v * Qy;
  return ric / (d.F * d.F);
}

}  // namespace

FundamentalTensor fundamental_tensor(const WindField &field, const TangentSample &s) {
  validate(field, s);
  const auto e = detail::energy_derivatives(metric_at(field, s, MetricPart::randers));
  return {e.dvv, e.dvv.det()};
}

SprayCoefficients spray_coefficients(const WindField &field, const TangentSample &s) {
  return spray_of(field, s, MetricPart::randers);
}

SprayCoefficients riemannian_spray(const WindField &field, const TangentSample &s) {
  return spray_of(field, s, MetricPart::alpha);
}

double gauss_curvature(const WindField &field, const TangentSample &s, CurvatureMethod method) {
  validate(field, s);
  if (method == CurvatureMethod::automatic)
    method = field.analytic() ? CurvatureMethod::exact : CurvatureMethod::finite_difference;
  if (method == CurvatureMethod::exact) {
    if (!field.analytic()) throw BadParams("exact curvature needs a catalogue wind field");
    const auto d = exact_spray_derivatives(field, s);
    const double det = fundamental_tensor(field, s).det;
    if (!(det > 0.0)) throw DegenerateHessian("fundamental tensor is not positive definite");
    return curvature_from(d, s.vel);
  }
  return curvature_from(fd_spray_derivatives(field, s), s.vel);
}

Vec2 projective_flatness_residual(const WindField &field, const TangentSample &s,
                                  MetricPart which) {
  validate(field, s);
  const auto m = metric_at(field, s, which);
  const Vec2 &p = s.vel;
  return {m.dxv(0, 0) * p.x + m.dxv(1, 0) * p.y - m.dx.x,
          m.dxv(0, 1) * p.x + m.dxv(1, 1) * p.y - m.dx.y};
}

namespace {

CurvatureSample profile_sample(const WindField &field, const Point &pos, const Vec2 &w, int k,
                               int n, CurvatureMethod method) {
  const double theta = 2.0 * std::numbers::pi * k / n;
  return {theta, gauss_curvature(field, {pos, unit(theta) + w}, method)};
}

Vec2 profile_wind(const WindField &field, const Point &pos, int n) {
  if (n < 8) throw BadParams("curvature profile needs n >= 8");
  const Vec2 w = field.eval(pos);
  require_weak(w, pos);
  return w;
}

}  // namespace

std::vector<CurvatureSample> curvature_profile(const WindField &field, const Point &pos, int n,
                                               CurvatureMethod method) {
  const Vec2 w = profile_wind(field, pos, n);
  std::vector<CurvatureSample> out(static_cast<std::size_t>(n));
  detail::parallel_for(n, [&](std::ptrdiff_t k) {
    out[static_cast<std::size_t>(k)] = profile_sample(field, pos, w, static_cast<int>(k), n, method);
  });
  return out;
}

std::vector<CurvatureSample> curvature_profile_serial(const WindField &field, const Point &pos,
                                                      int n, CurvatureMethod method) {
  const Vec2 w = profile_wind(field, pos, n);
  std::vector<CurvatureSample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) out.push_back(profile_sample(field, pos, w, k, n, method));
  return out;
}

}  // namespace zermelo
