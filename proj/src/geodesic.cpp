#include "zermelo/geodesic.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "zermelo/detail/metric_derivatives.hpp"
#include "zermelo/detail/parallel.hpp"
#include "zermelo/randers.hpp"

namespace zermelo {

const char *to_string(Termination t) {
  switch (t) {
    case Termination::time_exhausted: return "time_exhausted";
    case Termination::domain_boundary: return "domain_boundary";
    case Termination::target_reached: return "target_reached";
  }
  return "?";
}

int quadrant_of(double phi0) {
  // The small bias keeps k * (pi / 18) with k = 9, 18, 27 in the upper class.
  const double q = std::floor(2.0 * phi0 / std::numbers::pi + 1e-9);
  const int r = static_cast<int>(std::fmod(q, 4.0));
  return r < 0 ? r + 4 : r;
}

// ---------------------------------------------------------------------------
// Dense output

namespace {

double hermite(double p0, double d0, double p1, double d1, double h, double s) {
  const double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * p0 + (s3 - 2 * s2 + s) * h * d0 + (-2 * s3 + 3 * s2) * p1 +
         (s3 - s2) * h * d1;
}

double hermite_slope(double p0, double d0, double p1, double d1, double h, double s) {
  const double s2 = s * s;
  return ((6 * s2 - 6 * s) * p0 + (-6 * s2 + 6 * s) * p1) / h + (3 * s2 - 4 * s + 1) * d0 +
         (3 * s2 - 2 * s) * d1;
}

}  // namespace

double GeodesicPath::max_f_residual() const {
  double m = 0;
  for (double r : f_residual) m = std::max(m, std::abs(r));
  return m;
}

GeodesicState GeodesicPath::at(double t) const {
  if (samples.empty()) return {};
  if (t <= samples.front().t) return samples.front();
  if (t >= samples.back().t) return samples.back();
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double v, const GeodesicState &s) { return v < s.t; });
  const std::size_t i = static_cast<std::size_t>(it - samples.begin()) - 1;
  const GeodesicState &a = samples[i], &b = samples[i + 1];
  const Vec2 &aa = acc[i], &ab = acc[i + 1];
  const double h = b.t - a.t;
  const double s = (t - a.t) / h;
  GeodesicState out;
  out.t = t;
  out.pos = {hermite(a.pos.x, a.vel.x, b.pos.x, b.vel.x, h, s),
             hermite(a.pos.y, a.vel.y, b.pos.y, b.vel.y, h, s)};
  out.vel = {hermite(a.vel.x, aa.x, b.vel.x, ab.x, h, s),
             hermite(a.vel.y, aa.y, b.vel.y, ab.y, h, s)};
  return out;
}

void GeodesicPath::truncate(double t) {
  if (samples.empty() || t >= samples.back().t) return;
  const GeodesicState cut = at(t);
  // Acceleration at the cut: slope of the velocity interpolant.
  auto it = std::upper_bound(samples.begin(), samples.end(), t,
                             [](double v, const GeodesicState &s) { return v < s.t; });
  std::size_t keep = static_cast<std::size_t>(it - samples.begin());
  const std::size_t i = keep - 1;
  const GeodesicState &a = samples[i], &b = samples[i + 1];
  const double h = b.t - a.t, s = (t - a.t) / h;
  const Vec2 cut_acc{hermite_slope(a.vel.x, acc[i].x, b.vel.x, acc[i + 1].x, h, s),
                     hermite_slope(a.vel.y, acc[i].y, b.vel.y, acc[i + 1].y, h, s)};
  const double cut_res = f_residual[i + 1];
  if (samples[i].t == t) --keep;  // exact hit on a sample: replace it
  samples.resize(keep);
  acc.resize(keep);
  f_residual.resize(keep);
  samples.push_back(cut);
  acc.push_back(cut_acc);
  f_residual.push_back(cut_res);
}

std::vector<Point> GeodesicPath::polyline(double max_dt) const {
  std::vector<Point> out;
  if (samples.empty()) return out;
  out.push_back(samples.front().pos);
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    const double t0 = samples[i].t, t1 = samples[i + 1].t;
    const int sub = max_dt > 0 ? std::max(1, static_cast<int>(std::ceil((t1 - t0) / max_dt))) : 1;
    for (int k = 1; k < sub; ++k) out.push_back(at(t0 + (t1 - t0) * k / sub).pos);
    out.push_back(samples[i + 1].pos);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Integrator

GeodesicState initial_state(const WindField &field, const Point &start, double phi0) {
  const Vec2 w = field.eval(start);
  require_weak(w, start);
  const ConvexityDomain dom = convexity_bound(field);
  if (!dom.contains(start)) throw ConvexityViolation("start point outside the convexity domain");
  return {start, unit(phi0) + w, 0.0};
}

namespace {

using State = std::array<double, 4>;  // x, y, xdot, ydot

constexpr double kStallWindow = 1e-6;
constexpr double kStallLambda = 1e-8;

struct Rhs {
  const WindField &field;
  ConvexityDomain domain;

  // False when z is outside the open domain or the spray is undefined there.
  bool operator()(const State &z, State &dz) const {
    const Point pos{z[0], z[1]};
    const Vec2 vel{z[2], z[3]};
    if (!std::isfinite(z[0]) || !std::isfinite(z[1]) || !domain.contains(pos)) return false;
    if (vel.x == 0.0 && vel.y == 0.0) return false;
    const Vec2 w = field.eval(pos);
    if (norm(w) >= 1.0 - kConvexityGuard) return false;
    const auto t = detail::navigation_terms(w, field.jacobian(pos), vel);
    const auto e = detail::energy_derivatives(detail::randers_derivatives(t));
    const auto sp = detail::spray_terms(e, vel);
    if (!(sp.det > 0.0) || !std::isfinite(sp.G) || !std::isfinite(sp.H)) return false;
    dz = {z[2], z[3], -2.0 * sp.G, -2.0 * sp.H};
    return true;
  }

  // As lambda -> 0 the spray loses precision and step control stalls a hair
  // short of the crossing; within kStallWindow of it the stall is the event.
  bool near_boundary(const State &z) const {
    const Point pos{z[0], z[1]};
    const double lambda = 1.0 - dot(field.eval(pos), field.eval(pos));
    if (lambda < kStallLambda) return true;
    if (!domain.bounded()) return false;
    const double speed = std::abs(z[3]);
    return speed > 0.0 && domain.margin(pos) / speed < kStallWindow;
  }
};

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Trial {
  bool inside = false;
  State z{};
  State dz{};  // derivative at the new point (FSAL)
  double err = 0;
};

Trial dp_step(const Rhs &rhs, const State &z, const State &k1, double h,
              const IntegratorOptions &o) {
  Trial out;
  State k2, k3, k4, k5, k6, k7, y;
  auto stage = [&](auto &&combine, State &k) {
    for (int i = 0; i < 4; ++i) y[i] = z[i] + h * combine(i);
    return rhs(y, k);
  };
  if (!stage([&](int i) { return a21 * k1[i]; }, k2)) return out;
  if (!stage([&](int i) { return a31 * k1[i] + a32 * k2[i]; }, k3)) return out;
  if (!stage([&](int i) { return a41 * k1[i] + a42 * k2[i] + a43 * k3[i]; }, k4)) return out;
  if (!stage([&](int i) { return a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]; }, k5))
    return out;
  if (!stage([&](int i) {
        return a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i];
      }, k6))
    return out;
  if (!stage([&](int i) {
        return b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i];
      }, k7))
    return out;
  out.inside = true;
  out.z = y;
  out.dz = k7;
  double sum = 0;
  for (int i = 0; i < 4; ++i) {
    const double e =
        h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double sc = o.atol + o.rtol * std::max(std::abs(z[i]), std::abs(y[i]));
    sum += (e / sc) * (e / sc);
  }
  out.err = std::sqrt(sum / 4.0);
  return out;
}

}  // namespace

GeodesicPath integrate(const WindField &field, const GeodesicState &init, double t_max,
                       const IntegratorOptions &o) {
  if (!(t_max > 0.0)) throw BadParams("t_max must be positive");
  if (init.vel.x == 0.0 && init.vel.y == 0.0) throw ZeroVector("initial velocity is zero");
  const Rhs rhs{field, convexity_bound(field)};
  if (!rhs.domain.contains(init.pos))
    throw ConvexityViolation("initial state outside the convexity domain");
  require_weak(field.eval(init.pos), init.pos);

  State z{init.pos.x, init.pos.y, init.vel.x, init.vel.y};
  State dz;
  if (!rhs(z, dz)) throw DegenerateHessian("spray undefined at the initial state");

  GeodesicPath path;
  auto record = [&](double t, double residual) {
    path.samples.push_back({{z[0], z[1]}, {z[2], z[3]}, t});
    path.acc.push_back({dz[2], dz[3]});
    path.f_residual.push_back(residual);
  };
  record(init.t, randers_norm(field.eval(init.pos), init.vel) - 1.0);

  const bool fixed = o.fixed_step > 0.0;
  const double t_end = init.t + t_max;
  double t = init.t;
  double h = fixed ? o.fixed_step : std::min(o.initial_step, o.max_step);
  double err_prev = 1e-4;
  bool last_rejected = false;
  std::size_t steps = 0;

  while (t_end - t > 1e-14 * std::max(1.0, std::abs(t_end))) {
    if (++steps > o.max_steps) throw StepFailure("step budget exhausted");
    h = std::min(h, t_end - t);

    Trial tr = dp_step(rhs, z, dz, h, o);
    bool at_boundary = false;
    if (!tr.inside) {
      // Largest feasible step by bisection; the crossing lies within event_time_tol of it.
      double lo = 0.0, hi = h;
      Trial best;
      while (hi - lo > o.event_time_tol) {
        const double mid = 0.5 * (lo + hi);
        Trial m = dp_step(rhs, z, dz, mid, o);
        if (m.inside) {
          lo = mid;
          best = m;
        } else {
          hi = mid;
        }
      }
      if (!best.inside) {
        path.termination = Termination::domain_boundary;
        break;
      }
      h = lo;
      tr = best;
      at_boundary = true;
    }

    if (!fixed && tr.err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(tr.err, -0.2));
      last_rejected = true;
      if (h < o.event_time_tol && rhs.near_boundary(z)) {
        path.termination = Termination::domain_boundary;
        break;
      }
      if (h < o.min_step) throw StepFailure("step size underflow near t = " + std::to_string(t));
      continue;
    }

    t += h;
    z = tr.z;
    dz = tr.dz;
    double residual = 0.0;
    const Vec2 w = field.eval({z[0], z[1]});
    const double F = randers_norm(w, {z[2], z[3]});
    residual = F - 1.0;
    if (o.renormalize && F > 0.0) {
      // F is 1-homogeneous and G, H are 2-homogeneous in the velocity.
      const double c = 1.0 / F;
      z[2] *= c;
      z[3] *= c;
      dz[0] = z[2];
      dz[1] = z[3];
      dz[2] *= c * c;
      dz[3] *= c * c;
    }
    record(t, residual);

    if (at_boundary) {
      path.termination = Termination::domain_boundary;
      break;
    }
    if (!fixed) {
      const double e = std::max(tr.err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.14) * std::pow(err_prev, 0.08);
      fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 10.0);
      h = std::min(h * fac, o.max_step);
      err_prev = e;
      last_rejected = false;
      if (h < o.event_time_tol && rhs.near_boundary(z)) {
        path.termination = Termination::domain_boundary;
        break;
      }
    }
  }
  return path;
}

// ---------------------------------------------------------------------------
// Families

std::vector<double> fan_angles(const FanSpec &spec) {
  if (!(spec.d_phi > 0.0)) throw BadParams("fan d_phi must be positive");
  if (!(spec.phi_end > spec.phi_begin)) throw BadParams("fan range must be nonempty");
  if (!(spec.t_max > 0.0)) throw BadParams("fan t_max must be positive");
  const double ratio = (spec.phi_end - spec.phi_begin) / spec.d_phi;
  const auto n = static_cast<std::size_t>(std::ceil(ratio - 1e-9));
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = spec.phi_begin + static_cast<double>(k) * spec.d_phi;
  return out;
}

namespace {

GeodesicPath fan_member(const WindField &field, const FanSpec &spec, double phi0,
                        const IntegratorOptions &opts) {
  GeodesicPath p = integrate(field, initial_state(field, spec.start, phi0), spec.t_max, opts);
  p.phi0 = phi0;
  return p;
}

}  // namespace

std::vector<GeodesicPath> fan(const WindField &field, const FanSpec &spec,
                              const IntegratorOptions &opts) {
  const auto angles = fan_angles(spec);
  std::vector<GeodesicPath> out(angles.size());
  detail::parallel_for(static_cast<std::ptrdiff_t>(angles.size()), [&](std::ptrdiff_t k) {
    const auto i = static_cast<std::size_t>(k);
    out[i] = fan_member(field, spec, angles[i], opts);
  });
  return out;
}

std::vector<GeodesicPath> fan_serial(const WindField &field, const FanSpec &spec,
                                     const IntegratorOptions &opts) {
  std::vector<GeodesicPath> out;
  for (double phi0 : fan_angles(spec)) out.push_back(fan_member(field, spec, phi0, opts));
  return out;
}

std::vector<FrontPoint> time_front_detailed(const WindField &field, const Point &start, double t,
                                            int n, const IntegratorOptions &opts) {
  if (!(t > 0.0)) throw BadParams("front time must be positive");
  if (n < 4) throw BadParams("time front needs n >= 4");
  std::vector<FrontPoint> out(static_cast<std::size_t>(n));
  detail::parallel_for(n, [&](std::ptrdiff_t k) {
    const double phi0 = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
    const GeodesicPath p = integrate(field, initial_state(field, start, phi0), t, opts);
    out[static_cast<std::size_t>(k)] = {phi0, p.back().pos, p.duration(), p.termination};
  });
  return out;
}

std::vector<Point> time_front(const WindField &field, const Point &start, double t, int n,
                              const IntegratorOptions &opts) {
  std::vector<Point> out;
  for (const auto &f : time_front_detailed(field, start, t, n, opts)) out.push_back(f.pos);
  return out;
}

}  // namespace zermelo
