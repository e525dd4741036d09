#include "zermelo/connector.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "zermelo/detail/parallel.hpp"
#include "zermelo/randers.hpp"

namespace zermelo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

double angular_gap(double a, double b) {
  const double d = wrap_angle(a - b);
  return std::min(d, kTwoPi - d);
}

double dist2_at(const GeodesicPath &p, double t, const Point &q) {
  const Vec2 d = p.at(t).pos - q;
  return dot(d, d);
}

}  // namespace

ClosestApproach closest_approach(const GeodesicPath &path, const Point &target) {
  ClosestApproach ca;
  const auto &s = path.samples;
  if (s.empty()) return ca;
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Vec2 d = s[i].pos - target;
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  // Golden-section search over the two intervals adjacent to the best sample.
  double lo = s[best > 0 ? best - 1 : 0].t;
  double hi = s[std::min(best + 1, s.size() - 1)].t;
  constexpr double kInvPhi = 0.6180339887498949;
  double a = hi - kInvPhi * (hi - lo), b = lo + kInvPhi * (hi - lo);
  double fa = dist2_at(path, a, target), fb = dist2_at(path, b, target);
  for (int it = 0; it < 100 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - kInvPhi * (hi - lo);
      fa = dist2_at(path, a, target);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + kInvPhi * (hi - lo);
      fb = dist2_at(path, b, target);
    }
  }
  double t = 0.5 * (lo + hi);
  if (dist2_at(path, t, target) > best_d2) t = s[best].t;
  const GeodesicState st = path.at(t);
  ca.t = t;
  ca.pos = st.pos;
  ca.distance = distance(st.pos, target);
  const double span = s.back().t - s.front().t;
  const double edge = 1e-9 * std::max(1.0, span);
  ca.interior = t - s.front().t > edge && s.back().t - t > edge;
  const double speed = norm(st.vel);
  ca.signed_miss = speed > 0 ? cross(st.vel, target - st.pos) / speed : 0.0;
  return ca;
}

double crab_heading(const Vec2 &w, const Vec2 &dir) {
  const Vec2 e = normalized(dir);
  const double w_perp = cross(e, w);
  if (std::abs(w_perp) >= 1.0) throw InfeasibleTrack("cross-track wind component reaches own speed");
  // Own velocity u = sqrt(1 - w_perp^2) e - w_perp n, n the left normal of e.
  const Vec2 n{-e.y, e.x};
  const Vec2 u = std::sqrt(1.0 - w_perp * w_perp) * e - w_perp * n;
  return wrap_angle(std::atan2(u.y, u.x));
}

double track_time(const WindField &field, const Point &from, const Point &to, int n_seg) {
  if (n_seg < 1) throw BadParams("track_time needs n_seg >= 1");
  const double len = distance(from, to);
  if (len == 0.0) return 0.0;
  const Vec2 e = (to - from) / len;
  const double piece = len / n_seg;
  double total = 0.0;
  for (int k = 0; k < n_seg; ++k) {
    const Point mid = from + ((k + 0.5) * piece) * e;
    const Vec2 w = field.eval(mid);
    const double w_par = dot(w, e), w_perp = cross(e, w);
    if (std::abs(w_perp) >= 1.0)
      throw InfeasibleTrack("cross-track wind component reaches own speed on the track");
    const double ground = w_par + std::sqrt(1.0 - w_perp * w_perp);
    if (!(ground > 0.0)) throw InfeasibleTrack("no headway along the track");
    total += piece / ground;
  }
  return total;
}

namespace {

struct Shot {
  double phi0 = 0;
  bool valid = false;  // closest approach in the path interior
  double miss = 0;     // signed cross-track miss
  double distance = 0;
  double t = 0;
};

struct Shooter {
  const WindField &field;
  Point from, to;
  double horizon;
  const ConnectOptions &opts;

  GeodesicPath path(double phi0) const {
    GeodesicPath p = integrate(field, initial_state(field, from, phi0), horizon, opts.integrator);
    p.phi0 = phi0;
    return p;
  }

  Shot shoot(double phi0) const {
    const GeodesicPath p = path(phi0);
    const ClosestApproach ca = closest_approach(p, to);
    Shot s;
    s.phi0 = phi0;
    s.valid = ca.interior || ca.distance <= opts.pos_tol;
    s.miss = ca.signed_miss;
    s.distance = ca.distance;
    s.t = ca.t;
    return s;
  }

  // Secant iteration kept inside the sign-change bracket (Illinois variant).
  std::optional<Shot> refine(Shot a, Shot b) const {
    double wa = 1.0, wb = 1.0;
    for (int it = 0; it < opts.max_iters; ++it) {
      if (a.valid && a.distance <= opts.pos_tol) return a;
      if (b.valid && b.distance <= opts.pos_tol) return b;
      const double fa = wa * a.miss, fb = wb * b.miss;
      double phi = (a.phi0 * fb - b.phi0 * fa) / (fb - fa);
      const double lo = std::min(a.phi0, b.phi0), hi = std::max(a.phi0, b.phi0);
      if (!(phi > lo && phi < hi)) phi = 0.5 * (lo + hi);
      if (hi - lo < 1e-15) break;
      const Shot c = shoot(phi);
      if (!c.valid) {
        // Closest approach jumped to an end point: fall back to bisection.
        const Shot m = shoot(0.5 * (a.phi0 + b.phi0));
        if (!m.valid) return std::nullopt;
        if ((m.miss > 0) == (a.miss > 0)) a = m; else b = m;
        wa = wb = 1.0;
        continue;
      }
      if ((c.miss > 0) == (b.miss > 0)) {
        b = c;
        wb = 1.0;
        wa *= 0.5;
      } else {
        a = c;
        wa = 1.0;
        wb *= 0.5;
      }
    }
    const Shot &best = a.distance < b.distance ? a : b;
    if (best.valid && best.distance <= opts.pos_tol) return best;
    return std::nullopt;
  }
};

double auto_horizon(const WindField &field, const Point &from, const Point &to) {
  const double len = distance(from, to);
  try {
    return 1.5 * track_time(field, from, to, 64) + 0.1 * len;
  } catch (const InfeasibleTrack &) {
    return 20.0 * len;
  }
}

ConnectResult connect_impl(const WindField &field, const Point &from, const Point &to,
                           const ConnectOptions &opts, bool parallel) {
  if (opts.seed_angles < 4) throw BadParams("connect needs at least 4 seed angles");
  if (!(opts.pos_tol > 0.0)) throw BadParams("pos_tol must be positive");
  if (from == to) throw BadParams("connect endpoints coincide");
  const ConvexityDomain dom = convexity_bound(field);
  for (const Point &p : {from, to}) {
    if (!dom.contains(p)) throw ConvexityViolation("endpoint outside the convexity domain");
    require_weak(field.eval(p), p);
  }

  const double horizon = opts.horizon > 0.0 ? opts.horizon : auto_horizon(field, from, to);
  const Shooter shooter{field, from, to, horizon, opts};
  const int n = opts.seed_angles;

  auto for_each = [&](std::ptrdiff_t count, auto &&body) {
    if (parallel) {
      detail::parallel_for(count, body);
    } else {
      for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
    }
  };

  std::vector<Shot> seeds(static_cast<std::size_t>(n));
  for_each(n, [&](std::ptrdiff_t k) {
    seeds[static_cast<std::size_t>(k)] = shooter.shoot(kTwoPi * static_cast<double>(k) / n);
  });

  // Brackets between neighbouring seeds (cyclic) with a sign change.
  struct Bracket {
    Shot a, b;
  };
  std::vector<Bracket> brackets;
  for (int k = 0; k < n; ++k) {
    Shot a = seeds[static_cast<std::size_t>(k)];
    Shot b = seeds[static_cast<std::size_t>((k + 1) % n)];
    if (k + 1 == n) b.phi0 += kTwoPi;
    if (!a.valid || !b.valid) continue;
    if (a.distance <= opts.pos_tol) {
      brackets.push_back({a, a});
      continue;
    }
    if ((a.miss > 0) != (b.miss > 0)) brackets.push_back({a, b});
  }

  std::vector<std::optional<Shot>> roots(brackets.size());
  for_each(static_cast<std::ptrdiff_t>(brackets.size()), [&](std::ptrdiff_t i) {
    const Bracket &br = brackets[static_cast<std::size_t>(i)];
    roots[static_cast<std::size_t>(i)] =
        br.a.phi0 == br.b.phi0 ? std::optional<Shot>(br.a) : shooter.refine(br.a, br.b);
  });

  const double bearing = std::atan2(to.y - from.y, to.x - from.x);
  std::optional<Shot> best;
  for (const auto &r : roots) {
    if (!r) continue;
    if (!best) {
      best = r;
      continue;
    }
    const double tie = 1e-9 * std::max(1.0, best->t);
    if (r->t < best->t - tie ||
        (std::abs(r->t - best->t) <= tie &&
         angular_gap(r->phi0, bearing) < angular_gap(best->phi0, bearing)))
      best = r;
  }
  if (!best) throw NoConnection("no shooting seed reached the target before leaving the domain");

  ConnectResult res;
  res.phi0 = wrap_angle(best->phi0);
  res.path = shooter.path(best->phi0);
  res.path.phi0 = res.phi0;
  res.path.truncate(best->t);
  res.path.termination = Termination::target_reached;
  res.time = res.path.duration();
  res.miss = distance(res.path.back().pos, to);
  return res;
}

}  // namespace

ConnectResult connect(const WindField &field, const Point &from, const Point &to,
                      const ConnectOptions &opts) {
  return connect_impl(field, from, to, opts, true);
}

ConnectResult connect_serial(const WindField &field, const Point &from, const Point &to,
                             const ConnectOptions &opts) {
  return connect_impl(field, from, to, opts, false);
}

}  // namespace zermelo
