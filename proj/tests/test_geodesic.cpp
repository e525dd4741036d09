#include <numbers>
#include <random>

#include "doctest.h"
#include "support.hpp"
#include "zermelo/geodesic.hpp"
#include "zermelo/randers.hpp"

using namespace zermelo;
using std::numbers::pi;

namespace {

// Largest distance of the samples from the line through the first sample along dir.
double off_line(const GeodesicPath &p, const Vec2 &dir) {
  const Vec2 e = normalized(dir);
  double worst = 0;
  for (const GeodesicState &s : p.samples)
    worst = std::max(worst, std::abs(cross(e, s.pos - p.front().pos)));
  return worst;
}

}  // namespace

TEST_CASE("initial state") {
  CHECK(initial_state(WindField::zero(), {0, 0}, 0).vel == Vec2{1, 0});
  const GeodesicState s = initial_state(WindField::shear(), {0, -0.5}, pi / 2);
  CHECK(std::abs(s.vel.x + 0.5) < 1e-15);
  CHECK(std::abs(s.vel.y - 1) < 1e-15);
  const GeodesicState c = initial_state(WindField::constant(0.3, 0.4), {0, 0}, pi);
  CHECK(std::abs(c.vel.x + 0.7) < 1e-15);
  CHECK(std::abs(c.vel.y - 0.4) < 1e-15);
  CHECK(eval_F(WindField::shear(), s.pos, s.vel) == doctest::Approx(1).epsilon(1e-14));
}

TEST_CASE("straight geodesics") {
  const GeodesicPath z = integrate(WindField::zero(), initial_state(WindField::zero(), {0, 0}, pi / 4), 2);
  CHECK(distance(z.back().pos, {std::sqrt(2.0), std::sqrt(2.0)}) < 1e-7);
  CHECK(z.back().t == doctest::Approx(2).epsilon(1e-14));
  CHECK(z.termination == Termination::time_exhausted);

  const WindField c = WindField::constant(0.45, -0.3);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ang(0, 2 * pi);
  for (int i = 0; i < 20; ++i) {
    const GeodesicState init = initial_state(c, {0.2, -0.1}, ang(rng));
    const GeodesicPath p = integrate(c, init, 5);
    CHECK(off_line(p, init.vel) <= 1e-9 * 5);
    CHECK(distance(p.back().pos, init.pos + 5.0 * init.vel) <= 1e-9 * 5);
  }
}

TEST_CASE("unit speed is conserved") {
  for (const WindField &field : testing::catalogue())
    for (double phi : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}) {
      const GeodesicPath p = integrate(field, initial_state(field, {0, 0.2}, phi), 20);
      CHECK(p.max_f_residual() <= 1e-6);
      for (const GeodesicState &s : p.samples)
        CHECK(std::abs(eval_F(field, s.pos, s.vel) - 1) <= 1e-6);
    }
}

TEST_CASE("path invariants") {
  const WindField q = WindField::quartic(0.8, 1);
  const ConvexityDomain dom = convexity_bound(q);
  for (const GeodesicPath &p : fan(q, FanSpec{{0, 1.2}, std::numbers::pi / 9, 0, 2 * pi, 10})) {
    for (std::size_t i = 1; i < p.samples.size(); ++i) {
      CHECK(p.samples[i].t > p.samples[i - 1].t);
      // ground speed is at most 1 + |W| < 2, steps at most max_step
      CHECK(distance(p.samples[i].pos, p.samples[i - 1].pos) <= 2 * IntegratorOptions{}.max_step);
    }
    for (const GeodesicState &s : p.samples) CHECK(std::abs(s.pos.y) <= dom.y_max);
  }
}

TEST_CASE("boundary termination") {
  const WindField s = WindField::shear();
  const GeodesicPath p = integrate(s, initial_state(s, {0, -0.5}, pi / 2), 50);
  CHECK(p.termination == Termination::domain_boundary);
  CHECK(p.back().pos.y > 0.999);
  CHECK(p.back().t < 50);
  for (const GeodesicState &st : p.samples) CHECK(std::abs(st.pos.y) < 1);
}

TEST_CASE("convergence order with fixed steps") {
  const WindField s = WindField::shear();
  const GeodesicState init = initial_state(s, {0, -0.3}, 0.7);
  IntegratorOptions ref_opts;
  ref_opts.rtol = ref_opts.atol = 1e-13;
  const Point ref = integrate(s, init, 1.0, ref_opts).back().pos;
  std::vector<double> hs = {0.1, 0.05, 0.025}, err;
  for (double h : hs) {
    IntegratorOptions o;
    o.fixed_step = h;
    o.renormalize = false;
    err.push_back(distance(integrate(s, init, 1.0, o).back().pos, ref));
  }
  for (std::size_t i = 1; i < hs.size(); ++i) {
    const double slope = std::log(err[i - 1] / err[i]) / std::log(hs[i - 1] / hs[i]);
    CHECK(slope >= 3.5);
  }
}

TEST_CASE("tighter tolerance moves the endpoint toward the reference") {
  const WindField s = WindField::quartic(0.8, 1);
  const GeodesicState init = initial_state(s, {0, 0.2}, 0.15);
  IntegratorOptions ref_opts;
  ref_opts.rtol = ref_opts.atol = 1e-13;
  const GeodesicPath ref_path = integrate(s, init, 3, ref_opts);
  REQUIRE(ref_path.termination == Termination::time_exhausted);
  const Point ref = ref_path.back().pos;
  double prev = 1e300;
  for (double tol : {1e-5, 1e-7, 1e-9, 1e-11}) {
    IntegratorOptions o;
    o.rtol = o.atol = tol;
    const double e = distance(integrate(s, init, 3, o).back().pos, ref);
    CHECK(e < prev);
    CHECK(e < 100 * tol);
    prev = e;
  }
}

TEST_CASE("dense output") {
  const WindField s = WindField::shear();
  GeodesicPath p = integrate(s, initial_state(s, {0, 0}, 0.4), 3);
  const GeodesicState mid = p.at(1.5);
  IntegratorOptions o;
  const GeodesicPath q = integrate(s, initial_state(s, {0, 0}, 0.4), 1.5, o);
  CHECK(distance(mid.pos, q.back().pos) < 1e-6);
  CHECK(p.at(-1).pos == p.front().pos);
  CHECK(p.at(99).pos == p.back().pos);
  const std::vector<Point> poly = p.polyline(0.01);
  CHECK(static_cast<double>(poly.size()) >= p.duration() / 0.01);
  p.truncate(1.5);
  CHECK(p.duration() == doctest::Approx(1.5));
  CHECK(distance(p.back().pos, mid.pos) < 1e-12);
}

TEST_CASE("fan") {
  const WindField s = WindField::shear();
  FanSpec spec;
  spec.start = {0, -0.5};
  const std::vector<GeodesicPath> paths = fan(s, spec);
  REQUIRE(paths.size() == 36);
  int count[4] = {0, 0, 0, 0};
  for (const GeodesicPath &p : paths) {
    ++count[quadrant_of(p.phi0)];
    for (const GeodesicState &st : p.samples) CHECK(std::abs(st.pos.y) < 1);
  }
  for (int c : count) CHECK(c == 9);

  FanSpec q = spec;
  q.phi_end = pi / 2;
  const auto quarter = fan(s, q);
  CHECK(quarter.size() == 9);
  for (const GeodesicPath &p : quarter) CHECK(quadrant_of(p.phi0) == 0);

  const auto serial = fan_serial(s, spec);
  REQUIRE(serial.size() == paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    REQUIRE(serial[i].samples.size() == paths[i].samples.size());
    CHECK(serial[i].back().pos == paths[i].back().pos);
    CHECK(serial[i].back().t == paths[i].back().t);
  }
  CHECK_THROWS_AS(fan(s, FanSpec{{0, 0}, 0.0}), BadParams);
}

TEST_CASE("quartic fan from the bank") {
  const WindField qw = WindField::quartic(0.8, 1);
  const double y0 = convexity_bound(qw).y_max;
  FanSpec spec;
  spec.start = {0, y0 - 1e-6};
  spec.t_max = 20;
  int entered = 0, returned = 0;
  for (const GeodesicPath &p : fan(qw, spec)) {
    double lowest = p.front().pos.y;
    for (const GeodesicState &st : p.samples) lowest = std::min(lowest, st.pos.y);
    if (lowest < y0 - 0.1) {
      ++entered;
      if (p.termination == Termination::domain_boundary) ++returned;
    }
  }
  CHECK(entered > 0);
  CHECK(returned > 0);
}

TEST_CASE("time fronts") {
  const auto z = time_front(WindField::zero(), {0, 0}, 1, 4);
  const Point want[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int i = 0; i < 4; ++i) CHECK(distance(z[i], want[i]) < 1e-9);
  const auto c = time_front(WindField::constant(0.5, 0), {0, 0}, 1, 4);
  for (int i = 0; i < 4; ++i) CHECK(distance(c[i], want[i] + Vec2{0.5, 0}) < 1e-9);

  // For small t the front is t times the indicatrix.
  const WindField s = WindField::shear();
  const double t = 1e-3;
  const auto f = time_front(s, {0, 0}, t, 36);
  const auto ind = indicatrix(s, {0, 0}, 36);
  for (int i = 0; i < 36; ++i) CHECK(distance(f[i], t * ind[i]) < t * t);
  for (const Point &p : time_front(s, {0, 0}, 1, 36)) CHECK(std::abs(p.y) < 1);
  CHECK_THROWS_AS(time_front(s, {0, 0}, 1, 3), BadParams);
}

TEST_CASE("integrator input errors") {
  const WindField s = WindField::shear();
  CHECK_THROWS_AS(integrate(s, {{0, 0}, {0, 0}, 0}, 1), ZeroVector);
  CHECK_THROWS_AS(integrate(s, initial_state(s, {0, 0}, 0), 0), BadParams);
  CHECK_THROWS_AS(initial_state(s, {0, 1.2}, 0), ConvexityViolation);
}
