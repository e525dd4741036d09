#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

#include "zermelo/vec2.hpp"
#include "zermelo/wind.hpp"

namespace zermelo {

/// Phase-space state; unit Finsler speed makes t the travel time.
struct GeodesicState {
  Point pos;
  Vec2 vel;
  double t = 0;
};

enum class Termination { time_exhausted, domain_boundary, target_reached };

const char *to_string(Termination t);

struct GeodesicPath {
  std::vector<GeodesicState> samples;
  std::vector<Vec2> acc;            // -2 (G, H) at each sample, for dense output
  std::vector<double> f_residual;   // F(pos, vel) - 1 before renormalisation
  double phi0 = 0;
  Termination termination = Termination::time_exhausted;

  double duration() const { return samples.empty() ? 0.0 : samples.back().t; }
  const GeodesicState &front() const { return samples.front(); }
  const GeodesicState &back() const { return samples.back(); }
  double max_f_residual() const;

  /// Cubic Hermite dense output, t clamped to [0, duration()].
  GeodesicState at(double t) const;
  /// Keeps the path up to t (inclusive), appending the interpolated state.
  void truncate(double t);
  /// Positions with dense-output points inserted so no gap exceeds max_dt in time.
  std::vector<Point> polyline(double max_dt) const;
};

/// Quadrant class of an initial angle: floor(2 phi0 / pi) mod 4.
int quadrant_of(double phi0);

struct IntegratorOptions {
  double rtol = 1e-9;
  double atol = 1e-9;
  double initial_step = 1e-2;
  double max_step = 0.1;
  double min_step = 1e-14;
  double fixed_step = 0.0;  // > 0 disables step control (convergence studies)
  double event_time_tol = 1e-10;
  std::size_t max_steps = 2'000'000;
  bool renormalize = true;
};

GeodesicState initial_state(const WindField &field, const Point &start, double phi0);

/// Solves x'' = -2 G, y'' = -2 H with Dormand-Prince 5(4) and PI step control.
/// Stops at t_max or at the crossing of the open convexity domain, located
/// by bisection on the step length to `event_time_tol`.
GeodesicPath integrate(const WindField &field, const GeodesicState &init, double t_max,
                       const IntegratorOptions &opts = {});

struct FanSpec {
  Point start;
  double d_phi = std::numbers::pi / 18;
  double phi_begin = 0.0;
  double phi_end = 2 * std::numbers::pi;  // half-open
  double t_max = 5.0;
};

std::vector<double> fan_angles(const FanSpec &spec);

std::vector<GeodesicPath> fan(const WindField &field, const FanSpec &spec,
                              const IntegratorOptions &opts = {});
std::vector<GeodesicPath> fan_serial(const WindField &field, const FanSpec &spec,
                                     const IntegratorOptions &opts = {});

struct FrontPoint {
  double phi0 = 0;
  Point pos;
  double t = 0;  // < requested t when the geodesic left the domain first
  Termination termination = Termination::time_exhausted;
};

std::vector<FrontPoint> time_front_detailed(const WindField &field, const Point &start, double t,
                                            int n, const IntegratorOptions &opts = {});
/// Endpoints at elapsed time t of n geodesics fanned uniformly in phi0.
std::vector<Point> time_front(const WindField &field, const Point &start, double t, int n,
                              const IntegratorOptions &opts = {});

}  // namespace zermelo
