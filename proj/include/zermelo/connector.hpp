#pragma once

#include "zermelo/geodesic.hpp"

namespace zermelo {

struct ConnectOptions {
  double pos_tol = 1e-6;
  int seed_angles = 72;
  double horizon = 0.0;  // integration time per seed; <= 0 picks one from track_time
  int max_iters = 80;
  IntegratorOptions integrator;
};

struct ConnectResult {
  double phi0 = 0;
  GeodesicPath path;
  double time = 0;
  double miss = 0;
};

/// Closest approach of a path to a point, found on the dense output.
struct ClosestApproach {
  double t = 0;
  Point pos;
  double distance = 0;
  double signed_miss = 0;  // > 0 when the target lies left of the direction of travel
  bool interior = false;   // false when the minimum sits at an end of the path
};

ClosestApproach closest_approach(const GeodesicPath &path, const Point &target);

/// Least-time geodesic from -> to by multistart shooting on the initial angle.
ConnectResult connect(const WindField &field, const Point &from, const Point &to,
                      const ConnectOptions &opts = {});
ConnectResult connect_serial(const WindField &field, const Point &from, const Point &to,
                             const ConnectOptions &opts = {});

/// Time to hold the straight track from -> to over ground, crabbing into the
/// cross wind on each of n_seg pieces (wind sampled at the piece midpoint).
double track_time(const WindField &field, const Point &from, const Point &to, int n_seg = 256);

/// Own heading that keeps the resultant along `dir` against wind w.
double crab_heading(const Vec2 &w, const Vec2 &dir);

}  // namespace zermelo
