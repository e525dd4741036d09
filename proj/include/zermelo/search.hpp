#pragma once

#include <string>
#include <variant>
#include <vector>

#include "zermelo/connector.hpp"

namespace zermelo {

enum class PatternKind { expanding_square, sector_search, creeping_line, parallel };

const char *to_string(PatternKind kind);
PatternKind pattern_kind_from_string(const std::string &name);

struct PatternParams {
  PatternKind kind = PatternKind::expanding_square;
  Point origin;              // commence search point / datum
  double heading = 0.0;      // radians, counter-clockwise from +x
  double spacing = 1.0;      // track spacing
  int legs = 10;             // expanding square: legs; creeping line / parallel: sweeps
  double radius = 0.0;       // sector search
  int sectors = 0;           // sector search
  double track_length = 0;   // creeping line / parallel: sweep length
};

struct SearchPattern {
  PatternParams params;
  std::vector<Point> waypoints;
};

/// Expanding square: legs 1,1,2,2,... x spacing with right-hand turns.
/// Sector search: `sectors` triangles datum -> rim -> rim -> datum, each
/// spanning 2 pi / sectors. Creeping line sweeps across the heading and
/// advances along it; parallel sweeps along the heading and steps sideways.
SearchPattern generate_pattern(const PatternParams &params);

struct RectDomain {
  Point center;
  double half_w = 0, half_h = 0;
  double angle = 0;
};

struct DiscDomain {
  Point center;
  double radius = 0;
};

using SearchDomain = std::variant<RectDomain, DiscDomain>;

/// Area the standard pattern is meant to cover at epsilon = spacing / 2.
SearchDomain nominal_domain(const SearchPattern &pattern);

struct SearchPlan {
  std::vector<GeodesicPath> legs;
  std::vector<Point> waypoints;  // legs.size() + 1 vertices, split points included
  std::vector<double> leg_phi0;
  std::vector<double> leg_times;
  double total_time = 0;
  double epsilon = 0;          // coverage parameter, spacing / 2 unless overridden
  double coverage_target = 0;  // distance bound plan_optimal actually enforced
  int iterations = 0;          // waypoint translation rounds used by plan_optimal
};

struct CoverageReport {
  bool complete = false;
  double worst_distance = 0;
  Point worst_point;
  std::size_t samples = 0;
};

/// Samples of the domain at which coverage is evaluated: grid x grid for
/// rectangles; for discs the same lattice clipped to the disc plus 4 grid rim points.
std::vector<Point> coverage_samples(const SearchDomain &domain, int grid);

/// Densified search path Gamma as polylines, one per leg.
std::vector<std::vector<Point>> plan_polylines(const SearchPlan &plan, double max_dt);

CoverageReport coverage_check(const SearchPlan &plan, const SearchDomain &domain, double epsilon,
                              int grid);
CoverageReport coverage_check_serial(const SearchPlan &plan, const SearchDomain &domain,
                                     double epsilon, int grid);

/// Straight over-ground legs; times from track_time.
SearchPlan plan_standard(const WindField &field, const SearchPattern &pattern, int n_seg = 256);

struct PlanOptions {
  ConnectOptions connect;
  int max_iters = 10;
  int max_split_depth = 4;
  int grid = 100;
  double epsilon = 0.0;  // <= 0: spacing / 2
  // Enforce max(epsilon, worst distance of the straight pattern) so that a
  // pattern which is itself incomplete at epsilon is not held to more than it delivers.
  bool match_standard = true;
  bool parallel = true;
};

/// Worst distance from the nominal domain to the straight pattern legs.
double standard_worst_distance(const SearchPattern &pattern, int grid = 100);

/// Geodesic legs between the pattern waypoints, with waypoint translation
/// toward coverage deficits until the plan is complete.
SearchPlan plan_optimal(const WindField &field, const SearchPattern &pattern,
                        const PlanOptions &opts = {});

struct PlanComparison {
  SearchPlan standard;
  SearchPlan optimal;
  CoverageReport standard_coverage;
  CoverageReport optimal_coverage;
  double saving = 0;  // relative time saving of the optimal plan
};

PlanComparison compare(const WindField &field, const SearchPattern &pattern,
                       const PlanOptions &opts = {});

}  // namespace zermelo
