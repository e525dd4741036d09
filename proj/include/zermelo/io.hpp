#pragma once

#include <initializer_list>
#include <string>
#include <vector>

#include "json.hpp"
#include "zermelo/finsler.hpp"
#include "zermelo/randers.hpp"
#include "zermelo/search.hpp"

namespace zermelo::io {

using json = nlohmann::json;

// All lengths are dimensionless and speeds are in units of the own speed |u| = 1.

/// Rejects any key of `obj` not listed in `allowed`.
void expect_keys(const json &obj, std::initializer_list<const char *> allowed,
                 const std::string &context);

Point point_from_json(const json &j, const std::string &context);
json point_to_json(const Point &p);

/// {"kind": "shear", "params": {"scale": 1}}; params per kind as in WindField.
WindField wind_from_json(const json &j);
json wind_to_json(const WindField &field);

PatternParams pattern_params_from_json(const json &j);
json pattern_params_to_json(const PatternParams &p);
json pattern_to_json(const SearchPattern &pattern);

/// Every leg keeps its full sample table, so re-import restores the plan bit for bit.
json plan_to_json(const SearchPlan &plan);
SearchPlan plan_from_json(const json &j);

json coverage_to_json(const CoverageReport &report);
json connect_to_json(const ConnectResult &r);

// CSV tables start with "# zermelo-csv v1 <table>" followed by the column row.
inline constexpr int kCsvVersion = 1;

std::string geodesic_csv(const GeodesicPath &path);
std::string fan_csv(const std::vector<GeodesicPath> &paths);
std::string front_csv(const std::vector<FrontPoint> &front);
std::string metric_csv(const WindField &field, const std::vector<TangentSample> &samples,
                       CurvatureMethod method);

/// Fan in the quadrant colours (blue, black, red, green for phi0 in
/// [0, pi/2), [pi/2, pi), [pi, 3pi/2), [3pi/2, 2pi)), one <path> per geodesic,
/// convexity bounds dashed.
std::string fan_svg(const WindField &field, const std::vector<GeodesicPath> &paths);
std::string pattern_svg(const WindField &field, const SearchPattern &pattern);
/// Standard pattern dashed, optimal legs solid (one <path> each), wind glyphs.
std::string plan_svg(const WindField &field, const SearchPattern &pattern,
                     const SearchPlan &optimal);

const char *quadrant_color(int quadrant);

}  // namespace zermelo::io
