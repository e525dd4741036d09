#include "zermelo/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace zermelo::io {

void expect_keys(const json &obj, std::initializer_list<const char *> allowed,
                 const std::string &context) {
  if (!obj.is_object()) throw BadParams(context + " must be an object");
  for (const auto &item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char *k) { return item.key() == k; });
    if (!known) throw BadParams("unknown key '" + item.key() + "' in " + context);
  }
}

namespace {

double number(const json &obj, const char *key, const std::string &context) {
  if (!obj.contains(key)) throw BadParams(context + " is missing '" + key + "'");
  const json &v = obj.at(key);
  if (!v.is_number()) throw BadParams(context + "." + key + " must be a number");
  return v.get<double>();
}

double number_or(const json &obj, const char *key, double fallback, const std::string &context) {
  return obj.contains(key) ? number(obj, key, context) : fallback;
}

int integer_or(const json &obj, const char *key, int fallback, const std::string &context) {
  if (!obj.contains(key)) return fallback;
  const json &v = obj.at(key);
  if (!v.is_number_integer()) throw BadParams(context + "." + key + " must be an integer");
  return v.get<int>();
}

Termination termination_from_string(const std::string &s) {
  for (Termination t : {Termination::time_exhausted, Termination::domain_boundary,
                        Termination::target_reached})
    if (s == to_string(t)) return t;
  throw BadParams("unknown termination '" + s + "'");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Point point_from_json(const json &j, const std::string &context) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw BadParams(context + " must be a [x, y] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

json point_to_json(const Point &p) { return json::array({p.x, p.y}); }

WindField wind_from_json(const json &j) {
  expect_keys(j, {"kind", "params"}, "wind");
  if (!j.contains("kind") || !j.at("kind").is_string()) throw BadParams("wind.kind must be a string");
  const WindKind kind = wind_kind_from_string(j.at("kind").get<std::string>());
  const json params = j.contains("params") ? j.at("params") : json::object();
  const std::string ctx = "wind.params";
  switch (kind) {
    case WindKind::zero:
      expect_keys(params, {}, ctx);
      return WindField::zero();
    case WindKind::shear:
      expect_keys(params, {"scale"}, ctx);
      return WindField::shear(number_or(params, "scale", 1.0, ctx));
    case WindKind::quartic:
      expect_keys(params, {"a", "b", "scale"}, ctx);
      return WindField::quartic(number(params, "a", ctx), number(params, "b", ctx),
                                number_or(params, "scale", 1.0, ctx));
    case WindKind::gaussian:
      expect_keys(params, {"a", "b", "c", "scale"}, ctx);
      return WindField::gaussian(number(params, "a", ctx), number(params, "b", ctx),
                                 number(params, "c", ctx), number_or(params, "scale", 1.0, ctx));
    case WindKind::constant:
      expect_keys(params, {"p", "q"}, ctx);
      return WindField::constant(number(params, "p", ctx), number(params, "q", ctx));
    case WindKind::custom:
      break;
  }
  throw BadParams("custom winds cannot be described in a scenario");
}

json wind_to_json(const WindField &field) {
  const auto &p = field.params();
  json params = json::object();
  switch (field.kind()) {
    case WindKind::zero: break;
    case WindKind::shear: params = {{"scale", p.scale}}; break;
    case WindKind::quartic: params = {{"a", p.a}, {"b", p.b}, {"scale", p.scale}}; break;
    case WindKind::gaussian:
      params = {{"a", p.a}, {"b", p.b}, {"c", p.c}, {"scale", p.scale}};
      break;
    case WindKind::constant: params = {{"p", p.p}, {"q", p.q}}; break;
    case WindKind::custom: break;
  }
  return {{"kind", to_string(field.kind())}, {"params", params}};
}

PatternParams pattern_params_from_json(const json &j) {
  const std::string ctx = "pattern";
  expect_keys(j, {"kind", "origin", "heading", "spacing", "legs", "radius", "sectors", "track_length"},
              ctx);
  PatternParams p;
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw BadParams("pattern.kind must be a string");
  p.kind = pattern_kind_from_string(j.at("kind").get<std::string>());
  if (j.contains("origin")) p.origin = point_from_json(j.at("origin"), "pattern.origin");
  p.heading = number_or(j, "heading", 0.0, ctx);
  p.spacing = number_or(j, "spacing", 1.0, ctx);
  p.legs = integer_or(j, "legs", 10, ctx);
  p.radius = number_or(j, "radius", 0.0, ctx);
  p.sectors = integer_or(j, "sectors", 0, ctx);
  p.track_length = number_or(j, "track_length", 0.0, ctx);
  return p;
}

json pattern_params_to_json(const PatternParams &p) {
  return {{"kind", to_string(p.kind)}, {"origin", point_to_json(p.origin)},
          {"heading", p.heading},      {"spacing", p.spacing},
          {"legs", p.legs},            {"radius", p.radius},
          {"sectors", p.sectors},      {"track_length", p.track_length}};
}

json pattern_to_json(const SearchPattern &pattern) {
  json wps = json::array();
  for (const Point &w : pattern.waypoints) wps.push_back(point_to_json(w));
  return {{"params", pattern_params_to_json(pattern.params)}, {"waypoints", wps}};
}

json plan_to_json(const SearchPlan &plan) {
  json wps = json::array();
  for (const Point &w : plan.waypoints) wps.push_back(point_to_json(w));
  json legs = json::array();
  for (std::size_t i = 0; i < plan.legs.size(); ++i) {
    const GeodesicPath &p = plan.legs[i];
    json rows = json::array();
    for (std::size_t k = 0; k < p.samples.size(); ++k) {
      const auto &s = p.samples[k];
      rows.push_back({s.t, s.pos.x, s.pos.y, s.vel.x, s.vel.y, p.acc[k].x, p.acc[k].y,
                      p.f_residual[k]});
    }
    legs.push_back({{"phi0", plan.leg_phi0[i]},
                    {"time", plan.leg_times[i]},
                    {"path_phi0", p.phi0},
                    {"termination", to_string(p.termination)},
                    {"samples", rows}});
  }
  return {{"version", 1},
          {"columns", {"t", "x", "y", "u", "v", "ax", "ay", "f_residual"}},
          {"epsilon", plan.epsilon},
          {"coverage_target", plan.coverage_target},
          {"iterations", plan.iterations},
          {"total_time", plan.total_time},
          {"waypoints", wps},
          {"legs", legs}};
}

SearchPlan plan_from_json(const json &j) {
  expect_keys(j, {"version", "columns", "epsilon", "coverage_target", "iterations", "total_time",
                  "waypoints", "legs"},
              "plan");
  if (integer_or(j, "version", 0, "plan") != 1) throw BadParams("unsupported plan version");
  SearchPlan plan;
  plan.epsilon = number(j, "epsilon", "plan");
  plan.coverage_target = number_or(j, "coverage_target", plan.epsilon, "plan");
  plan.iterations = integer_or(j, "iterations", 0, "plan");
  plan.total_time = number(j, "total_time", "plan");
  for (const json &w : j.at("waypoints")) plan.waypoints.push_back(point_from_json(w, "waypoint"));
  for (const json &leg : j.at("legs")) {
    expect_keys(leg, {"phi0", "time", "path_phi0", "termination", "samples"}, "plan leg");
    GeodesicPath p;
    p.phi0 = number(leg, "path_phi0", "plan leg");
    p.termination = termination_from_string(leg.at("termination").get<std::string>());
    for (const json &r : leg.at("samples")) {
      if (!r.is_array() || r.size() != 8) throw BadParams("plan leg sample needs 8 columns");
      p.samples.push_back({{r[1].get<double>(), r[2].get<double>()},
                           {r[3].get<double>(), r[4].get<double>()},
                           r[0].get<double>()});
      p.acc.push_back({r[5].get<double>(), r[6].get<double>()});
      p.f_residual.push_back(r[7].get<double>());
    }
    plan.leg_phi0.push_back(number(leg, "phi0", "plan leg"));
    plan.leg_times.push_back(number(leg, "time", "plan leg"));
    plan.legs.push_back(std::move(p));
  }
  if (!plan.legs.empty() && plan.waypoints.size() != plan.legs.size() + 1)
    throw BadParams("plan needs one more waypoint than legs");
  return plan;
}

json coverage_to_json(const CoverageReport &r) {
  json worst = std::isfinite(r.worst_distance) ? json(r.worst_distance) : json("inf");
  return {{"complete", r.complete},
          {"worst_distance", worst},
          {"worst_point", point_to_json(r.worst_point)},
          {"samples", r.samples}};
}

json connect_to_json(const ConnectResult &r) {
  json path = json::array();
  for (const auto &s : r.path.samples) path.push_back({s.t, s.pos.x, s.pos.y});
  return {{"phi0", r.phi0},
          {"time", r.time},
          {"miss", r.miss},
          {"start", point_to_json(r.path.front().pos)},
          {"end", point_to_json(r.path.back().pos)},
          {"max_f_residual", r.path.max_f_residual()},
          {"columns", {"t", "x", "y"}},
          {"path", path}};
}

// ---------------------------------------------------------------------------
// CSV

namespace {

std::string csv_header(const char *table, const char *columns) {
  return "# zermelo-csv v" + std::to_string(kCsvVersion) + " " + table + "\n" + columns + "\n";
}

}  // namespace

std::string geodesic_csv(const GeodesicPath &path) {
  std::string out = csv_header("geodesic", "t,x,y,u,v,f_residual");
  for (std::size_t k = 0; k < path.samples.size(); ++k) {
    const auto &s = path.samples[k];
    out += num(s.t) + "," + num(s.pos.x) + "," + num(s.pos.y) + "," + num(s.vel.x) + "," +
           num(s.vel.y) + "," + num(path.f_residual[k]) + "\n";
  }
  return out;
}

std::string fan_csv(const std::vector<GeodesicPath> &paths) {
  std::string out = csv_header("fan", "path,phi0,quadrant,termination,t,x,y");
  for (std::size_t i = 0; i < paths.size(); ++i) {
    const auto &p = paths[i];
    const std::string head = std::to_string(i) + "," + num(p.phi0) + "," +
                             std::to_string(quadrant_of(p.phi0)) + "," + to_string(p.termination);
    for (const auto &s : p.samples) out += head + "," + num(s.t) + "," + num(s.pos.x) + "," + num(s.pos.y) + "\n";
  }
  return out;
}

std::string front_csv(const std::vector<FrontPoint> &front) {
  std::string out = csv_header("front", "k,phi0,x,y,t,termination");
  for (std::size_t k = 0; k < front.size(); ++k) {
    const auto &f = front[k];
    out += std::to_string(k) + "," + num(f.phi0) + "," + num(f.pos.x) + "," + num(f.pos.y) + "," +
           num(f.t) + "," + to_string(f.termination) + "\n";
  }
  return out;
}

std::string metric_csv(const WindField &field, const std::vector<TangentSample> &samples,
                       CurvatureMethod method) {
  std::string out = csv_header(
      "metric", "x,y,u,v,F,alpha,beta,g11,g12,g22,det,K,flat_F_x,flat_F_y,flat_alpha_x,flat_alpha_y");
  for (const auto &s : samples) {
    const AlphaBeta ab = eval_alpha_beta(field, s.pos, s.vel);
    const FundamentalTensor ft = fundamental_tensor(field, s);
    const double K = gauss_curvature(field, s, method);
    const Vec2 rf = projective_flatness_residual(field, s, MetricPart::randers);
    const Vec2 ra = projective_flatness_residual(field, s, MetricPart::alpha);
    out += num(s.pos.x) + "," + num(s.pos.y) + "," + num(s.vel.x) + "," + num(s.vel.y) + "," +
           num(ab.alpha + ab.beta) + "," + num(ab.alpha) + "," + num(ab.beta) + "," +
           num(ft.g(0, 0)) + "," + num(ft.g(0, 1)) + "," + num(ft.g(1, 1)) + "," + num(ft.det) +
           "," + num(K) + "," + num(rf.x) + "," + num(rf.y) + "," + num(ra.x) + "," + num(ra.y) +
           "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// SVG

const char *quadrant_color(int quadrant) {
  static const char *colors[] = {"#1f3fbf", "#000000", "#c8102e", "#1a8c3a"};
  return colors[((quadrant % 4) + 4) % 4];
}

namespace {

class Canvas {
 public:
  explicit Canvas(std::vector<Point> extent) {
    lo_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    hi_ = -1.0 * lo_;
    for (const Point &p : extent) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) continue;
      lo_ = {std::min(lo_.x, p.x), std::min(lo_.y, p.y)};
      hi_ = {std::max(hi_.x, p.x), std::max(hi_.y, p.y)};
    }
    if (!(lo_.x <= hi_.x)) lo_ = {-1, -1}, hi_ = {1, 1};
    const double span = std::max({hi_.x - lo_.x, hi_.y - lo_.y, 1e-9});
    const Vec2 pad{0.05 * span, 0.05 * span};
    lo_ = lo_ - pad;
    hi_ = hi_ + pad;
    scale_ = kWidth / (hi_.x - lo_.x);
    height_ = std::max(1.0, (hi_.y - lo_.y) * scale_);
  }

  double xmin() const { return lo_.x; }
  double xmax() const { return hi_.x; }
  double ymin() const { return lo_.y; }
  double ymax() const { return hi_.y; }

  void path(const std::vector<Point> &pts, const char *color, double width, const std::string &cls,
            bool dashed = false) {
    if (pts.empty()) return;
    body_ << "<path class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"" << width << "\"";
    if (dashed) body_ << " stroke-dasharray=\"6,4\"";
    body_ << " d=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " L" : "M") << px(pts[i]);
    body_ << "\"/>\n";
  }

  void polyline(const std::vector<Point> &pts, const char *color, double width, bool dashed,
                const std::string &cls) {
    body_ << "<polyline class=\"" << cls << "\" fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"" << width << "\"";
    if (dashed) body_ << " stroke-dasharray=\"6,4\"";
    body_ << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) body_ << (i ? " " : "") << px(pts[i]);
    body_ << "\"/>\n";
  }

  void line(const Point &a, const Point &b, const char *color, double width, bool dashed,
            const std::string &cls) {
    const std::string pa = px(a), pb = px(b);
    body_ << "<line class=\"" << cls << "\" x1=\"" << pa.substr(0, pa.find(','))
          << "\" y1=\"" << pa.substr(pa.find(',') + 1) << "\" x2=\"" << pb.substr(0, pb.find(','))
          << "\" y2=\"" << pb.substr(pb.find(',') + 1) << "\" stroke=\"" << color
          << "\" stroke-width=\"" << width << "\"";
    if (dashed) body_ << " stroke-dasharray=\"6,4\"";
    body_ << "/>\n";
  }

  void circle(const Point &c, double r, const char *color, const std::string &cls) {
    const std::string p = px(c);
    body_ << "<circle class=\"" << cls << "\" cx=\"" << p.substr(0, p.find(',')) << "\" cy=\""
          << p.substr(p.find(',') + 1) << "\" r=\"" << r << "\" fill=\"" << color << "\"/>\n";
  }

  // Dashed horizontal lines at the finite convexity bounds inside the view.
  void convexity_bounds(const WindField &field) {
    const ConvexityDomain d = convexity_bound(field);
    for (double y : {d.y_min, d.y_max})
      if (std::isfinite(y) && y >= lo_.y && y <= hi_.y)
        line({lo_.x, y}, {hi_.x, y}, "#808080", 1.0, true, "boundary");
  }

  // Arrows of the wind on a coarse lattice, scaled so |W| = 1 spans one cell.
  void wind_glyphs(const WindField &field, int n = 8) {
    const double cell = (hi_.x - lo_.x) / n;
    const ConvexityDomain d = convexity_bound(field);
    for (int j = 0; j <= n; ++j)
      for (int i = 0; i <= n; ++i) {
        const Point p{lo_.x + (i + 0.5) * cell, lo_.y + (j + 0.5) * cell};
        if (p.x > hi_.x || p.y > hi_.y || !d.contains(p)) continue;
        const Vec2 w = field.eval(p);
        if (norm(w) < 1e-12) continue;
        const Point tip = p + 0.8 * cell * w;
        line(p, tip, "#7a9cc6", 0.8, false, "wind");
        circle(tip, 1.5, "#7a9cc6", "wind");
      }
  }

  std::string str() const {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
        << "\" height=\"" << static_cast<int>(std::ceil(height_)) << "\" viewBox=\"0 0 " << kWidth
        << " " << static_cast<int>(std::ceil(height_)) << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n"
        << body_.str() << "</svg>\n";
    return out.str();
  }

 private:
  static constexpr double kWidth = 800;

  std::string px(const Point &p) const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f", (p.x - lo_.x) * scale_, (hi_.y - p.y) * scale_);
    return buf;
  }

  Point lo_, hi_;
  double scale_ = 1, height_ = 1;
  std::ostringstream body_;
};

std::vector<Point> positions(const GeodesicPath &p) {
  std::vector<Point> pts;
  pts.reserve(p.samples.size());
  for (const auto &s : p.samples) pts.push_back(s.pos);
  return pts;
}

}  // namespace

std::string fan_svg(const WindField &field, const std::vector<GeodesicPath> &paths) {
  std::vector<Point> extent;
  for (const auto &p : paths)
    for (const auto &s : p.samples) extent.push_back(s.pos);
  const ConvexityDomain d = convexity_bound(field);
  for (double y : {d.y_min, d.y_max})
    if (std::isfinite(y) && !extent.empty()) extent.push_back({extent.front().x, y});
  Canvas c(extent);
  c.convexity_bounds(field);
  for (const auto &p : paths) {
    const int q = quadrant_of(p.phi0);
    c.path(positions(p), quadrant_color(q), 1.2, "geodesic q" + std::to_string(q));
  }
  if (!paths.empty() && !paths.front().samples.empty())
    c.circle(paths.front().front().pos, 3.0, "#000000", "start");
  return c.str();
}

std::string pattern_svg(const WindField &field, const SearchPattern &pattern) {
  Canvas c(pattern.waypoints);
  c.convexity_bounds(field);
  c.wind_glyphs(field);
  c.polyline(pattern.waypoints, "#1f3fbf", 1.2, true, "standard");
  for (const Point &w : pattern.waypoints) c.circle(w, 2.0, "#1f3fbf", "waypoint");
  return c.str();
}

std::string plan_svg(const WindField &field, const SearchPattern &pattern,
                     const SearchPlan &optimal) {
  std::vector<Point> extent = pattern.waypoints;
  for (const auto &leg : optimal.legs)
    for (const auto &s : leg.samples) extent.push_back(s.pos);
  Canvas c(extent);
  c.convexity_bounds(field);
  c.wind_glyphs(field);
  c.polyline(pattern.waypoints, "#1f3fbf", 1.0, true, "standard");
  for (const auto &leg : optimal.legs) c.path(positions(leg), "#1a8c3a", 1.4, "optimal");
  for (const Point &w : optimal.waypoints) c.circle(w, 2.0, "#1a8c3a", "waypoint");
  return c.str();
}

}  // namespace zermelo::io
