#include "zermelo/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "zermelo/detail/parallel.hpp"
#include "zermelo/randers.hpp"

namespace zermelo {

const char *to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::expanding_square: return "expanding_square";
    case PatternKind::sector_search: return "sector_search";
    case PatternKind::creeping_line: return "creeping_line";
    case PatternKind::parallel: return "parallel";
  }
  return "?";
}

PatternKind pattern_kind_from_string(const std::string &name) {
  for (PatternKind k : {PatternKind::expanding_square, PatternKind::sector_search,
                        PatternKind::creeping_line, PatternKind::parallel})
    if (name == to_string(k)) return k;
  throw BadParams("unknown pattern kind '" + name + "'");
}

// ---------------------------------------------------------------------------
// Patterns

SearchPattern generate_pattern(const PatternParams &p) {
  if (!(p.spacing > 0.0)) throw BadParams("pattern spacing must be positive");
  SearchPattern out{p, {}};
  auto &wp = out.waypoints;
  const Vec2 e = unit(p.heading);
  const Vec2 n{-e.y, e.x};

  switch (p.kind) {
    case PatternKind::expanding_square: {
      if (p.legs < 1) throw BadParams("expanding square needs legs >= 1");
      Point pos = p.origin;
      Vec2 dir = e;
      wp.push_back(pos);
      for (int i = 1; i <= p.legs; ++i) {
        pos = pos + static_cast<double>((i + 1) / 2) * p.spacing * dir;
        wp.push_back(pos);
        dir = {dir.y, -dir.x};  // right turn
      }
      break;
    }
    case PatternKind::sector_search: {
      if (!(p.radius > 0.0) || p.sectors < 2)
        throw BadParams("sector search needs radius > 0 and sectors >= 2");
      const double width = 2.0 * std::numbers::pi / p.sectors;
      wp.push_back(p.origin);
      for (int i = 0; i < p.sectors; ++i) {
        const double theta = p.heading - i * width;
        wp.push_back(p.origin + p.radius * unit(theta));
        wp.push_back(p.origin + p.radius * unit(theta - width));
        wp.push_back(p.origin);
      }
      break;
    }
    case PatternKind::creeping_line:
    case PatternKind::parallel: {
      if (p.legs < 1) throw BadParams("sweep patterns need legs >= 1");
      if (!(p.track_length > 0.0)) throw BadParams("sweep patterns need track_length > 0");
      const bool creeping = p.kind == PatternKind::creeping_line;
      const Vec2 sweep = creeping ? n : e;
      const Vec2 step = creeping ? e : n;
      for (int i = 0; i < p.legs; ++i) {
        const Point base = p.origin + (i * p.spacing) * step;
        const Point far = base + p.track_length * sweep;
        if (i % 2 == 0) {
          wp.push_back(base);
          wp.push_back(far);
        } else {
          wp.push_back(far);
          wp.push_back(base);
        }
      }
      break;
    }
  }
  return out;
}

SearchDomain nominal_domain(const SearchPattern &pattern) {
  const auto &p = pattern.params;
  if (p.kind == PatternKind::sector_search) return DiscDomain{p.origin, p.radius};
  // Bounding box in the pattern frame. The closing leg of an expanding square
  // runs past the area it has covered, so its end point is left out.
  std::size_t count = pattern.waypoints.size();
  if (p.kind == PatternKind::expanding_square && count >= 4) --count;
  const Vec2 e = unit(p.heading), n{-e.y, e.x};
  double lo_e = std::numeric_limits<double>::infinity(), hi_e = -lo_e, lo_n = lo_e, hi_n = -lo_e;
  for (std::size_t i = 0; i < count; ++i) {
    const Vec2 d = pattern.waypoints[i] - p.origin;
    lo_e = std::min(lo_e, dot(d, e));
    hi_e = std::max(hi_e, dot(d, e));
    lo_n = std::min(lo_n, dot(d, n));
    hi_n = std::max(hi_n, dot(d, n));
  }
  RectDomain r;
  r.center = p.origin + (0.5 * (lo_e + hi_e)) * e + (0.5 * (lo_n + hi_n)) * n;
  r.half_w = 0.5 * (hi_e - lo_e);
  r.half_h = 0.5 * (hi_n - lo_n);
  r.angle = p.heading;
  return r;
}

// ---------------------------------------------------------------------------
// Coverage

std::vector<Point> coverage_samples(const SearchDomain &domain, int grid) {
  if (grid < 10) throw BadParams("coverage grid must be >= 10 per axis");
  std::vector<Point> out;
  auto lin = [grid](int i) { return -1.0 + 2.0 * i / (grid - 1); };
  if (const auto *r = std::get_if<RectDomain>(&domain)) {
    if (!(r->half_w >= 0.0) || !(r->half_h >= 0.0)) throw BadParams("rectangle extents must be >= 0");
    const Vec2 e = unit(r->angle), n{-e.y, e.x};
    out.reserve(static_cast<std::size_t>(grid) * static_cast<std::size_t>(grid));
    for (int j = 0; j < grid; ++j)
      for (int i = 0; i < grid; ++i)
        out.push_back(r->center + (lin(i) * r->half_w) * e + (lin(j) * r->half_h) * n);
    return out;
  }
  const auto &d = std::get<DiscDomain>(domain);
  if (!(d.radius > 0.0)) throw BadParams("disc radius must be positive");
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      const Vec2 v{lin(i), lin(j)};
      if (dot(v, v) <= 1.0) out.push_back(d.center + d.radius * v);
    }
  const int rim = 4 * grid;
  for (int k = 0; k < rim; ++k)
    out.push_back(d.center + d.radius * unit(2.0 * std::numbers::pi * k / rim));
  return out;
}

std::vector<std::vector<Point>> plan_polylines(const SearchPlan &plan, double max_dt) {
  std::vector<std::vector<Point>> out;
  out.reserve(plan.legs.size());
  for (const auto &leg : plan.legs) out.push_back(leg.polyline(max_dt));
  return out;
}

namespace {

struct Segment {
  Point a, b;
  std::size_t line;
};

struct Nearest {
  double distance = std::numeric_limits<double>::infinity();
  Point foot;
  std::size_t line = 0;
};

Nearest nearest_on_segment(const Segment &s, const Point &p) {
  const Vec2 ab = s.b - s.a;
  const double len2 = dot(ab, ab);
  double u = len2 > 0 ? dot(p - s.a, ab) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  const Point f = s.a + u * ab;
  return {distance(p, f), f, s.line};
}

// Uniform bucket grid over the segments; queries walk rings of cells outward.
class SegmentIndex {
 public:
  SegmentIndex(const std::vector<std::vector<Point>> &lines, double cell_hint) {
    for (std::size_t l = 0; l < lines.size(); ++l) {
      const auto &pl = lines[l];
      if (pl.size() == 1) segs_.push_back({pl[0], pl[0], l});
      for (std::size_t i = 0; i + 1 < pl.size(); ++i) segs_.push_back({pl[i], pl[i + 1], l});
    }
    if (segs_.empty()) return;
    lo_ = hi_ = segs_[0].a;
    for (const auto &s : segs_)
      for (const Point &q : {s.a, s.b}) {
        lo_ = {std::min(lo_.x, q.x), std::min(lo_.y, q.y)};
        hi_ = {std::max(hi_.x, q.x), std::max(hi_.y, q.y)};
      }
    const double extent = std::max({hi_.x - lo_.x, hi_.y - lo_.y, 1e-12});
    cell_ = std::max(cell_hint, extent / 256.0);
    nx_ = static_cast<int>((hi_.x - lo_.x) / cell_) + 1;
    ny_ = static_cast<int>((hi_.y - lo_.y) / cell_) + 1;
    buckets_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), {});
    for (std::size_t k = 0; k < segs_.size(); ++k) {
      const auto &s = segs_[k];
      const int i0 = cx(std::min(s.a.x, s.b.x)), i1 = cx(std::max(s.a.x, s.b.x));
      const int j0 = cy(std::min(s.a.y, s.b.y)), j1 = cy(std::max(s.a.y, s.b.y));
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i) buckets_[index(i, j)].push_back(k);
    }
  }

  bool empty() const { return segs_.empty(); }

  Nearest query(const Point &p) const {
    Nearest best;
    if (segs_.empty()) return best;
    const int ci = cx(p.x), cj = cy(p.y);
    // Cells on ring r are at least max(offset, (r - 1) cell) away, offset being
    // the distance from p to its clamped home cell.
    const double ox = std::max({lo_.x + ci * cell_ - p.x, p.x - (lo_.x + (ci + 1) * cell_), 0.0});
    const double oy = std::max({lo_.y + cj * cell_ - p.y, p.y - (lo_.y + (cj + 1) * cell_), 0.0});
    const double offset = std::hypot(ox, oy);
    const int max_ring = std::max(nx_, ny_);
    for (int r = 0; r <= max_ring; ++r) {
      if (r > 0 && best.distance <= std::max(offset, (r - 1) * cell_)) break;
      for (int j = cj - r; j <= cj + r; ++j) {
        if (j < 0 || j >= ny_) continue;
        const bool edge_row = j == cj - r || j == cj + r;
        for (int i = ci - r; i <= ci + r; i += edge_row ? 1 : 2 * r) {
          if (i >= 0 && i < nx_) {
            for (std::size_t k : buckets_[index(i, j)]) {
              const Nearest c = nearest_on_segment(segs_[k], p);
              if (c.distance < best.distance) best = c;
            }
          }
          if (r == 0) break;
        }
      }
    }
    return best;
  }

 private:
  int cx(double x) const { return std::clamp(static_cast<int>((x - lo_.x) / cell_), 0, nx_ - 1); }
  int cy(double y) const { return std::clamp(static_cast<int>((y - lo_.y) / cell_), 0, ny_ - 1); }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }

  std::vector<Segment> segs_;
  std::vector<std::vector<std::size_t>> buckets_;
  Point lo_, hi_;
  double cell_ = 1;
  int nx_ = 1, ny_ = 1;
};

double densify_dt(double epsilon) { return epsilon > 0 ? std::min(0.01, epsilon / 8) : 0.01; }

bool within(double d, double epsilon) { return d <= epsilon + 1e-9 * std::max(1.0, epsilon); }

struct CoverageDetail {
  std::vector<Point> samples;
  std::vector<Nearest> nearest;
  CoverageReport report;
};

CoverageDetail coverage_detail(const SearchPlan &plan, const SearchDomain &domain, double epsilon,
                               int grid, bool parallel) {
  if (!(epsilon >= 0.0)) throw BadParams("epsilon must be >= 0");
  CoverageDetail d;
  d.samples = coverage_samples(domain, grid);
  const auto lines = plan_polylines(plan, densify_dt(epsilon));
  const SegmentIndex index(lines, std::max(epsilon, 1e-6));
  d.nearest.resize(d.samples.size());
  auto body = [&](std::ptrdiff_t i) {
    const auto k = static_cast<std::size_t>(i);
    d.nearest[k] = index.query(d.samples[k]);
  };
  const auto n = static_cast<std::ptrdiff_t>(d.samples.size());
  if (parallel) {
    detail::parallel_for(n, body);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  }
  auto &r = d.report;
  r.samples = d.samples.size();
  r.worst_distance = d.samples.empty() ? 0.0 : -1.0;
  for (std::size_t k = 0; k < d.samples.size(); ++k) {
    if (d.nearest[k].distance > r.worst_distance) {
      r.worst_distance = d.nearest[k].distance;
      r.worst_point = d.samples[k];
    }
  }
  r.complete = within(r.worst_distance, epsilon);
  return d;
}

}  // namespace

CoverageReport coverage_check(const SearchPlan &plan, const SearchDomain &domain, double epsilon,
                              int grid) {
  return coverage_detail(plan, domain, epsilon, grid, true).report;
}

CoverageReport coverage_check_serial(const SearchPlan &plan, const SearchDomain &domain,
                                     double epsilon, int grid) {
  return coverage_detail(plan, domain, epsilon, grid, false).report;
}

// ---------------------------------------------------------------------------
// Plans

namespace {

GeodesicPath straight_leg(const WindField &field, const Point &a, const Point &b, int n_seg) {
  const double len = distance(a, b);
  if (len == 0.0) throw BadParams("pattern has a zero-length leg");
  const Vec2 e = (b - a) / len;
  GeodesicPath p;
  p.phi0 = crab_heading(field.eval(a), e);
  p.termination = Termination::target_reached;
  double t = 0.0;
  for (int k = 0; k <= n_seg; ++k) {
    const Point pos = k == n_seg ? b : a + (len * k / n_seg) * e;
    const Vec2 w = field.eval(pos);
    const double w_perp = cross(e, w);
    if (std::abs(w_perp) >= 1.0) throw InfeasibleTrack("cross-track wind reaches own speed");
    const Vec2 vel = (dot(w, e) + std::sqrt(1.0 - w_perp * w_perp)) * e;
    if (k > 0) t += track_time(field, p.samples.back().pos, pos, 1);
    p.samples.push_back({pos, vel, t});
    p.acc.push_back({0.0, 0.0});
    p.f_residual.push_back(randers_norm(w, vel) - 1.0);
  }
  return p;
}

void finish(SearchPlan &plan) {
  plan.leg_phi0.clear();
  plan.leg_times.clear();
  plan.total_time = 0.0;
  for (const auto &leg : plan.legs) {
    plan.leg_phi0.push_back(leg.phi0);
    plan.leg_times.push_back(leg.duration());
    plan.total_time += leg.duration();
  }
}

double chord_deviation(const GeodesicPath &path, const Point &a, const Point &b) {
  const Segment s{a, b, 0};
  double m = 0.0;
  for (const auto &st : path.samples) m = std::max(m, nearest_on_segment(s, st.pos).distance);
  return m;
}

struct Piece {
  Point from, to;
  GeodesicPath path;
};

void connect_split(const WindField &field, const Point &a, const Point &b, int depth,
                   double max_bow, const PlanOptions &opts, std::vector<Piece> &out) {
  ConnectResult r = opts.parallel ? connect(field, a, b, opts.connect)
                                  : connect_serial(field, a, b, opts.connect);
  if (depth < opts.max_split_depth && chord_deviation(r.path, a, b) > max_bow) {
    const Point mid = 0.5 * (a + b);
    connect_split(field, a, mid, depth + 1, max_bow, opts, out);
    connect_split(field, mid, b, depth + 1, max_bow, opts, out);
    return;
  }
  out.push_back({a, b, std::move(r.path)});
}

}  // namespace

SearchPlan plan_standard(const WindField &field, const SearchPattern &pattern, int n_seg) {
  if (n_seg < 1) throw BadParams("n_seg must be >= 1");
  SearchPlan plan;
  plan.waypoints = pattern.waypoints;
  plan.epsilon = 0.5 * pattern.params.spacing;
  plan.coverage_target = plan.epsilon;
  for (std::size_t i = 0; i + 1 < pattern.waypoints.size(); ++i)
    plan.legs.push_back(straight_leg(field, pattern.waypoints[i], pattern.waypoints[i + 1], n_seg));
  finish(plan);
  return plan;
}

namespace {

Point domain_center(const SearchDomain &domain) {
  return std::visit([](const auto &d) { return d.center; }, domain);
}

// Moves the waypoints so that the pattern legs bounding each uncovered sample
// close in on it. A deficit is charged to the outermost leg that has the
// sample on its inner side, so corrections propagate toward the outer ring
// (whose outward margin absorbs them) instead of reopening the gap behind.
void translate_toward_deficits(const SearchPlan &plan, const std::vector<std::size_t> &parent,
                               const CoverageDetail &cov, const Point &center, double target,
                               std::vector<Point> &wps) {
  const std::size_t n_legs = wps.size() - 1;
  const auto lines = plan_polylines(plan, densify_dt(target));
  std::vector<Vec2> normal(n_legs);
  for (std::size_t j = 0; j < n_legs; ++j) {
    const Vec2 e = normalized(wps[j + 1] - wps[j]);
    normal[j] = {-e.y, e.x};
  }
  std::vector<double> deficit(n_legs, 0.0);
  std::vector<Vec2> toward(n_legs, Vec2{0.0, 0.0});
  for (std::size_t k = 0; k < cov.samples.size(); ++k) {
    const Nearest &nr = cov.nearest[k];
    if (within(nr.distance, target)) continue;
    const Point a = cov.samples[k];
    std::vector<Nearest> near(n_legs);
    for (std::size_t l = 0; l < lines.size(); ++l)
      for (std::size_t i = 0; i + 1 < lines[l].size(); ++i) {
        const Nearest c = nearest_on_segment({lines[l][i], lines[l][i + 1], l}, a);
        if (c.distance < near[parent[l]].distance) near[parent[l]] = c;
      }
    std::size_t pick = parent[nr.line];
    double reach = -1.0;
    for (std::size_t j = 0; j < n_legs; ++j) {
      if (near[j].distance > nr.distance + 0.25 * target) continue;
      if (dot(a - near[j].foot, center - near[j].foot) <= 0.0) continue;
      const double r = distance(near[j].foot, center);
      if (r > reach) {
        reach = r;
        pick = j;
      }
    }
    const double gap = nr.distance - target;
    if (gap > deficit[pick]) {
      deficit[pick] = gap;
      toward[pick] = dot(a - near[pick].foot, normal[pick]) >= 0.0 ? normal[pick] : -1.0 * normal[pick];
    }
  }
  std::vector<Vec2> shift(wps.size(), Vec2{0.0, 0.0});
  for (std::size_t j = 0; j < n_legs; ++j) {
    if (deficit[j] <= 0.0) continue;
    const Vec2 d = (deficit[j] + 0.05 * target) * toward[j];
    shift[j] = shift[j] + d;
    shift[j + 1] = shift[j + 1] + d;
  }
  for (std::size_t k = 0; k < wps.size(); ++k) wps[k] = wps[k] + shift[k];
}

}  // namespace

double standard_worst_distance(const SearchPattern &pattern, int grid) {
  const SearchPlan straight = plan_standard(WindField::zero(), pattern, 1);
  return coverage_detail(straight, nominal_domain(pattern), 0.0, grid, true).report.worst_distance;
}

SearchPlan plan_optimal(const WindField &field, const SearchPattern &pattern,
                        const PlanOptions &opts) {
  if (opts.max_iters < 0) throw BadParams("max_iters must be >= 0");
  if (pattern.waypoints.size() < 2) throw BadParams("pattern needs at least two waypoints");
  const double epsilon = opts.epsilon > 0.0 ? opts.epsilon : 0.5 * pattern.params.spacing;
  const SearchDomain domain = nominal_domain(pattern);
  const double target =
      opts.match_standard ? std::max(epsilon, standard_worst_distance(pattern, opts.grid)) : epsilon;
  std::vector<Point> wps = pattern.waypoints;
  const std::size_t n_legs = wps.size() - 1;

  for (int iter = 0;; ++iter) {
    std::vector<std::vector<Piece>> pieces(n_legs);
    auto body = [&](std::ptrdiff_t j) {
      const auto k = static_cast<std::size_t>(j);
      connect_split(field, wps[k], wps[k + 1], 0, std::ldexp(target, -iter), opts, pieces[k]);
    };
    if (opts.parallel) {
      detail::parallel_for(static_cast<std::ptrdiff_t>(n_legs), body);
    } else {
      for (std::size_t j = 0; j < n_legs; ++j) body(static_cast<std::ptrdiff_t>(j));
    }

    SearchPlan plan;
    plan.epsilon = epsilon;
    plan.coverage_target = target;
    plan.iterations = iter;
    std::vector<std::size_t> parent;  // pattern leg of each plan leg
    plan.waypoints.push_back(wps.front());
    for (std::size_t j = 0; j < n_legs; ++j)
      for (auto &pc : pieces[j]) {
        plan.waypoints.push_back(pc.to);
        plan.legs.push_back(std::move(pc.path));
        parent.push_back(j);
      }
    finish(plan);

    const CoverageDetail cov = coverage_detail(plan, domain, target, opts.grid, opts.parallel);
    if (cov.report.complete) return plan;
    if (iter >= opts.max_iters)
      throw CoverageUnreachable("coverage deficit " +
                                std::to_string(cov.report.worst_distance - target) +
                                " remains after " + std::to_string(iter) + " translation rounds");
    translate_toward_deficits(plan, parent, cov, domain_center(domain), target, wps);
  }
}

PlanComparison compare(const WindField &field, const SearchPattern &pattern,
                       const PlanOptions &opts) {
  PlanComparison c;
  c.standard = plan_standard(field, pattern);
  c.optimal = plan_optimal(field, pattern, opts);
  const SearchDomain domain = nominal_domain(pattern);
  c.standard_coverage = coverage_check(c.standard, domain, c.standard.epsilon, opts.grid);
  c.optimal_coverage = coverage_check(c.optimal, domain, c.optimal.epsilon, opts.grid);
  c.saving = (c.standard.total_time - c.optimal.total_time) / c.standard.total_time;
  return c;
}

}  // namespace zermelo
