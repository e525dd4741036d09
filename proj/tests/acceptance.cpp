// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "oracles.hpp"
#include "support.hpp"
#include "zermelo/cli.hpp"
#include "zermelo/connector.hpp"
#include "zermelo/finsler.hpp"
#include "zermelo/geodesic.hpp"
#include "zermelo/randers.hpp"
#include "zermelo/search.hpp"

using namespace zermelo;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

struct Criterion {
  int id;
  const char *title;
  double budget_s;
  std::function<Outcome()> body;
};

std::string fmt(const char *f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt2(const char *f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

const WindField kShear = WindField::shear();

Outcome curvature_spots() {
  const double r = 1 / std::sqrt(2.0), h = std::sqrt(3.0) / 2;
  const TangentSample a{{0, 0}, {r, r}}, b{{0, -0.5}, {0, h}};
  double exact = 0, fd = 0;
  for (CurvatureMethod m : {CurvatureMethod::exact, CurvatureMethod::automatic}) {
    exact = std::max(exact, std::abs(gauss_curvature(kShear, a, m) + 9.0 / 16.0));
    exact = std::max(exact, std::abs(gauss_curvature(kShear, b, m) + 15.0 / 64.0));
  }
  fd = std::max(std::abs(gauss_curvature(kShear, a, CurvatureMethod::finite_difference) + 9.0 / 16.0),
                std::abs(gauss_curvature(kShear, b, CurvatureMethod::finite_difference) + 15.0 / 64.0));
  return {exact <= 1e-9 && fd <= 1e-5, fmt2("closed-form error %.2e, finite-difference error %.2e", exact, fd)};
}

Outcome curvature_extremes() {
  double lo = 1e300, hi = -1e300, at = 0;
  for (const CurvatureSample &c : curvature_profile(kShear, {0, -0.5}, 3600)) {
    lo = std::min(lo, c.K);
    if (c.K > hi) {
      hi = c.K;
      at = c.angle;
    }
  }
  const bool ok = std::abs(lo + 1.5) <= 1e-3 && hi < 0;
  std::string d = fmt2("min K %.9f, max K %.3e", lo, hi) + fmt(" at theta %.6f", at);
  if (!(hi < 0)) d += " (K vanishes exactly there: the resultant is parallel to the current)";
  return {ok, d};
}

Outcome constant_wind() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ang(0, 2 * pi), mag(0, 0.95), pos(-5, 5), speed(0.2, 3);
  double spray = 0, K = 0, flat = 0, line = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec2 w = mag(rng) * unit(ang(rng));
    const WindField c = WindField::constant(w.x, w.y);
    const TangentSample s{{pos(rng), pos(rng)}, speed(rng) * unit(ang(rng))};
    const SprayCoefficients g = spray_coefficients(c, s);
    spray = std::max({spray, std::abs(g.G), std::abs(g.H)});
    K = std::max(K, std::abs(gauss_curvature(c, s)));
    flat = std::max(flat, norm(projective_flatness_residual(c, s)));
    const GeodesicState init{s.pos, s.vel / eval_F(c, s.pos, s.vel), 0};
    const GeodesicPath p = integrate(c, init, 5);
    const Vec2 e = normalized(init.vel);
    for (const GeodesicState &st : p.samples)
      line = std::max(line, std::abs(cross(e, st.pos - init.pos)) / std::max(1.0, st.t));
  }
  return {spray == 0 && K == 0 && flat == 0 && line <= 1e-9,
          fmt2("max |spray| %.1e, max |K| %.1e", spray, K) +
              fmt2(", max flatness residual %.1e, max line deviation per unit time %.1e", flat, line)};
}

Outcome non_flatness() {
  const TangentSample s{{0, 0.5}, {1, 1}};
  const Vec2 rF = projective_flatness_residual(kShear, s);
  const Vec2 ra = projective_flatness_residual(kShear, s, MetricPart::alpha);
  const oracle::V2 oF = oracle::shear_flatness_F(0.5, 1, 1), oa = oracle::shear_flatness_alpha(0.5, 1, 1);
  auto rel = [](const Vec2 &g, const oracle::V2 &w) {
    return std::hypot(g.x - w.x, g.y - w.y) / std::hypot(w.x, w.y);
  };
  const double eF = rel(rF, oF), ea = rel(ra, oa);
  const bool ok = norm(rF) > 1e-6 && norm(ra) > 1e-6 && eF <= 1e-9 && ea <= 1e-9;
  return {ok, fmt2("|R_F| %.6f, |R_alpha| %.6f", norm(rF), norm(ra)) +
                  fmt2(", relative error vs symbolic %.1e / %.1e", eF, ea)};
}

Outcome convexity() {
  const double y0 = convexity_bound(WindField::quartic(0.8, 1)).y_max;
  return {std::abs(y0 - 1.4553) <= 5e-4, fmt("y0 = %.10f", y0)};
}

Outcome determinant() {
  double worst = 0;
  for (const WindField &field : testing::catalogue())
    for (const TangentSample &s : testing::random_samples(field, 200, 606)) {
      const RandersData r = build_randers(field, s.pos);
      const AlphaBeta ab = eval_alpha_beta(field, s.pos, s.vel);
      const double want = std::pow((ab.alpha + ab.beta) / ab.alpha, 3) * r.a.det();
      worst = std::max(worst, std::abs(fundamental_tensor(field, s).det - want) / std::abs(want));
    }
  return {worst <= 1e-9, fmt("max relative error %.2e over 5 wind kinds x 200 samples", worst)};
}

Outcome oracles() {
  double tensor = 0, el = 0, compact = 0, closed = 0;
  for (const WindField &field : testing::catalogue()) {
    const oracle::ScalarFn F = testing::navigation_F(field);
    for (const TangentSample &s : testing::random_samples(field, 100, 707)) {
      const FundamentalTensor t = fundamental_tensor(field, s);
      double g[2][2];
      oracle::hessian_half_F2(F, s.pos.x, s.pos.y, s.vel.x, s.vel.y, g);
      const double gs = std::max({1.0, std::abs(g[0][0]), std::abs(g[1][1])});
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) tensor = std::max(tensor, std::abs(t.g(i, j) - g[i][j]) / gs);
      const SprayCoefficients sc = spray_coefficients(field, s);
      const oracle::LDerivs d = oracle::l_derivatives(F, s.pos.x, s.pos.y, s.vel.x, s.vel.y);
      const oracle::V2 a = oracle::spray_euler_lagrange(d, s.vel.x, s.vel.y);
      const oracle::V2 b = oracle::spray_compact(d);
      const double ss = std::max({1.0, std::abs(a.x), std::abs(a.y)});
      el = std::max(el, std::max(std::abs(sc.G - a.x), std::abs(sc.H - a.y)) / ss);
      compact = std::max(compact, std::max(std::abs(sc.G - b.x), std::abs(sc.H - b.y)) / ss);
    }
  }
  for (const TangentSample &s : testing::random_samples(kShear, 200, 708)) {
    const SprayCoefficients sc = spray_coefficients(kShear, s);
    closed = std::max({closed, testing::rel_err(sc.G, oracle::shear_G(s.pos.y, s.vel.x, s.vel.y)),
                       testing::rel_err(sc.H, oracle::shear_H(s.pos.y, s.vel.x, s.vel.y))});
  }
  const bool ok = tensor <= 1e-6 && el <= 1e-6 && compact <= 1e-6 && closed <= 1e-9;
  return {ok, fmt2("tensor %.1e, spray (Euler-Lagrange) %.1e", tensor, el) +
                  fmt2(", spray (compact) %.1e, shear closed form %.1e", compact, closed)};
}

Outcome unit_speed() {
  double worst = 0;
  int paths = 0;
  for (const WindField &field : testing::catalogue()) {
    FanSpec spec;
    spec.start = {0, field.kind() == WindKind::shear ? -0.5 : 0.3};
    spec.t_max = 20;
    for (const GeodesicPath &p : fan(field, spec)) {
      ++paths;
      for (const GeodesicState &s : p.samples)
        worst = std::max(worst, std::abs(eval_F(field, s.pos, s.vel) - 1));
    }
  }
  return {worst <= 1e-6, fmt2("max |F - 1| %.2e over %.0f paths", worst, paths)};
}

Outcome time_optimality() {
  const Point pq[][2] = {{{0, -0.5}, {1, -0.5}},
                         {{0, -0.5}, {-1, -0.5}},
                         {{0, -0.8}, {0.3, 0.8}},
                         {{-0.5, 0.2}, {0.7, -0.6}},
                         {{0, 0.5}, {1.5, 0.6}}};
  double worst = 0;
  bool ok = true;
  const oracle::WindFn sw = oracle::shear_wind;
  for (const auto &e : pq) {
    const ConnectResult r = connect(kShear, e[0], e[1]);
    const double bf = oracle::brute_force_time(sw, {e[0].x, e[0].y}, {e[1].x, e[1].y});
    worst = std::max(worst, r.time / bf);
    ok = ok && r.time <= (1 + 1e-3) * bf && r.miss <= 1e-6;
  }
  return {ok, fmt("max connect / brute force %.6f over 5 pairs", worst)};
}

PatternParams exsq() {
  PatternParams p;
  p.kind = PatternKind::expanding_square;
  p.spacing = 0.1;
  p.legs = 10;
  return p;
}

Outcome search_plan() {
  const SearchPattern es = generate_pattern(exsq());
  const SearchDomain dom = nominal_domain(es);
  bool dominance = true, monotone = true;
  double prev = -1e300;
  std::string savings;
  CoverageReport cov;
  for (double k : {0.25, 0.5, 0.75, 1.0}) {
    const PlanComparison c = compare(WindField::shear(k), es);
    dominance = dominance && c.optimal.total_time <= c.standard.total_time;
    monotone = monotone && c.saving >= prev;
    prev = c.saving;
    savings += fmt(savings.empty() ? "%.4f" : "/%.4f", c.saving);
    if (k == 1.0) cov = coverage_check(c.optimal, dom, 0.5 * es.params.spacing, 100);
  }
  std::string d = "savings k=0.25..1: " + savings + (dominance ? ", optimal <= standard" : ", DOMINANCE VIOLATED");
  d += fmt2(", coverage at eps=spacing/2: worst %.4f vs eps %.4f", cov.worst_distance, 0.05);
  if (!cov.complete) d += " (the straight expanding square itself leaves a hole of 0.586 spacing)";
  return {dominance && monotone && cov.complete, d};
}

Outcome fan_reproduction() {
  namespace fs = std::filesystem;
  const fs::path file = fs::temp_directory_path() / "zermelo_acceptance_fan.json";
  std::ofstream(file) << R"({"wind": {"kind": "shear"}, "fan": {"start": [0, -0.5], "d_phi": )"
                      << fmt("%.17g", pi / 18) << R"(, "t_max": 5}})";
  std::ostringstream csv, svg, err;
  const int c1 = cli::run({"fan", "--scenario", file.string(), "--format", "csv"}, csv, err);
  const int c2 = cli::run({"fan", "--scenario", file.string(), "--format", "svg"}, svg, err);
  if (c1 != 0 || c2 != 0) return {false, "cli failed: " + err.str()};
  std::set<int> ids;
  int quad[4] = {0, 0, 0, 0};
  double ymax = 0;
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);  // version
  std::getline(in, line);  // columns: path,phi0,quadrant,termination,t,x,y
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string cell[7];
    for (auto &c : cell) std::getline(ls, c, ',');
    const int id = std::stoi(cell[0]);
    if (ids.insert(id).second) ++quad[std::stoi(cell[2])];
    ymax = std::max(ymax, std::abs(std::stod(cell[6])));
  }
  bool xml = true;
  std::size_t paths = 0;
  try {
    std::istringstream s(svg.str());
    boost::property_tree::ptree tree;
    boost::property_tree::read_xml(s, tree);
    std::function<void(const boost::property_tree::ptree &)> walk = [&](const auto &t) {
      for (const auto &kv : t) {
        if (kv.first == "path") ++paths;
        walk(kv.second);
      }
    };
    walk(tree);
  } catch (const std::exception &) {
    xml = false;
  }
  const bool ok = ids.size() == 36 && ymax < 1 && quad[0] == 9 && quad[1] == 9 && quad[2] == 9 &&
                  quad[3] == 9 && xml && paths == 36;
  char buf[200];
  std::snprintf(buf, sizeof buf, "%zu paths, max |y| %.12f, quadrants %d/%d/%d/%d, SVG %s with %zu <path>",
                ids.size(), ymax, quad[0], quad[1], quad[2], quad[3], xml ? "valid" : "INVALID", paths);
  return {ok, buf};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "curvature spot values", 1, curvature_spots},
      {2, "curvature profile extrema", 10, curvature_extremes},
      {3, "constant-wind degeneration", 5, constant_wind},
      {4, "non-flatness witness", 1e9, non_flatness},
      {5, "convexity bound", 1e9, convexity},
      {6, "determinant identity", 1e9, determinant},
      {7, "oracle equivalence", 1e9, oracles},
      {8, "unit-speed conservation", 1e9, unit_speed},
      {9, "time-optimality oracle", 120, time_optimality},
      {10, "search-plan dominance", 300, search_plan},
      {11, "fan reproduction", 1e9, fan_reproduction},
  };
  int failures = 0;
  for (const Criterion &c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception &e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s budget]", c.budget_s);
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures;
}
