#include "zermelo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "zermelo/io.hpp"
#include "zermelo/randers.hpp"

namespace zermelo::cli {

namespace {

using io::json;

const std::vector<std::string> kCommands = {"metric", "geodesic", "fan",  "front",
                                            "connect", "pattern", "plan", "check"};

struct Options {
  std::string command;
  std::string scenario_path;
  std::string out_dir;
  std::string format;
  double tol = 0.0;
  int seed_angles = 0;
};

struct Scenario {
  WindField wind;
  json block;
  IntegratorOptions integrator;
};

struct Artifact {
  std::string ext;
  std::string content;
};

const char *category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::domain: return "domain";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::input: return "input";
  }
  return "?";
}

int report_error(std::ostream &err, ErrorCategory category, const std::string &name,
                 const std::string &message) {
  const int code = static_cast<int>(category);
  err << json{{"error", name},
              {"category", category_name(category)},
              {"exit_code", code},
              {"message", message}}
             .dump()
      << "\n";
  return code;
}

double num_or(const json &obj, const char *key, double fallback, const std::string &ctx) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number()) throw BadParams(ctx + "." + key + " must be a number");
  return obj.at(key).get<double>();
}

int int_or(const json &obj, const char *key, int fallback, const std::string &ctx) {
  if (!obj.contains(key)) return fallback;
  if (!obj.at(key).is_number_integer()) throw BadParams(ctx + "." + key + " must be an integer");
  return obj.at(key).get<int>();
}

Point point_at(const json &obj, const char *key, const std::string &ctx) {
  if (!obj.contains(key)) throw BadParams(ctx + " is missing '" + key + "'");
  return io::point_from_json(obj.at(key), ctx + "." + key);
}

Scenario load_scenario(const Options &opt) {
  std::ifstream in(opt.scenario_path);
  if (!in) throw BadParams("cannot open scenario " + opt.scenario_path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error &e) {
    throw BadParams(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw BadParams("scenario must be a JSON object");
  int blocks = 0;
  for (const auto &item : root.items()) {
    const std::string &k = item.key();
    if (std::find(kCommands.begin(), kCommands.end(), k) != kCommands.end()) {
      ++blocks;
      if (k != opt.command)
        throw BadParams("scenario holds a '" + k + "' block but the command is '" + opt.command + "'");
    } else if (k != "wind" && k != "integrator" && k != "units") {
      throw BadParams("unknown key '" + k + "' in scenario");
    }
  }
  if (blocks != 1) throw BadParams("scenario needs exactly one '" + opt.command + "' block");
  if (!root.contains("wind")) throw BadParams("scenario is missing 'wind'");

  Scenario sc;
  sc.wind = io::wind_from_json(root.at("wind"));
  sc.block = root.at(opt.command);
  if (root.contains("units") && !root.at("units").is_string())
    throw BadParams("units must be a string note");
  if (root.contains("integrator")) {
    const json &j = root.at("integrator");
    io::expect_keys(j, {"rtol", "atol", "initial_step", "max_step", "max_steps"}, "integrator");
    auto &o = sc.integrator;
    o.rtol = num_or(j, "rtol", o.rtol, "integrator");
    o.atol = num_or(j, "atol", o.atol, "integrator");
    o.initial_step = num_or(j, "initial_step", o.initial_step, "integrator");
    o.max_step = num_or(j, "max_step", o.max_step, "integrator");
    o.max_steps = static_cast<std::size_t>(int_or(j, "max_steps", static_cast<int>(o.max_steps), "integrator"));
  }
  if (opt.tol > 0.0) sc.integrator.rtol = sc.integrator.atol = opt.tol;
  if (!(sc.integrator.rtol > 0.0 && sc.integrator.atol > 0.0))
    throw BadParams("integrator tolerances must be positive");
  return sc;
}

CurvatureMethod method_from_string(const std::string &s) {
  if (s == "automatic") return CurvatureMethod::automatic;
  if (s == "exact") return CurvatureMethod::exact;
  if (s == "finite_difference") return CurvatureMethod::finite_difference;
  throw BadParams("unknown curvature method '" + s + "'");
}

// ---------------------------------------------------------------------------
// Commands

std::vector<Artifact> cmd_metric(const Scenario &sc) {
  const json &b = sc.block;
  io::expect_keys(b, {"samples", "profile", "method"}, "metric");
  const CurvatureMethod method =
      b.contains("method") ? method_from_string(b.at("method").get<std::string>())
                           : CurvatureMethod::automatic;
  std::vector<TangentSample> samples;
  if (b.contains("samples")) {
    for (const json &s : b.at("samples")) {
      io::expect_keys(s, {"pos", "vel"}, "metric sample");
      samples.push_back({point_at(s, "pos", "metric sample"), point_at(s, "vel", "metric sample")});
    }
  }
  if (b.contains("profile")) {
    const json &p = b.at("profile");
    io::expect_keys(p, {"pos", "n"}, "metric.profile");
    const Point pos = point_at(p, "pos", "metric.profile");
    const int n = int_or(p, "n", 360, "metric.profile");
    if (n < 1) throw BadParams("metric.profile.n must be >= 1");
    const Vec2 w = sc.wind.eval(pos);
    for (int k = 0; k < n; ++k)
      samples.push_back({pos, unit(2.0 * std::numbers::pi * k / n) + w});
  }
  if (samples.empty()) throw BadParams("metric needs 'samples' or 'profile'");
  return {{"csv", io::metric_csv(sc.wind, samples, method)}};
}

std::vector<Artifact> cmd_geodesic(const Scenario &sc) {
  const json &b = sc.block;
  io::expect_keys(b, {"start", "phi0", "t_max"}, "geodesic");
  const Point start = point_at(b, "start", "geodesic");
  const double phi0 = num_or(b, "phi0", 0.0, "geodesic");
  GeodesicPath p = integrate(sc.wind, initial_state(sc.wind, start, phi0),
                             num_or(b, "t_max", 5.0, "geodesic"), sc.integrator);
  p.phi0 = phi0;
  return {{"csv", io::geodesic_csv(p)}, {"svg", io::fan_svg(sc.wind, {p})}};
}

std::vector<Artifact> cmd_fan(const Scenario &sc) {
  const json &b = sc.block;
  io::expect_keys(b, {"start", "d_phi", "phi_begin", "phi_end", "t_max"}, "fan");
  FanSpec spec;
  spec.start = point_at(b, "start", "fan");
  spec.d_phi = num_or(b, "d_phi", spec.d_phi, "fan");
  spec.phi_begin = num_or(b, "phi_begin", spec.phi_begin, "fan");
  spec.phi_end = num_or(b, "phi_end", spec.phi_end, "fan");
  spec.t_max = num_or(b, "t_max", spec.t_max, "fan");
  const auto paths = fan(sc.wind, spec, sc.integrator);
  return {{"csv", io::fan_csv(paths)}, {"svg", io::fan_svg(sc.wind, paths)}};
}

std::vector<Artifact> cmd_front(const Scenario &sc) {
  const json &b = sc.block;
  io::expect_keys(b, {"start", "t", "n"}, "front");
  const auto front = time_front_detailed(sc.wind, point_at(b, "start", "front"),
                                         num_or(b, "t", 1.0, "front"), int_or(b, "n", 72, "front"),
                                         sc.integrator);
  return {{"csv", io::front_csv(front)}};
}

std::vector<Artifact> cmd_connect(const Scenario &sc, const Options &opt) {
  const json &b = sc.block;
  io::expect_keys(b, {"from", "to", "horizon", "seed_angles", "pos_tol"}, "connect");
  ConnectOptions co;
  co.integrator = sc.integrator;
  co.horizon = num_or(b, "horizon", co.horizon, "connect");
  co.seed_angles = int_or(b, "seed_angles", co.seed_angles, "connect");
  co.pos_tol = num_or(b, "pos_tol", co.pos_tol, "connect");
  if (opt.seed_angles > 0) co.seed_angles = opt.seed_angles;
  if (opt.tol > 0.0) co.pos_tol = opt.tol;
  const ConnectResult r = connect(sc.wind, point_at(b, "from", "connect"), point_at(b, "to", "connect"), co);
  json j = io::connect_to_json(r);
  j["wind"] = io::wind_to_json(sc.wind);
  return {{"json", j.dump(2) + "\n"}, {"svg", io::fan_svg(sc.wind, {r.path})}};
}

std::vector<Artifact> cmd_pattern(const Scenario &sc) {
  const SearchPattern pattern = generate_pattern(io::pattern_params_from_json(sc.block));
  return {{"json", io::pattern_to_json(pattern).dump(2) + "\n"},
          {"svg", io::pattern_svg(sc.wind, pattern)}};
}

std::vector<Artifact> cmd_plan(const Scenario &sc, const Options &opt) {
  const json &b = sc.block;
  io::expect_keys(b, {"pattern", "epsilon", "grid", "max_iters", "max_split_depth", "match_standard"},
                  "plan");
  if (!b.contains("pattern")) throw BadParams("plan is missing 'pattern'");
  const SearchPattern pattern = generate_pattern(io::pattern_params_from_json(b.at("pattern")));
  PlanOptions po;
  po.connect.integrator = sc.integrator;
  if (opt.seed_angles > 0) po.connect.seed_angles = opt.seed_angles;
  if (opt.tol > 0.0) po.connect.pos_tol = opt.tol;
  po.epsilon = num_or(b, "epsilon", po.epsilon, "plan");
  po.grid = int_or(b, "grid", po.grid, "plan");
  po.max_iters = int_or(b, "max_iters", po.max_iters, "plan");
  po.max_split_depth = int_or(b, "max_split_depth", po.max_split_depth, "plan");
  if (b.contains("match_standard")) {
    if (!b.at("match_standard").is_boolean()) throw BadParams("plan.match_standard must be a boolean");
    po.match_standard = b.at("match_standard").get<bool>();
  }
  const PlanComparison c = compare(sc.wind, pattern, po);
  const CoverageReport at_target = coverage_check(c.optimal, nominal_domain(pattern),
                                                  c.optimal.coverage_target, po.grid);
  json j = {{"version", 1},
            {"wind", io::wind_to_json(sc.wind)},
            {"pattern", io::pattern_to_json(pattern)},
            {"epsilon", c.optimal.epsilon},
            {"coverage_target", c.optimal.coverage_target},
            {"standard", io::plan_to_json(c.standard)},
            {"optimal", io::plan_to_json(c.optimal)},
            {"coverage",
             {{"standard", io::coverage_to_json(c.standard_coverage)},
              {"optimal", io::coverage_to_json(c.optimal_coverage)},
              {"optimal_at_target", io::coverage_to_json(at_target)}}},
            {"complete", c.optimal_coverage.complete},
            {"complete_at_target", at_target.complete},
            {"saving", c.saving}};
  return {{"json", j.dump(2) + "\n"}, {"svg", io::plan_svg(sc.wind, pattern, c.optimal)}};
}

// ---------------------------------------------------------------------------
// Invariant suite

struct CheckResult {
  std::string name;
  double worst = 0;
  double tolerance = 0;
  bool passed() const { return worst <= tolerance; }
};

double half_F2(const WindField &f, const Point &x, const Vec2 &v) {
  const double F = eval_F(f, x, v);
  return 0.5 * F * F;
}

// Spray from the Euler-Lagrange equations of L = F^2 / 2 with every
// derivative of L taken by central differences.
Vec2 spray_by_differences(const WindField &f, const TangentSample &s) {
  const double hv = 1e-4 * norm(s.vel), hx = 1e-4;
  auto L = [&](const Point &x, const Vec2 &v) { return half_F2(f, x, v); };
  const Vec2 ex{1, 0}, ey{0, 1};
  const Vec2 e[2] = {ex, ey};
  Mat2 g, mixed;  // mixed(l, k) = d^2 L / dv^l dx^k
  Vec2 Lx;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Vec2 a = hv * e[i], b = hv * e[j];
      g(i, j) = (L(s.pos, s.vel + a + b) - L(s.pos, s.vel + a - b) - L(s.pos, s.vel - a + b) +
                 L(s.pos, s.vel - a - b)) /
                (4 * hv * hv);
      const Vec2 c = hx * e[j];
      mixed(i, j) = (L(s.pos + c, s.vel + a) - L(s.pos + c, s.vel - a) - L(s.pos - c, s.vel + a) +
                     L(s.pos - c, s.vel - a)) /
                    (4 * hv * hx);
    }
  }
  Lx = {(L(s.pos + hx * ex, s.vel) - L(s.pos - hx * ex, s.vel)) / (2 * hx),
        (L(s.pos + hx * ey, s.vel) - L(s.pos - hx * ey, s.vel)) / (2 * hx)};
  // g (2 G) = d L_v / dx . v - L_x
  const Vec2 rhs{mixed(0, 0) * s.vel.x + mixed(0, 1) * s.vel.y - Lx.x,
                 mixed(1, 0) * s.vel.x + mixed(1, 1) * s.vel.y - Lx.y};
  const double det = g.det();
  return {0.5 * (g(1, 1) * rhs.x - g(0, 1) * rhs.y) / det,
          0.5 * (-g(1, 0) * rhs.x + g(0, 0) * rhs.y) / det};
}

std::vector<Artifact> cmd_check(const Scenario &sc) {
  const json &b = sc.block;
  io::expect_keys(b, {"samples", "seed", "t_max"}, "check");
  const int n = int_or(b, "samples", 100, "check");
  const double t_max = num_or(b, "t_max", 5.0, "check");
  if (n < 1) throw BadParams("check.samples must be >= 1");
  std::mt19937_64 rng(static_cast<std::uint64_t>(int_or(b, "seed", 1, "check")));

  const ConvexityDomain dom = convexity_bound(sc.wind);
  double y0 = std::max(-1.0, dom.y_min), y1 = std::min(1.0, dom.y_max);
  const double inset = 0.05 * (y1 - y0);
  y0 += inset;
  y1 -= inset;
  std::uniform_real_distribution<double> ux(-1.0, 1.0), uy(y0, y1), ua(0.0, 2 * std::numbers::pi),
      um(0.5, 2.0);
  std::vector<TangentSample> samples;
  for (int i = 0; i < n; ++i) {
    const Point p{ux(rng), uy(rng)};
    samples.push_back({p, um(rng) * unit(ua(rng))});
  }

  CheckResult sphere{"indicatrix_is_translated_circle", 0, 1e-12};
  CheckResult homog{"positive_homogeneity", 0, 1e-12};
  CheckResult det{"determinant_identity", 0, 1e-9};
  CheckResult tensor{"fundamental_tensor_vs_differences", 0, 1e-6};
  CheckResult spray{"spray_vs_euler_lagrange_differences", 0, 1e-5};
  CheckResult speed{"unit_speed_conservation", 0, 1e-6};
  for (const auto &s : samples) {
    const Vec2 w = sc.wind.eval(s.pos);
    const double theta = std::atan2(s.vel.y, s.vel.x);
    sphere.worst = std::max(sphere.worst, std::abs(eval_F(sc.wind, s.pos, unit(theta) + w) - 1.0));
    const double F = eval_F(sc.wind, s.pos, s.vel);
    for (double c : {0.5, 3.0})
      homog.worst = std::max(homog.worst, std::abs(eval_F(sc.wind, s.pos, c * s.vel) - c * F) / (c * F));

    const FundamentalTensor ft = fundamental_tensor(sc.wind, s);
    const AlphaBeta ab = eval_alpha_beta(sc.wind, s.pos, s.vel);
    const double expect = std::pow(F / ab.alpha, 3) * build_randers(sc.wind, s.pos).a.det();
    det.worst = std::max(det.worst, std::abs(ft.det - expect) / std::abs(expect));

    const double h = 1e-4 * norm(s.vel);
    const Vec2 e[2] = {{1, 0}, {0, 1}};
    double gmax = 0, gerr = 0;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        const Vec2 a = h * e[i], c = h * e[j];
        const double fd = (half_F2(sc.wind, s.pos, s.vel + a + c) - half_F2(sc.wind, s.pos, s.vel + a - c) -
                           half_F2(sc.wind, s.pos, s.vel - a + c) + half_F2(sc.wind, s.pos, s.vel - a - c)) /
                          (4 * h * h);
        gmax = std::max(gmax, std::abs(ft.g(i, j)));
        gerr = std::max(gerr, std::abs(fd - ft.g(i, j)));
      }
    tensor.worst = std::max(tensor.worst, gerr / gmax);

    const SprayCoefficients sp = spray_coefficients(sc.wind, s);
    const Vec2 fd = spray_by_differences(sc.wind, s);
    const double scale = std::max({1.0, std::abs(sp.G), std::abs(sp.H)});
    spray.worst = std::max(spray.worst, std::max(std::abs(fd.x - sp.G), std::abs(fd.y - sp.H)) / scale);
  }
  for (int i = 0; i < std::min(n, 8); ++i) {
    const GeodesicPath p = integrate(sc.wind, initial_state(sc.wind, samples[i].pos, ua(rng)), t_max,
                                     sc.integrator);
    speed.worst = std::max(speed.worst, p.max_f_residual());
  }

  json checks = json::array();
  bool all = true;
  for (const CheckResult *c : {&sphere, &homog, &det, &tensor, &spray, &speed}) {
    checks.push_back({{"name", c->name}, {"passed", c->passed()}, {"worst", c->worst},
                      {"tolerance", c->tolerance}});
    all = all && c->passed();
  }
  const json report = {{"wind", io::wind_to_json(sc.wind)}, {"samples", n}, {"checks", checks},
                       {"passed", all}};
  return {{"json", report.dump(2) + "\n"}, {"status", all ? "" : "invariant check failed"}};
}

std::vector<Artifact> dispatch(const Scenario &sc, const Options &opt) {
  const std::string &c = opt.command;
  if (c == "metric") return cmd_metric(sc);
  if (c == "geodesic") return cmd_geodesic(sc);
  if (c == "fan") return cmd_fan(sc);
  if (c == "front") return cmd_front(sc);
  if (c == "connect") return cmd_connect(sc, opt);
  if (c == "pattern") return cmd_pattern(sc);
  if (c == "plan") return cmd_plan(sc, opt);
  return cmd_check(sc);
}

void write_artifacts(const Options &opt, const std::vector<Artifact> &artifacts, std::ostream &out) {
  std::error_code ec;
  std::filesystem::create_directories(opt.out_dir, ec);
  if (ec) throw BadParams("cannot create output directory " + opt.out_dir);
  json written = json::array();
  for (const auto &a : artifacts) {
    const auto path = std::filesystem::path(opt.out_dir) / (opt.command + "." + a.ext);
    std::ofstream f(path, std::ios::binary);
    f << a.content;
    if (!f) throw BadParams("cannot write " + path.string());
    written.push_back(path.string());
  }
  out << json{{"written", written}}.dump() << "\n";
}

int execute(const Options &opt, std::ostream &out) {
  const Scenario sc = load_scenario(opt);
  std::vector<Artifact> artifacts = dispatch(sc, opt);
  std::string failure;
  std::erase_if(artifacts, [&](const Artifact &a) {
    if (a.ext == "status") failure = a.content;
    return a.ext == "status";
  });
  if (!opt.format.empty()) {
    std::erase_if(artifacts, [&](const Artifact &a) { return a.ext != opt.format; });
    if (artifacts.empty())
      throw BadParams("command '" + opt.command + "' has no " + opt.format + " output");
  }
  if (opt.out_dir.empty()) {
    out << artifacts.front().content;
  } else {
    write_artifacts(opt, artifacts, out);
  }
  if (!failure.empty()) throw StepFailure(failure);
  return 0;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
  CLI::App app{"Time-optimal navigation under planar winds (Zermelo / Randers)", "zermelo"};
  Options opt;
  app.add_option("command", opt.command, "metric | geodesic | fan | front | connect | pattern | plan | check")
      ->required()
      ->check(CLI::IsMember(kCommands));
  app.add_option("--scenario", opt.scenario_path, "Scenario JSON file")->required();
  app.add_option("--out", opt.out_dir, "Output directory (default: stdout)")->envname("ZERMELO_OUT_DIR");
  app.add_option("--format", opt.format, "Restrict output to one format")
      ->check(CLI::IsMember({"csv", "json", "svg"}));
  app.add_option("--tol", opt.tol, "Integrator rtol/atol; position tolerance for connect and plan")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed-angles", opt.seed_angles, "Shooting seeds for connect and plan")
      ->check(CLI::Range(4, 100000));

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp &) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError &e) {
    return report_error(err, ErrorCategory::input, "BadParams", e.what());
  }

  try {
    return execute(opt, out);
  } catch (const Error &e) {
    return report_error(err, e.category(), e.name(), e.what());
  } catch (const json::exception &e) {
    return report_error(err, ErrorCategory::input, "BadParams", e.what());
  } catch (const std::exception &e) {
    return report_error(err, ErrorCategory::numerical, "InternalError", e.what());
  }
}

}  // namespace zermelo::cli
