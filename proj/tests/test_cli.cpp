#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "zermelo/cli.hpp"
#include "zermelo/io.hpp"

using namespace zermelo;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "zermelo_cli_tests";
  fs::create_directories(dir);
  return dir;
}

std::string write_scenario(const std::string &name, const json &j) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << j.dump();
  return p.string();
}

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::size_t count(const std::string &hay, const std::string &needle) {
  std::size_t n = 0;
  for (std::size_t p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

bool valid_xml(const std::string &text) {
  std::istringstream in(text);
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_xml(in, tree);
  } catch (const std::exception &) {
    return false;
  }
  return tree.count("svg") == 1;
}

std::vector<std::vector<std::string>> csv_rows(const std::string &text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

const json kShear = {{"kind", "shear"}};

}  // namespace

TEST_CASE("metric with zero wind has zero curvature") {
  const json sc = {{"wind", {{"kind", "zero"}}},
                   {"metric", {{"samples", json::array({{{"pos", {0, 0}}, {"vel", {1, 2}}},
                                                        {{"pos", {3, -1}}, {"vel", {-1, 0.5}}}})},
                               {"profile", {{"pos", {0, 0}}, {"n", 16}}}}}};
  const Run r = run({"metric", "--scenario", write_scenario("metric.json", sc), "--format", "csv"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# zermelo-csv v1 metric", 0) == 0);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 19);
  const auto &head = rows[0];
  const auto k = std::find(head.begin(), head.end(), "K") - head.begin();
  REQUIRE(k < static_cast<long>(head.size()));
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(std::stod(rows[i][k]) == 0.0);
}

TEST_CASE("fan emits 36 paths and a valid SVG") {
  const json sc = {{"wind", kShear}, {"fan", {{"start", {0, -0.5}}, {"t_max", 5}}}};
  const std::string file = write_scenario("fan.json", sc);
  const Run csv = run({"fan", "--scenario", file, "--format", "csv"});
  REQUIRE(csv.code == 0);
  const auto rows = csv_rows(csv.out);
  std::set<std::string> ids;
  for (std::size_t i = 1; i < rows.size(); ++i) ids.insert(rows[i][0]);
  CHECK(ids.size() == 36);
  const Run svg = run({"fan", "--scenario", file, "--format", "svg"});
  REQUIRE(svg.code == 0);
  CHECK(valid_xml(svg.out));
  CHECK(count(svg.out, "<path") == 36);
  for (int q = 0; q < 4; ++q) CHECK(count(svg.out, "geodesic q" + std::to_string(q)) == 9);
  CHECK(count(svg.out, io::quadrant_color(0)) >= 9);
  // Deterministic output for fixed inputs.
  CHECK(run({"fan", "--scenario", file, "--format", "svg"}).out == svg.out);
}

TEST_CASE("pattern, connect and geodesic outputs") {
  const json pat = {{"wind", kShear},
                    {"pattern", {{"kind", "expanding_square"}, {"spacing", 0.1}, {"legs", 6}}}};
  const Run p = run({"pattern", "--scenario", write_scenario("pattern.json", pat), "--format", "json"});
  REQUIRE(p.code == 0);
  CHECK(json::parse(p.out).at("waypoints").size() == 7);
  const Run ps = run({"pattern", "--scenario", write_scenario("pattern.json", pat), "--format", "svg"});
  CHECK(valid_xml(ps.out));

  const json con = {{"wind", kShear}, {"connect", {{"from", {0, -0.5}}, {"to", {-1, -0.5}}}}};
  const std::string cf = write_scenario("connect.json", con);
  const Run c = run({"connect", "--scenario", cf, "--format", "json"});
  REQUIRE(c.code == 0);
  const json cj = json::parse(c.out);
  CHECK(cj.at("time").get<double>() < 1.0);
  const Run cs = run({"connect", "--scenario", cf, "--format", "svg"});
  CHECK(valid_xml(cs.out));
  CHECK(count(cs.out, "<path") == 1);
  CHECK(run({"connect", "--scenario", cf, "--format", "json", "--seed-angles", "36"}).code == 0);

  const json geo = {{"wind", kShear}, {"geodesic", {{"start", {0, 0}}, {"phi0", 0.3}, {"t_max", 1}}}};
  const Run g = run({"geodesic", "--scenario", write_scenario("geo.json", geo), "--format", "csv"});
  REQUIRE(g.code == 0);
  CHECK(g.out.rfind("# zermelo-csv v1 geodesic", 0) == 0);

  const json fr = {{"wind", kShear}, {"front", {{"start", {0, 0}}, {"t", 0.5}, {"n", 12}}}};
  const Run f = run({"front", "--scenario", write_scenario("front.json", fr)});
  REQUIRE(f.code == 0);
  CHECK(csv_rows(f.out).size() == 13);
}

TEST_CASE("plan output and round-trip") {
  const json sc = {{"units", "dimensionless"},
                   {"wind", kShear},
                   {"plan", {{"pattern", {{"kind", "expanding_square"}, {"spacing", 0.1}, {"legs", 6}}}}}};
  const std::string file = write_scenario("plan.json", sc);
  const Run r = run({"plan", "--scenario", file, "--format", "json"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.at("saving").get<double>() > 0);
  CHECK(j.at("complete_at_target").get<bool>());

  const SearchPlan opt = io::plan_from_json(j.at("optimal"));
  const SearchPlan back = io::plan_from_json(json::parse(io::plan_to_json(opt).dump()));
  REQUIRE(back.waypoints.size() == opt.waypoints.size());
  for (std::size_t k = 0; k < opt.waypoints.size(); ++k) CHECK(back.waypoints[k] == opt.waypoints[k]);
  REQUIRE(back.leg_times.size() == opt.leg_times.size());
  for (std::size_t k = 0; k < opt.leg_times.size(); ++k) {
    CHECK(back.leg_times[k] == opt.leg_times[k]);
    CHECK(back.leg_phi0[k] == opt.leg_phi0[k]);
    CHECK(back.legs[k].samples.size() == opt.legs[k].samples.size());
    CHECK(back.legs[k].back().pos == opt.legs[k].back().pos);
  }
  CHECK(back.total_time == opt.total_time);
  CHECK(back.epsilon == opt.epsilon);

  // In-memory plan straight from the library round-trips too.
  const SearchPlan lib = plan_optimal(WindField::shear(), generate_pattern(io::pattern_params_from_json(
                                                              sc.at("plan").at("pattern"))));
  const SearchPlan lib_back = io::plan_from_json(json::parse(io::plan_to_json(lib).dump()));
  CHECK(lib_back.total_time == lib.total_time);
  for (std::size_t k = 0; k < lib.waypoints.size(); ++k) CHECK(lib_back.waypoints[k] == lib.waypoints[k]);

  const Run svg = run({"plan", "--scenario", file, "--format", "svg"});
  REQUIRE(svg.code == 0);
  CHECK(valid_xml(svg.out));
  CHECK(count(svg.out, "<path") == opt.legs.size());
}

TEST_CASE("output directory from flag and environment") {
  const fs::path dir = scratch() / "out";
  fs::remove_all(dir);
  const json sc = {{"wind", kShear}, {"fan", {{"start", {0, -0.5}}, {"t_max", 1}}}};
  const std::string file = write_scenario("fan_out.json", sc);
  const Run r = run({"fan", "--scenario", file, "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out).at("written").size() == 2);
  CHECK(fs::exists(dir / "fan.csv"));
  CHECK(fs::exists(dir / "fan.svg"));

  const fs::path env_dir = scratch() / "env_out";
  fs::remove_all(env_dir);
  ::setenv("ZERMELO_OUT_DIR", env_dir.c_str(), 1);
  const Run e = run({"fan", "--scenario", file, "--format", "csv"});
  ::unsetenv("ZERMELO_OUT_DIR");
  REQUIRE(e.code == 0);
  CHECK(fs::exists(env_dir / "fan.csv"));
  CHECK_FALSE(fs::exists(env_dir / "fan.svg"));
}

TEST_CASE("check command") {
  const json sc = {{"wind", {{"kind", "quartic"}, {"params", {{"a", 0.8}, {"b", 1}}}}},
                   {"check", {{"samples", 20}}}};
  const Run r = run({"check", "--scenario", write_scenario("check.json", sc)});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j.dump().find("false") == std::string::npos);
}

TEST_CASE("exit codes on induced failures") {
  auto category = [](const Run &r) { return json::parse(r.err).at("category").get<std::string>(); };

  // 1: endpoint outside the convexity domain
  const Run dom = run({"connect", "--scenario",
                       write_scenario("bad_dom.json", {{"wind", kShear},
                                                       {"connect", {{"from", {0, 0}}, {"to", {0, 2}}}}})});
  CHECK(dom.code == 1);
  CHECK(category(dom) == "domain");
  CHECK(json::parse(dom.err).at("error") == "ConvexityViolation");

  // 2: step budget exhausted
  const Run num = run({"geodesic", "--scenario",
                       write_scenario("bad_num.json", {{"wind", kShear},
                                                       {"integrator", {{"max_steps", 3}}},
                                                       {"geodesic", {{"start", {0, 0}}, {"t_max", 5}}}})});
  CHECK(num.code == 2);
  CHECK(category(num) == "numerical");

  // 3: unknown key, mismatched block, malformed JSON, missing file, bad flag
  CHECK(run({"fan", "--scenario",
             write_scenario("bad_key.json", {{"wind", kShear}, {"fan", {{"start", {0, 0}}, {"speed", 2}}}})})
            .code == 3);
  const Run mismatch = run({"fan", "--scenario",
                            write_scenario("bad_block.json", {{"wind", kShear}, {"connect", json::object()}})});
  CHECK(mismatch.code == 3);
  CHECK(category(mismatch) == "input");
  {
    std::ofstream(scratch() / "broken.json") << "{\"wind\": ";
  }
  CHECK(run({"fan", "--scenario", (scratch() / "broken.json").string()}).code == 3);
  CHECK(run({"fan", "--scenario", (scratch() / "missing.json").string()}).code == 3);
  CHECK(run({"fan"}).code == 3);
  CHECK(run({"teleport", "--scenario", "x.json"}).code == 3);
  CHECK(run({"fan", "--scenario", write_scenario("fan2.json", {{"wind", kShear}, {"fan", {{"start", {0, 0}}}}}),
             "--tol", "-1"})
            .code == 3);
  CHECK(run({"fan", "--scenario", write_scenario("wind.json", {{"wind", {{"kind", "tornado"}}}, {"fan", {{"start", {0, 0}}}}})})
            .code == 3);
  CHECK(run({"--help"}).code == 0);
}
