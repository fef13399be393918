#include <cmath>
#include <filesystem>
#include <map>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "tpekit/cli/app.hpp"
#include "tpekit/cli/config.hpp"
#include "tpekit/error.hpp"
#include "tpekit/io/csv.hpp"
#include "tpekit/material/hyperelastic.hpp"
#include "tpekit/toolpath/gcode.hpp"

using namespace tpekit;
using io::Json;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

Run tpekit_run(std::vector<std::string> args) {
  std::ostringstream o, e;
  Run r;
  r.code = cli::run(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "tpekit_test_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

Json load_json(const fs::path& p) { return Json::parse(io::read_text(p)); }

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = io::read_text(e.path());
  return files;
}

}  // namespace

TEST_CASE("config defaults and schema") {
  const cli::Config c;
  CHECK(c.integer("print.layers") == 3);
  CHECK(c.number("analysis.noise_window_s") == 0.5);
  CHECK(c.number("analysis.threshold_fraction") == 0.5);
  CHECK(c.integer("print.perimeter_loops") == 1);
  CHECK(c.at("print.extrusion_multiplier").is_null());
  CHECK_THROWS_AS(cli::Config::from_json(Json{{"nope", 1}}), ConfigError);
  CHECK_THROWS_AS(cli::Config::from_json(Json{{"print", {{"layers", 2.5}}}}), ConfigError);
  CHECK_THROWS_AS(cli::Config::from_json(Json{{"print", {{"infill", "zigzag"}}}}), ConfigError);
  CHECK_THROWS_AS(cli::Config::from_json(Json{{"units", "in"}}), ConfigError);
  CHECK_THROWS_AS(cli::Config::from_json(Json{{"rings", {{"bands", Json::array()}}}}), ConfigError);
  // integers are accepted where numbers are expected
  CHECK(cli::Config::from_json(Json{{"print", {{"diameter_mm", 30}}}}).number("print.diameter_mm") ==
        30.0);
  cli::Config s;
  s.set("print.layers", "1");
  s.set("material.family", "neohookean");
  s.set("print.extrusion_multiplier", "1.2");
  CHECK(s.integer("print.layers") == 1);
  CHECK(s.string("material.family") == "neohookean");
  CHECK(s.number("print.extrusion_multiplier") == 1.2);
  CHECK_THROWS_AS(s.set("print.layers", "many"), ConfigError);
}

TEST_CASE("fit command") {
  const fs::path d = fresh_dir("fit");
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= 20; ++i) {
    const double e = 0.1 * i;
    rows.push_back({e, material::uniaxial_eng_stress(material::NeoHookean{0.25}, 1.0 + e)});
  }
  io::write_text(d / "nh.csv", io::to_csv({"strain", "stress_mpa"}, rows));

  const auto r = tpekit_run({"--out", (d / "o").string(), "fit", (d / "nh.csv").string(),
                             "--family", "neohookean"});
  CHECK(r.code == 0);
  const auto rep = load_json(d / "o" / "fit_report.json");
  CHECK(rep["family"] == "neohookean");
  CHECK(rep["parameters"]["mu"].get<double>() == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(rep["converged"] == true);
  // one machine-readable line
  CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 1);
  CHECK(Json::parse(r.out)["exit"] == 0);

  const auto missing = tpekit_run({"--out", (d / "o").string(), "fit", (d / "none.csv").string()});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("cannot open") != std::string::npos);

  io::write_text(d / "two.csv", "strain,stress_mpa\n0,0\n0.5,0.1\n");
  const auto few = tpekit_run(
      {"--out", (d / "o").string(), "fit", (d / "two.csv").string(), "--family", "mooney-rivlin"});
  CHECK(few.code == 1);
  CHECK(few.err.find("insufficient data") != std::string::npos);

  io::write_text(d / "bad.csv", "strain,stress_mpa\n0,0\n0.5,x\n");
  const auto bad = tpekit_run({"--out", (d / "o").string(), "fit", (d / "bad.csv").string()});
  CHECK(bad.code == 1);
  CHECK(bad.err.find("line 3") != std::string::npos);
}

TEST_CASE("simulate command") {
  const fs::path d = fresh_dir("simulate");
  SUBCASE("thickness scaling") {
    const auto r = tpekit_run({"--out", d.string(), "simulate"});
    REQUIRE(r.code == 0);
    const auto j = load_json(d / "ballooning.json");
    CHECK(j["found"] == true);
    CHECK(std::abs(j["thickness_scaling"]["pressure_ratio"].get<double>() - 2.0) <= 1e-6);
    CHECK(j["thickness_scaling"]["stretch_at_limit"].get<double>() ==
          doctest::Approx(j["stretch_at_limit"].get<double>()).epsilon(1e-12));
    const auto curve = io::read_csv(d / "pressure_stretch.csv");
    CHECK(curve.header.size() == 5);
    CHECK(curve.rows.size() == 400);
    const auto trace = io::read_csv(d / "simulation_trace.csv");
    CHECK(trace.header == std::vector<std::string>{"time_s", "pressure_kpa", "stretch"});
  }
  SUBCASE("sphere oracle") {
    const auto r = tpekit_run({"--out", d.string(), "--set", R"(material.parameters={"mu":0.1})",
                               "simulate", "--family", "neohookean", "--mode", "sphere"});
    REQUIRE(r.code == 0);
    const auto j = load_json(d / "ballooning.json");
    CHECK(std::abs(j["stretch_at_limit"].get<double>() - std::pow(7.0, 1.0 / 6.0)) <= 1e-6);
  }
  SUBCASE("low-Jm Gent has no limit point") {
    const auto r = tpekit_run(
        {"--out", d.string(), "--set", R"(material.parameters={"mu":0.1,"jm":1})", "simulate"});
    CHECK(r.code == 0);
    CHECK(load_json(d / "ballooning.json")["found"] == false);
    CHECK(r.err.find("warning") != std::string::npos);
  }
}

TEST_CASE("slice command") {
  const fs::path d = fresh_dir("slice");
  SUBCASE("membrane re-parses to the same program") {
    const auto r = tpekit_run({"--out", d.string(), "slice", "membrane"});
    REQUIRE(r.code == 0);
    const std::string text = io::read_text(d / "toolpath.gcode");
    const auto prog = toolpath::parse_gcode(text);
    CHECK(toolpath::serialize(prog) == text);
    const auto cov = load_json(d / "coverage.json");
    CHECK(cov["layers"] == 3);
    CHECK(cov["airtight_candidate"] == true);
    CHECK(cov["round_trip_identical"] == true);
  }
  SUBCASE("dual-tool rings change tools layers + 1 times") {
    const auto r = tpekit_run({"--out", d.string(), "slice", "rings", "--set", "rings.layers=6"});
    REQUIRE(r.code == 0);
    const auto prog = toolpath::parse_gcode(io::read_text(d / "toolpath.gcode"));
    CHECK(toolpath::count_tool_changes(prog) == 7);
  }
  SUBCASE("airtightness check warns but succeeds") {
    // a 0.3 mm wide tab vanishes under the half-bead inset and stays empty
    io::write_text(d / "tab.csv",
                   "x_mm,y_mm\n0,0\n10,0\n10,4.85\n14,4.85\n14,5.15\n10,5.15\n10,10\n0,10\n");
    const auto quiet = tpekit_run({"--out", d.string(), "slice", (d / "tab.csv").string()});
    CHECK(quiet.code == 0);
    CHECK(quiet.err.empty());
    CHECK(load_json(d / "coverage.json")["airtight_candidate"] == false);
    const auto loud =
        tpekit_run({"--out", d.string(), "slice", (d / "tab.csv").string(), "--check-airtight"});
    CHECK(loud.code == 0);
    CHECK(loud.err.find("may not be airtight") != std::string::npos);
  }
  SUBCASE("single-layer concentric") {
    const auto r = tpekit_run({"--out", d.string(), "slice", "membrane", "--infill", "concentric",
                               "--layers", "1", "--check-airtight"});
    CHECK(r.code == 0);
    const auto prog = toolpath::parse_gcode(io::read_text(d / "toolpath.gcode"));
    CHECK(prog.commands.size() > 100);
  }
  SUBCASE("config file and flag precedence") {
    io::write_text(d / "cfg.json", R"({"print": {"layers": 2, "infill": "concentric"}})");
    REQUIRE(tpekit_run({"--config", (d / "cfg.json").string(), "--out", d.string(), "slice",
                        "membrane", "--layers", "1"})
                .code == 0);
    CHECK(load_json(d / "coverage.json")["layers"] == 1);
    REQUIRE(tpekit_run({"--config", (d / "cfg.json").string(), "--out", d.string(), "slice",
                        "membrane"})
                .code == 0);
    CHECK(load_json(d / "coverage.json")["layers"] == 2);
  }
  SUBCASE("invalid geometry and config are input errors") {
    CHECK(tpekit_run({"--out", d.string(), "slice", "membrane", "--diameter", "0.5"}).code == 1);
    CHECK(tpekit_run({"--out", d.string(), "slice", "membrane", "--layers", "x"}).code == 1);
    io::write_text(d / "bowtie.csv", "x_mm,y_mm\n0,0\n10,10\n10,0\n0,10\n");
    CHECK(tpekit_run({"--out", d.string(), "slice", (d / "bowtie.csv").string()}).code == 1);
    CHECK(tpekit_run({"--out", d.string(), "slice", "membrane", "--profile",
                      (d / "none.json").string()})
              .code == 1);
  }
}

TEST_CASE("analyze command") {
  const fs::path d = fresh_dir("analyze");
  constexpr double kPi = std::numbers::pi;
  SUBCASE("cyclic failure") {
    std::vector<std::vector<double>> rows;
    for (int k = 1; k <= 1000; ++k)
      for (int j = 0; j < 16; ++j) {
        const double tau = 0.5 * j;
        const double peak = k < 681 ? 10.0 : 1.0;
        rows.push_back({(k - 1) * 8.0 + tau, tau < 4.0 ? peak * std::sin(kPi * tau / 4.0) : 0.0});
      }
    io::write_text(d / "cyc.csv", io::to_csv({"time_s", "pressure_kpa"}, rows));
    const auto r = tpekit_run({"--out", d.string(), "analyze", "cyclic", (d / "cyc.csv").string()});
    REQUIRE(r.code == 0);
    const auto j = load_json(d / "cyclic.json");
    CHECK(j[0]["cycle_count"] == 1000);
    CHECK(j[0]["failure_cycle"] == 681);
  }
  SUBCASE("semicircle profile") {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i <= 40; ++i)
      rows.push_back({21.0 * std::cos(kPi * i / 40), 21.0 * std::sin(kPi * i / 40)});
    io::write_text(d / "prof.csv", "# L0_mm=42\n" + io::to_csv({"x_mm", "y_mm"}, rows));
    REQUIRE(tpekit_run({"--out", d.string(), "analyze", "inflation", (d / "prof.csv").string()})
                .code == 0);
    CHECK(std::abs(load_json(d / "inflation.json")[0]["stretch"].get<double>() - kPi / 2) < 1e-3);
  }
  SUBCASE("hold-mode force plateau") {
    std::vector<std::vector<double>> rows;
    for (int i = 0; i <= 200; ++i) {
      const double t = 0.05 * i;
      rows.push_back({t, t < 2.0 ? 13.33 * t / 2.0 : 13.33});
    }
    io::write_text(d / "hold.csv", io::to_csv({"time_s", "force_n"}, rows));
    REQUIRE(tpekit_run({"--out", d.string(), "analyze", "force", (d / "hold.csv").string()}).code ==
            0);
    CHECK(load_json(d / "force.json")[0]["plateau"]["mean_n"].get<double>() ==
          doctest::Approx(13.33).epsilon(1e-12));
    CHECK(io::read_text(d / "force_summary.csv").find("plateau.mean_n") != std::string::npos);
  }
  SUBCASE("too few cycles is an analysis failure") {
    io::write_text(d / "flat.csv", "time_s,pressure_kpa\n0,0\n1,0\n2,0\n3,0\n4,0\n");
    const auto r = tpekit_run({"--out", d.string(), "analyze", "cyclic", (d / "flat.csv").string()});
    CHECK(r.code == 2);
  }
  SUBCASE("hysteresis needs exactly two files") {
    io::write_text(d / "l.csv", "force_n,pressure_kpa\n0,0.2\n10,2\n");
    io::write_text(d / "u.csv", "force_n,pressure_kpa\n10,1.8\n0,0\n");
    CHECK(tpekit_run({"--out", d.string(), "analyze", "hysteresis", (d / "l.csv").string()}).code ==
          1);
    REQUIRE(tpekit_run({"--out", d.string(), "analyze", "hysteresis", (d / "l.csv").string(),
                        (d / "u.csv").string()})
                .code == 0);
    CHECK(load_json(d / "hysteresis.json")["normalized"].get<double>() ==
          doctest::Approx(0.1).epsilon(1e-12));
  }
  SUBCASE("unknown kind") {
    CHECK(tpekit_run({"--out", d.string(), "analyze", "spectrum", "x.csv"}).code == 1);
  }
}

TEST_CASE("jobs do not change results") {
  const fs::path d = fresh_dir("jobs");
  std::vector<std::string> files;
  for (int k = 0; k < 5; ++k) {
    std::vector<std::vector<double>> rows;
    const double r = 10.0 + 3.0 * k;
    for (int i = 0; i <= 8; ++i)
      rows.push_back({r * std::cos(0.3 * i), r * std::sin(0.3 * i)});
    const auto f = d / ("m" + std::to_string(k) + ".csv");
    io::write_text(f, io::to_csv({"x_mm", "y_mm"}, rows));
    files.push_back(f.string());
  }
  auto args = [&](const std::string& out, const std::string& jobs) {
    std::vector<std::string> a{"--out", (d / out).string(), "--jobs", jobs, "analyze", "curvature"};
    a.insert(a.end(), files.begin(), files.end());
    return a;
  };
  REQUIRE(tpekit_run(args("one", "1")).code == 0);
  REQUIRE(tpekit_run(args("four", "4")).code == 0);
  CHECK(tree(d / "one") == tree(d / "four"));
  CHECK(tpekit_run(args("zero", "0")).code == 1);
}

TEST_CASE("demo is deterministic") {
  const fs::path a = fresh_dir("demo_a"), b = fresh_dir("demo_b");
  REQUIRE(tpekit_run({"--out", a.string(), "demo"}).code == 0);
  REQUIRE(tpekit_run({"--out", b.string(), "demo"}).code == 0);
  const auto ta = tree(a), tb = tree(b);
  CHECK(ta.size() > 30);
  CHECK(ta == tb);
  const fs::path c = fresh_dir("demo_c");
  REQUIRE(tpekit_run({"--out", c.string(), "--seed", "2", "demo"}).code == 0);
  CHECK(tree(c).at("data/cyclic.csv") != ta.at("data/cyclic.csv"));
}

TEST_CASE("usage errors") {
  CHECK(tpekit_run({}).code == 1);
  CHECK(tpekit_run({"frobnicate"}).code == 1);
  CHECK(tpekit_run({"--help"}).code == 0);
}
