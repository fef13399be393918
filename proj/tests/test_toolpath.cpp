#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "tpekit/error.hpp"
#include "tpekit/toolpath/coverage.hpp"
#include "tpekit/toolpath/gcode.hpp"
#include "tpekit/toolpath/path.hpp"

using namespace tpekit;
using namespace tpekit::toolpath;

namespace {

constexpr double kPi = std::numbers::pi;

MembranePrintSpec membrane(int layers, InfillPattern infill) {
  MembranePrintSpec s;
  s.diameter_mm = 42.0;
  s.layers = layers;
  s.infill = infill;
  return s;
}

double extruded_volume(const Toolpath& p) {
  double v = 0.0;
  for (const auto& m : p.moves())
    if (m.kind == MoveKind::Extrude)
      v += extrusion_amount(m.length(), m.width_mm, m.layer_height_mm, m.multiplier,
                            CalibrationTable::identity(), m.feedrate_mm_s);
  return v;
}

Toolpath one_move(int tool, Vec3 a, Vec3 b) {
  Toolpath p;
  p.travel_to(a, 80.0, tool);
  Move m;
  m.kind = MoveKind::Extrude;
  m.start = a;
  m.end = b;
  m.width_mm = 0.4;
  m.layer_height_mm = 0.2;
  m.feedrate_mm_s = 20.0;
  m.tool = tool;
  p.push_back(m);
  return p;
}

}  // namespace

TEST_CASE("concentric loops") {
  auto loops = plan_concentric(21.0, 0.4);
  REQUIRE(loops.size() == 52);
  CHECK(loops.front().radius == doctest::Approx(20.8).epsilon(1e-12));
  CHECK(loops.back().radius == doctest::Approx(0.4).epsilon(1e-12));
  for (std::size_t k = 1; k < loops.size(); ++k)
    CHECK(loops[k - 1].radius - loops[k].radius == doctest::Approx(0.4).epsilon(1e-12));

  loops = plan_concentric(0.4, 0.4);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].radius == doctest::Approx(0.2));
  loops = plan_concentric(0.5, 0.4);
  REQUIRE(loops.size() == 1);
  CHECK(loops[0].radius == doctest::Approx(0.3));
  CHECK_THROWS_AS(plan_concentric(0.2, 0.4), ArgumentError);
}

TEST_CASE("line chords") {
  const auto cs = plan_lines(21.0, 0.4, 0.0);
  REQUIRE(cs.size() == 105);
  CHECK(cs[52].length() == doctest::Approx(42.0).epsilon(1e-12));
  CHECK(cs.back().length() / 2 == doctest::Approx(std::sqrt(21.0 * 21.0 - 20.8 * 20.8)));
  CHECK(cs.back().length() / 2 == doctest::Approx(2.889).epsilon(1e-3));
  for (const auto& c : cs)
    CHECK(std::abs(c.length() - 2.0 * std::sqrt(21.0 * 21.0 - c.offset * c.offset)) < 1e-9);
  // serpentine: consecutive chords run in opposite directions
  for (std::size_t k = 1; k < cs.size(); ++k)
    CHECK((cs[k].b.x - cs[k].a.x) * (cs[k - 1].b.x - cs[k - 1].a.x) < 0.0);
  CHECK(plan_lines(1.0, 3.0, 0.0).size() == 1);

  // rotating the angle rotates the chords and keeps their lengths
  const auto rot = plan_lines(21.0, 0.4, 37.0);
  REQUIRE(rot.size() == cs.size());
  for (std::size_t k = 0; k < cs.size(); ++k)
    CHECK(std::abs(rot[k].length() - cs[k].length()) < 1e-9);
}

TEST_CASE("membrane plan structure") {
  const auto lines3 = plan_membrane(membrane(3, InfillPattern::Lines));
  CHECK(is_chained(lines3.moves()));
  const auto zs = lines3.layer_heights();
  REQUIRE(zs.size() == 3);
  for (int k = 0; k < 3; ++k) CHECK(zs[k] == doctest::Approx((k + 1) * 0.2).epsilon(1e-12));

  // infill direction alternates 0, 90, 0
  std::vector<double> angle_of_layer(3, -1.0);
  for (const auto& m : lines3.moves()) {
    if (m.kind != MoveKind::Extrude || m.length() < 10.0) continue;
    const auto k = static_cast<std::size_t>(std::lround(m.start.z / 0.2) - 1);
    const double a = std::abs(std::atan2(m.end.y - m.start.y, m.end.x - m.start.x)) * 180 / kPi;
    if (angle_of_layer[k] < 0.0) angle_of_layer[k] = std::abs(std::fmod(a, 180.0));
  }
  CHECK(angle_of_layer[0] == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(angle_of_layer[1] == doctest::Approx(90.0).epsilon(1e-9));
  CHECK(angle_of_layer[2] == doctest::Approx(0.0).epsilon(1e-9));

  auto single = membrane(1, InfillPattern::Lines);
  for (const auto& m : plan_membrane(single).moves())
    if (m.kind == MoveKind::Extrude) CHECK(m.multiplier == 1.5);
  single.extrusion_multiplier = 1.0;
  for (const auto& m : plan_membrane(single).moves())
    if (m.kind == MoveKind::Extrude) CHECK(m.multiplier == 1.0);

  // concentric layers are identical up to z
  const auto conc = plan_membrane(membrane(6, InfillPattern::Concentric));
  CHECK(conc.layer_heights().size() == 6);
  std::vector<std::vector<Move>> per_layer(6);
  for (const auto& m : conc.moves())
    if (m.kind == MoveKind::Extrude) per_layer[std::lround(m.start.z / 0.2) - 1].push_back(m);
  for (int k = 1; k < 6; ++k) {
    REQUIRE(per_layer[k].size() == per_layer[0].size());
    for (std::size_t i = 0; i < per_layer[0].size(); ++i) {
      CHECK(per_layer[k][i].start.x == per_layer[0][i].start.x);
      CHECK(per_layer[k][i].end.y == per_layer[0][i].end.y);
    }
  }

  auto bad = membrane(1, InfillPattern::Lines);
  bad.perimeter_loops = 60;
  CHECK_THROWS_AS(plan_membrane(bad), GeometryError);
  bad = membrane(1, InfillPattern::Lines);
  bad.layer_height_mm = 0.0;
  CHECK_THROWS_AS(plan_membrane(bad), ArgumentError);
}

TEST_CASE("membrane volume matches area x height x layers x multiplier") {
  for (auto infill : {InfillPattern::Lines, InfillPattern::Concentric}) {
    for (int layers : {1, 3, 6}) {
      const auto spec = membrane(layers, infill);
      const double expected = kPi * 21.0 * 21.0 * 0.2 * layers * spec.effective_multiplier();
      const double got = extruded_volume(plan_membrane(spec));
      CHECK(std::abs(got / expected - 1.0) < 0.02);
    }
  }
}

TEST_CASE("generated membrane layers leave no gaps") {
  for (auto infill : {InfillPattern::Lines, InfillPattern::Concentric}) {
    for (int perims : {0, 1, 2}) {
      auto spec = membrane(2, infill);
      spec.perimeter_loops = perims;
      const auto path = plan_membrane(spec);
      for (std::size_t layer = 0; layer < 2; ++layer) {
        const auto rep = verify_coverage(path, layer, CircleRegion{{0, 0}, 21.0}, 0.0);
        CHECK(rep.interior_cells > 100000);
        CHECK(rep.airtight_candidate());
      }
    }
  }
  // odd diameters leave a centre hole that the fill has to close
  for (double d : {1.0, 1.1, 3.3, 10.7}) {
    auto spec = membrane(1, InfillPattern::Concentric);
    spec.diameter_mm = d;
    const auto rep = verify_coverage(plan_membrane(spec), 0, CircleRegion{{0, 0}, d / 2}, 0.0);
    CHECK_MESSAGE(rep.airtight_candidate(), "diameter ", d);
  }
}

TEST_CASE("coverage detects removed loops and empty layers") {
  const auto loops = plan_concentric(21.0, 0.4);
  Toolpath sparse;
  for (std::size_t k = 0; k < loops.size(); k += 2) {
    const auto ring = circle_polyline({}, loops[k].radius, 0.01);
    sparse.travel_to({ring[0].x, ring[0].y, 0.2}, 80, 0);
    for (std::size_t i = 1; i <= ring.size(); ++i) {
      Move m;
      m.kind = MoveKind::Extrude;
      m.start = *sparse.end_point();
      m.end = {ring[i % ring.size()].x, ring[i % ring.size()].y, 0.2};
      m.width_mm = 0.4;
      m.layer_height_mm = 0.2;
      m.feedrate_mm_s = 20;
      sparse.push_back(m);
    }
  }
  const auto rep = verify_coverage(sparse, 0, CircleRegion{{0, 0}, 21.0}, 0.0);
  CHECK_FALSE(rep.airtight_candidate());
  // away from the centre (which the sparse set leaves open too) the bands
  // between the remaining loops are one line width wide
  double band = 0.0;
  for (const auto& g : rep.gaps)
    if (std::hypot(g.center.x, g.center.y) > 2.0) band = std::max(band, 2.0 * g.clearance_mm);
  CHECK(band == doctest::Approx(0.4).epsilon(0.05));
  CHECK(rep.gap_width_mm() >= band);

  Toolpath empty;
  empty.travel_to({0, 0, 0.2}, 80, 0);
  CoverageOptions opt;
  opt.cell_mm = 0.1;
  const auto all = verify_coverage(empty, 0, CircleRegion{{0, 0}, 2.0}, 0.0, opt);
  CHECK(all.gaps.size() == all.interior_cells);
  CHECK(all.interior_cells > 1000);
  CHECK_THROWS_AS(verify_coverage(empty, 0, CircleRegion{{0, 0}, 2.0}, 0.0), ArgumentError);
  CHECK_THROWS_AS(verify_coverage(empty, 1, CircleRegion{{0, 0}, 2.0}, 0.0, opt), ArgumentError);
}

TEST_CASE("extrusion amount and calibration") {
  const auto id = CalibrationTable::identity();
  CHECK(extrusion_amount(10, 0.4, 0.2, 1.0, id, 20) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(extrusion_amount(10, 0.4, 0.2, 1.5, id, 20) == doctest::Approx(1.2).epsilon(1e-12));
  const CalibrationTable t({{10, 0.9}, {30, 1.1}});
  CHECK(extrusion_amount(10, 0.4, 0.2, 1.0, t, 20) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(t.factor(5) == 0.9);
  CHECK(t.factor(100) == 1.1);
  CHECK(t.factor(15) == doctest::Approx(0.95));
  CHECK_THROWS_AS(CalibrationTable(std::vector<CalibrationEntry>{}), ConfigError);
  CHECK_THROWS_AS(extrusion_amount(10, 0.4, 0.2, 1.0, CalibrationTable{}, 20), ConfigError);
  CHECK_THROWS_AS(CalibrationTable({{10, 1.0}, {10, 1.0}}), ArgumentError);
  CHECK_THROWS_AS(CalibrationTable({{10, 0.0}}), ArgumentError);
}

TEST_CASE("emit dialect") {
  PrinterProfile prof;
  const auto empty = serialize(emit_gcode(Toolpath{}, prof));
  CHECK(empty == "G21\nG90\nM83\nM84\n");

  const auto text = serialize(emit_gcode(one_move(0, {0, 0, 0.2}, {10, 0, 0.2}), prof));
  CHECK(text.find("G1 X10.00000 Y0.00000 E0.80000 F1200.00000\n") != std::string::npos);
  CHECK(text.find("M104 S200.00000 T0\nM109 S200.00000 T0\n") != std::string::npos);
  CHECK(text.back() == '\n');

  auto two = one_move(0, {0, 0, 0.2}, {10, 0, 0.2});
  two.append([&] {
    auto p = one_move(1, {10, 0, 0.2}, {20, 0, 0.2});
    return p;
  }());
  prof.tools = {{0, 200}, {1, 210}};
  CHECK(count_tool_changes(emit_gcode(two, prof)) == 2);
  prof.tools = {{0, 200}};
  CHECK_THROWS_AS(emit_gcode(two, prof), ConfigError);

  // prime and retract adjust the ends of each extrusion run
  prof.prime_e_mm3 = 0.05;
  prof.retract_e_mm3 = 0.02;
  const auto g = emit_gcode(one_move(0, {0, 0, 0.2}, {10, 0, 0.2}), prof);
  CHECK(total_extrusion(g) == doctest::Approx(0.83));
}

TEST_CASE("parse and round trip") {
  auto p = parse_gcode("; comment only\n");
  CHECK(p.commands.empty());
  p = parse_gcode("G1 X10 Y0 E0.8 F1200");
  REQUIRE(p.commands.size() == 1);
  const auto& c = p.commands[0];
  CHECK(c.code == "G1");
  REQUIRE(c.params.size() == 4);
  CHECK(c.param('X')->value == 10);
  CHECK(c.param('Y')->value == 0);
  CHECK(c.param('E')->value == 0.8);
  CHECK(c.param('F')->value == 1200);

  p = parse_gcode("\n  ; hi\nM999 P3 Q ; opaque\nG28 X\n");
  REQUIRE(p.commands.size() == 2);
  CHECK(p.commands[0].line_no == 3);
  CHECK(p.commands[0].code == "M999");
  CHECK_FALSE(p.commands[0].param('Q')->has_value);

  auto line_of = [](const char* text) -> std::size_t {
    try {
      parse_gcode(text);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("G21\nG1 X1.2.3 Y0 E1\n") == 2);
  CHECK(line_of("G21\n\n; x\nG1 X1 Yabc\n") == 4);
  CHECK(line_of("1G\n") == 1);
  CHECK(line_of("G1 E0.5\n") == 1);
  CHECK(line_of("G1 X1 5\n") == 1);

  PrinterProfile prof;
  prof.bed_center_x_mm = 110;
  prof.bed_center_y_mm = 110;
  const auto prog = emit_gcode(plan_membrane(membrane(3, InfillPattern::Lines)), prof);
  const auto text = serialize(prog);
  const auto back = parse_gcode(text);
  CHECK(serialize(back) == text);
}

TEST_CASE("scanline clipping") {
  const Ring square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  const auto cs = scanline_chords({square}, 0.5, 0.0);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].a.y == doctest::Approx(0.25));
  CHECK(cs[1].a.y == doctest::Approx(0.75));
  for (const auto& c : cs) CHECK(c.length() == doctest::Approx(1.0).epsilon(1e-12));

  const auto rs = scanline_chords({rotate(square, 45)}, 0.5, 45.0);
  REQUIRE(rs.size() == 2);
  for (const auto& c : rs) CHECK(c.length() == doctest::Approx(1.0).epsilon(1e-9));

  // even-odd: a hole splits each chord crossing it
  const Ring outer{{-2, -2}, {2, -2}, {2, 2}, {-2, 2}};
  const Ring hole{{-1, -1}, {-1, 1}, {1, 1}, {1, -1}};
  double total = 0.0;
  for (const auto& c : scanline_chords({outer, hole}, 0.5, 0.0)) total += c.length();
  CHECK(total * 0.5 == doctest::Approx(16.0 - 4.0));

  // random convex polygons: chord length x spacing approximates the area
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    Ring poly;
    for (int i = 0; i < 12; ++i) {
      const double a = 2 * kPi * i / 12;
      const double r = u(rng);
      poly.push_back({r * std::cos(a), r * std::sin(a)});
    }
    double sum = 0.0;
    for (const auto& c : scanline_chords({poly}, 0.01, u(rng) * 60)) sum += c.length() * 0.01;
    CHECK(sum == doctest::Approx(std::abs(ring_area(poly))).epsilon(0.01));
  }
}

TEST_CASE("dogbone") {
  const auto outline = dumbbell_outline();
  CHECK(ring_area(outline) > 0.0);
  double x_max = 0, y_max = 0, y_min_mid = 1e9;
  for (const auto& p : outline) {
    x_max = std::max(x_max, p.x);
    y_max = std::max(y_max, p.y);
    if (std::abs(p.x) < 12.5) y_min_mid = std::min(y_min_mid, std::abs(p.y));
  }
  CHECK(x_max == doctest::Approx(37.5));
  CHECK(y_max == doctest::Approx(6.25));
  CHECK(y_min_mid == doctest::Approx(2.0));

  DogboneSpec spec;
  spec.layers = 2;
  const auto path = plan_dogbone(outline, spec);
  CHECK(is_chained(path.moves()));
  CHECK(path.layer_heights().size() == 2);
  const auto rep = verify_coverage(path, 0, PolygonRegion{outline}, 0.0);
  CHECK(rep.interior_cells > 1000);

  const Ring flat{{0, 0}, {1, 0}, {2, 0}};
  CHECK_THROWS_AS(plan_dogbone(flat, spec), GeometryError);
  const Ring bowtie{{0, 0}, {2, 2}, {2, 0}, {0, 2}};
  CHECK_THROWS_AS(plan_dogbone(bowtie, spec), GeometryError);
}

TEST_CASE("dual-tool rings") {
  RingsSpec spec;
  spec.bands = {{0.0, 8.0, 0}, {8.0, 10.0, 1}};
  spec.layers = 5;
  const auto path = plan_rings(spec);
  CHECK(is_chained(path.moves()));
  PrinterProfile prof;
  prof.tools = {{0, 200}, {1, 210}};
  // first tool selection, then one change per layer boundary that swaps tools
  CHECK(count_tool_changes(emit_gcode(path, prof)) == 1 + spec.layers);
  spec.alternate_order = false;
  CHECK(count_tool_changes(emit_gcode(plan_rings(spec), prof)) == 2 * spec.layers);
  const auto rep = verify_coverage(path, 0, CircleRegion{{0, 0}, 10.0}, 0.0);
  CHECK(rep.airtight_candidate());
}

TEST_CASE("toolpath invariants are enforced") {
  Toolpath p;
  p.travel_to({0, 0, 0.2}, 80, 0);
  Move m;
  m.kind = MoveKind::Extrude;
  m.start = {1, 0, 0.2};
  m.end = {2, 0, 0.2};
  m.width_mm = 0.4;
  m.layer_height_mm = 0.2;
  m.feedrate_mm_s = 20;
  CHECK_THROWS_AS(p.push_back(m), ArgumentError);
  m.start = {0, 0, 0.2};
  m.width_mm = 0.0;
  CHECK_THROWS_AS(p.push_back(m), ArgumentError);
}
