#include <algorithm>
#include <cmath>
#include <numbers>

#include "tpekit/error.hpp"
#include "tpekit/toolpath/path.hpp"

namespace tpekit::toolpath {

namespace {

constexpr double kPi = std::numbers::pi;

Vec2 rotated(Vec2 p, double angle_deg) {
  const double a = angle_deg * kPi / 180.0;
  const double c = std::cos(a), s = std::sin(a);
  return {p.x * c - p.y * s, p.x * s + p.y * c};
}

struct Bead {
  double width, layer_height, multiplier, feedrate, travel_feedrate;
  int tool;
};

void extrude_to(Toolpath& path, Vec3 to, const Bead& b) {
  Move m;
  m.kind = MoveKind::Extrude;
  m.start = *path.end_point();
  m.end = to;
  m.width_mm = b.width;
  m.layer_height_mm = b.layer_height;
  m.multiplier = b.multiplier;
  m.feedrate_mm_s = b.feedrate;
  m.tool = b.tool;
  path.push_back(m);
}

void closed_ring(Toolpath& path, const Ring& ring, double z, const Bead& b) {
  if (ring.size() < 2) return;
  path.travel_to({ring[0].x, ring[0].y, z}, b.travel_feedrate, b.tool);
  for (std::size_t i = 1; i < ring.size(); ++i) extrude_to(path, {ring[i].x, ring[i].y, z}, b);
  extrude_to(path, {ring[0].x, ring[0].y, z}, b);
}

void chords(Toolpath& path, const std::vector<Chord>& cs, double z, const Bead& b) {
  for (const auto& c : cs) {
    path.travel_to({c.a.x, c.a.y, z}, b.travel_feedrate, b.tool);
    extrude_to(path, {c.b.x, c.b.y, z}, b);
  }
}

// Serpentine chords whose beads tile the band |offset| <= radius exactly: each
// chord is long enough to reach the circle anywhere across its own strip.
std::vector<Chord> strip_chords(Vec2 center, double radius, double width, double angle_deg,
                                bool centered_strips) {
  std::vector<double> offsets;
  if (centered_strips) {
    // strips centred on the diameter: offsets j*w, |offset| < radius
    int j_max = 0;
    while ((j_max + 1) * width < radius) ++j_max;
    for (int j = -j_max; j <= j_max; ++j) offsets.push_back(j * width);
  } else {
    const int n = std::max(1, static_cast<int>(std::ceil(2.0 * radius / width - 1e-12)));
    for (int i = 0; i < n; ++i) offsets.push_back(-n * width / 2.0 + width / 2.0 + i * width);
  }
  std::vector<Chord> out;
  for (std::size_t i = 0; i < offsets.size(); ++i) {
    const double y = offsets[i];
    const double e = std::max(std::abs(y) - width / 2.0, 0.0);
    if (e >= radius) continue;
    const double half = std::sqrt(radius * radius - e * e);
    Vec2 a{-half, y}, b{half, y};
    if (out.size() % 2 == 1) std::swap(a, b);
    a = rotated(a, angle_deg);
    b = rotated(b, angle_deg);
    out.push_back({{center.x + a.x, center.y + a.y}, {center.x + b.x, center.y + b.y}, y});
  }
  return out;
}

}  // namespace

double Chord::length() const noexcept { return std::hypot(b.x - a.x, b.y - a.y); }

void MembranePrintSpec::validate() const {
  if (!(diameter_mm > 0.0)) throw ArgumentError("diameter must be > 0");
  if (layers < 1) throw ArgumentError("layers must be >= 1");
  if (!(layer_height_mm > 0.0)) throw ArgumentError("layer height must be > 0");
  if (!(line_width_mm > 0.0)) throw ArgumentError("line width must be > 0");
  if (perimeter_loops < 0) throw ArgumentError("perimeter loops must be >= 0");
  if (extrusion_multiplier && !(*extrusion_multiplier > 0.0))
    throw ArgumentError("extrusion multiplier must be > 0");
  if (tool < 0) throw ArgumentError("tool index must be >= 0");
  if (!(print_speed_mm_s > 0.0) || !(travel_speed_mm_s > 0.0))
    throw ArgumentError("speeds must be > 0");
  if (!(chordal_tol_mm > 0.0)) throw ArgumentError("chordal tolerance must be > 0");
  if (!std::isfinite(first_angle_deg) || !std::isfinite(angle_step_deg))
    throw ArgumentError("infill angles must be finite");
}

double MembranePrintSpec::effective_multiplier() const {
  if (extrusion_multiplier) return *extrusion_multiplier;
  return layers == 1 ? kSingleLayerMultiplier : 1.0;
}

std::vector<Loop> plan_concentric(double radius, double line_width) {
  if (!(line_width > 0.0)) throw ArgumentError("line width must be > 0");
  if (!(radius > line_width / 2.0))
    throw ArgumentError("radius too small for a single bead: empty concentric plan");
  std::vector<Loop> loops;
  for (int k = 0;; ++k) {
    const double r = radius - line_width / 2.0 - k * line_width;
    if (r < line_width / 2.0 - 1e-12) break;
    loops.push_back({{0.0, 0.0}, r});
  }
  return loops;
}

std::vector<Chord> plan_lines(double radius, double spacing, double angle_deg) {
  if (!(radius > 0.0)) throw ArgumentError("radius must be > 0");
  if (!(spacing > 0.0)) throw ArgumentError("spacing must be > 0");
  int j_max = 0;
  while ((j_max + 1) * spacing < radius) ++j_max;
  std::vector<Chord> out;
  for (int j = -j_max; j <= j_max; ++j) {
    const double y = j * spacing;
    const double half = std::sqrt(radius * radius - y * y);
    Vec2 a{-half, y}, b{half, y};
    if ((j + j_max) % 2 == 1) std::swap(a, b);
    out.push_back({rotated(a, angle_deg), rotated(b, angle_deg), y});
  }
  return out;
}

Ring circle_polyline(Vec2 center, double radius, double chordal_tol, double start_deg) {
  if (!(radius > 0.0)) throw ArgumentError("circle radius must be > 0");
  if (!(chordal_tol > 0.0)) throw ArgumentError("chordal tolerance must be > 0");
  const double c = 1.0 - std::min(chordal_tol / radius, 1.0);
  const int n = std::max(8, static_cast<int>(std::ceil(kPi / std::acos(c))));
  Ring ring;
  ring.reserve(n);
  const double a0 = start_deg * kPi / 180.0;
  for (int i = 0; i < n; ++i) {
    const double a = a0 + 2.0 * kPi * i / n;
    ring.push_back({center.x + radius * std::cos(a), center.y + radius * std::sin(a)});
  }
  return ring;
}

Toolpath plan_membrane(const MembranePrintSpec& spec) {
  spec.validate();
  const double radius = spec.diameter_mm / 2.0;
  const double w = spec.line_width_mm;
  const double infill_radius = radius - spec.perimeter_loops * w;
  if (!(infill_radius > 1e-9))
    throw GeometryError("infill region is empty after " + std::to_string(spec.perimeter_loops) +
                        " perimeter loops");
  const Bead bead{w,
                  spec.layer_height_mm,
                  spec.effective_multiplier(),
                  spec.print_speed_mm_s,
                  spec.travel_speed_mm_s,
                  spec.tool};

  Toolpath path;
  for (int k = 0; k < spec.layers; ++k) {
    const double z = (k + 1) * spec.layer_height_mm;
    for (int p = 0; p < spec.perimeter_loops; ++p) {
      const double r = radius - w / 2.0 - p * w;
      closed_ring(path, circle_polyline({}, r, spec.chordal_tol_mm), z, bead);
    }
    if (spec.infill == InfillPattern::Lines) {
      const double angle = spec.first_angle_deg + k * spec.angle_step_deg;
      chords(path, strip_chords({}, infill_radius, w, angle, true), z, bead);
    } else {
      double hole = infill_radius;
      if (infill_radius > w / 2.0) {
        const auto loops = plan_concentric(infill_radius, w);
        for (const auto& l : loops)
          closed_ring(path, circle_polyline(l.center, l.radius, spec.chordal_tol_mm), z, bead);
        hole = loops.back().radius - w / 2.0;
      }
      if (hole > 1e-9) chords(path, strip_chords({}, hole, w, 0.0, false), z, bead);
    }
  }
  return path;
}

Toolpath plan_rings(const RingsSpec& spec) {
  const double w = spec.line_width_mm;
  if (spec.bands.empty()) throw ArgumentError("ring plan needs at least one band");
  if (spec.layers < 1 || !(spec.layer_height_mm > 0.0) || !(w > 0.0) || !(spec.multiplier > 0.0))
    throw ArgumentError("ring plan needs layers >= 1 and positive height, width, multiplier");
  for (const auto& b : spec.bands) {
    if (!(b.inner_radius_mm >= 0.0) || !(b.outer_radius_mm > b.inner_radius_mm))
      throw ArgumentError("ring band needs 0 <= inner < outer radius");
    if (b.inner_radius_mm > 0.0 && b.outer_radius_mm - b.inner_radius_mm < w - 1e-12)
      throw GeometryError("ring band narrower than one line width");
    if (b.tool < 0) throw ArgumentError("tool index must be >= 0");
  }

  Toolpath path;
  for (int k = 0; k < spec.layers; ++k) {
    const double z = (k + 1) * spec.layer_height_mm;
    std::vector<RingBand> order = spec.bands;
    if (spec.alternate_order && k % 2 == 1) std::reverse(order.begin(), order.end());
    for (const auto& band : order) {
      const Bead bead{w, spec.layer_height_mm, spec.multiplier, spec.print_speed_mm_s,
                      spec.travel_speed_mm_s, band.tool};
      double inner_edge = band.outer_radius_mm;
      for (int i = 0;; ++i) {
        const double r = band.outer_radius_mm - w / 2.0 - i * w;
        if (r < band.inner_radius_mm + w / 2.0 - 1e-12) break;
        closed_ring(path, circle_polyline({}, r, spec.chordal_tol_mm), z, bead);
        inner_edge = r - w / 2.0;
      }
      if (band.inner_radius_mm == 0.0 && inner_edge > 1e-9)
        chords(path, strip_chords({}, inner_edge, w, 0.0, false), z, bead);
    }
  }
  return path;
}

double ring_area(const Ring& ring) {
  double a = 0.0;
  for (std::size_t i = 0, n = ring.size(); i < n; ++i) {
    const auto& p = ring[i];
    const auto& q = ring[(i + 1) % n];
    a += p.x * q.y - q.x * p.y;
  }
  return a / 2.0;
}

Ring rotate(const Ring& ring, double angle_deg) {
  Ring out;
  out.reserve(ring.size());
  for (const auto& p : ring) out.push_back(rotated(p, angle_deg));
  return out;
}

namespace detail {
// Shared with the polygon planner.
void closed_ring_moves(Toolpath& path, const Ring& ring, double z, double width, double lh,
                       double multiplier, double feed, double travel_feed, int tool) {
  closed_ring(path, ring, z, {width, lh, multiplier, feed, travel_feed, tool});
}
void chord_moves(Toolpath& path, const std::vector<Chord>& cs, double z, double width, double lh,
                 double multiplier, double feed, double travel_feed, int tool) {
  chords(path, cs, z, {width, lh, multiplier, feed, travel_feed, tool});
}
}  // namespace detail

}  // namespace tpekit::toolpath
