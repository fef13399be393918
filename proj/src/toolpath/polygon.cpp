#include <algorithm>
#include <boost/geometry.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "tpekit/error.hpp"
#include "tpekit/toolpath/path.hpp"

namespace tpekit::toolpath {

namespace detail {
void closed_ring_moves(Toolpath& path, const Ring& ring, double z, double width, double lh,
                       double multiplier, double feed, double travel_feed, int tool);
void chord_moves(Toolpath& path, const std::vector<Chord>& cs, double z, double width, double lh,
                 double multiplier, double feed, double travel_feed, int tool);
}  // namespace detail

namespace {

namespace bg = boost::geometry;
using BPoint = bg::model::d2::point_xy<double>;
using BPolygon = bg::model::polygon<BPoint, false, true>;  // counter-clockwise, closed
using BMulti = bg::model::multi_polygon<BPolygon>;

BPolygon to_polygon(const Ring& ring) {
  BPolygon poly;
  for (const auto& p : ring) bg::append(poly.outer(), BPoint(p.x, p.y));
  if (!ring.empty()) bg::append(poly.outer(), BPoint(ring[0].x, ring[0].y));
  return poly;
}

template <typename BRing>
Ring from_ring(const BRing& r) {
  Ring out;
  for (std::size_t i = 0; i + 1 < r.size(); ++i) out.push_back({r[i].x(), r[i].y()});
  return out;
}

std::vector<Ring> rings_of(const BMulti& m) {
  std::vector<Ring> out;
  for (const auto& poly : m) {
    out.push_back(from_ring(poly.outer()));
    for (const auto& hole : poly.inners()) out.push_back(from_ring(hole));
  }
  return out;
}

BMulti inset(const BPolygon& poly, double distance) {
  BMulti out;
  bg::strategy::buffer::distance_symmetric<double> dist(-distance);
  bg::strategy::buffer::side_straight side;
  bg::strategy::buffer::join_miter join;
  bg::strategy::buffer::end_flat end;
  bg::strategy::buffer::point_circle point;
  bg::buffer(poly, out, dist, side, join, end, point);
  return out;
}

Vec2 rot(Vec2 p, double angle_deg) {
  const double a = angle_deg * std::numbers::pi / 180.0;
  const double c = std::cos(a), s = std::sin(a);
  return {p.x * c - p.y * s, p.x * s + p.y * c};
}

}  // namespace

std::vector<Chord> scanline_chords(const std::vector<Ring>& rings, double spacing,
                                   double angle_deg) {
  if (!(spacing > 0.0)) throw ArgumentError("scanline spacing must be > 0");
  std::vector<Ring> local;
  double y_min = INFINITY, y_max = -INFINITY;
  for (const auto& r : rings) {
    local.push_back(rotate(r, -angle_deg));
    for (const auto& p : local.back()) {
      y_min = std::min(y_min, p.y);
      y_max = std::max(y_max, p.y);
    }
  }
  std::vector<Chord> out;
  if (!(y_max > y_min)) return out;

  std::vector<double> xs;
  std::size_t line_no = 0;
  for (int j = 0;; ++j) {
    const double y = y_min + spacing / 2.0 + j * spacing;
    if (!(y < y_max)) break;
    xs.clear();
    for (const auto& r : local) {
      for (std::size_t i = 0, n = r.size(); i < n; ++i) {
        const Vec2& p = r[i];
        const Vec2& q = r[(i + 1) % n];
        if ((p.y > y) != (q.y > y)) xs.push_back(p.x + (y - p.y) * (q.x - p.x) / (q.y - p.y));
      }
    }
    std::sort(xs.begin(), xs.end());
    std::vector<Chord> row;
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2)
      if (xs[i + 1] > xs[i]) row.push_back({{xs[i], y}, {xs[i + 1], y}, y});
    if (row.empty()) continue;
    if (line_no % 2 == 1) {
      std::reverse(row.begin(), row.end());
      for (auto& c : row) std::swap(c.a, c.b);
    }
    ++line_no;
    for (auto& c : row) out.push_back({rot(c.a, angle_deg), rot(c.b, angle_deg), y});
  }
  return out;
}

Toolpath plan_dogbone(const Ring& outline, const DogboneSpec& spec) {
  if (spec.layers < 1 || !(spec.layer_height_mm > 0.0) || !(spec.line_width_mm > 0.0) ||
      !(spec.multiplier > 0.0) || spec.perimeter_loops < 0 || !(spec.print_speed_mm_s > 0.0) ||
      !(spec.travel_speed_mm_s > 0.0))
    throw ArgumentError("invalid dogbone print parameters");
  if (outline.size() < 3) throw GeometryError("outline needs at least 3 vertices");
  BPolygon poly = to_polygon(outline);
  bg::correct(poly);
  if (!(std::abs(bg::area(poly)) > 1e-12)) throw GeometryError("outline has zero area");
  std::string why;
  if (!bg::is_valid(poly, why)) throw GeometryError("outline is not a simple polygon: " + why);

  const double w = spec.line_width_mm;
  std::vector<std::vector<Ring>> perimeters;
  for (int k = 0; k < spec.perimeter_loops; ++k)
    perimeters.push_back(rings_of(inset(poly, (k + 0.5) * w)));
  const std::vector<Ring> region =
      spec.perimeter_loops > 0 ? rings_of(inset(poly, spec.perimeter_loops * w))
                               : rings_of(BMulti{poly});

  Toolpath path;
  for (int k = 0; k < spec.layers; ++k) {
    const double z = (k + 1) * spec.layer_height_mm;
    for (const auto& rings : perimeters)
      for (const auto& r : rings)
        detail::closed_ring_moves(path, r, z, w, spec.layer_height_mm, spec.multiplier,
                                  spec.print_speed_mm_s, spec.travel_speed_mm_s, spec.tool);
    const double angle = spec.infill_angle_deg + k * spec.angle_step_deg;
    detail::chord_moves(path, scanline_chords(region, w, angle), z, w, spec.layer_height_mm,
                        spec.multiplier, spec.print_speed_mm_s, spec.travel_speed_mm_s, spec.tool);
  }
  if (path.empty()) throw GeometryError("outline too small for the line width");
  return path;
}

Ring dumbbell_outline(double chordal_tol) {
  if (!(chordal_tol > 0.0)) throw ArgumentError("chordal tolerance must be > 0");
  constexpr double half_len = 37.5, end_half_w = 6.25, narrow_half_w = 2.0, narrow_half_len = 12.5;
  constexpr double r1 = 12.5, r2 = 8.0;
  const Vec2 c1{narrow_half_len, narrow_half_w + r1};
  const double dy = c1.y - (end_half_w - r2);
  const Vec2 c2{c1.x + std::sqrt((r1 + r2) * (r1 + r2) - dy * dy), end_half_w - r2};

  auto arc = [&](Ring& out, Vec2 c, double r, double a0, double a1) {
    const double step = 2.0 * std::acos(1.0 - std::min(chordal_tol / r, 1.0));
    const int n = std::max(1, static_cast<int>(std::ceil(std::abs(a1 - a0) / step)));
    for (int i = 1; i <= n; ++i) {
      const double a = a0 + (a1 - a0) * i / n;
      out.push_back({c.x + r * std::cos(a), c.y + r * std::sin(a)});
    }
  };
  // upper-right quarter, from the axis outwards
  Ring q{{0.0, narrow_half_w}, {narrow_half_len, narrow_half_w}};
  const double a_t = std::atan2(c2.y - c1.y, c2.x - c1.x);
  arc(q, c1, r1, -std::numbers::pi / 2.0, a_t);
  arc(q, c2, r2, a_t + std::numbers::pi, std::numbers::pi / 2.0);
  q.back() = {c2.x, end_half_w};
  q.push_back({half_len, end_half_w});

  Ring ring;
  ring.push_back({half_len, -end_half_w});
  for (auto it = q.rbegin(); it != q.rend(); ++it) ring.push_back(*it);
  for (std::size_t i = 1; i < q.size(); ++i) ring.push_back({-q[i].x, q[i].y});
  for (auto it = q.rbegin(); it != q.rend(); ++it) ring.push_back({-it->x, -it->y});
  for (std::size_t i = 1; i + 1 < q.size(); ++i) ring.push_back({q[i].x, -q[i].y});
  return ring;
}

}  // namespace tpekit::toolpath
