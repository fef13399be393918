#include "tpekit/toolpath/coverage.hpp"

#include <algorithm>
#include <cmath>

#include "tpekit/error.hpp"
#include "tpekit/simd/kernels.hpp"

namespace tpekit::toolpath {

namespace {

bool inside(const Region& region, double x, double y) {
  if (const auto* c = std::get_if<CircleRegion>(&region)) {
    const double dx = x - c->center.x, dy = y - c->center.y;
    return dx * dx + dy * dy < c->radius * c->radius;
  }
  const Ring& r = std::get<PolygonRegion>(region).outline;
  bool in = false;
  for (std::size_t i = 0, n = r.size(), j = n - 1; i < n; j = i++) {
    if ((r[i].y > y) != (r[j].y > y) &&
        x < r[j].x + (y - r[j].y) * (r[i].x - r[j].x) / (r[i].y - r[j].y))
      in = !in;
  }
  return in;
}

void bounds(const Region& region, double& x0, double& y0, double& x1, double& y1) {
  if (const auto* c = std::get_if<CircleRegion>(&region)) {
    if (!(c->radius > 0.0)) throw ArgumentError("region radius must be > 0");
    x0 = c->center.x - c->radius;
    x1 = c->center.x + c->radius;
    y0 = c->center.y - c->radius;
    y1 = c->center.y + c->radius;
    return;
  }
  const Ring& r = std::get<PolygonRegion>(region).outline;
  if (r.size() < 3) throw ArgumentError("region polygon needs at least 3 vertices");
  x0 = y0 = INFINITY;
  x1 = y1 = -INFINITY;
  for (const auto& p : r) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
}

}  // namespace

CoverageReport verify_coverage(const Toolpath& path, std::size_t layer, const Region& region,
                               double max_gap, const CoverageOptions& options) {
  const auto zs = path.layer_heights();
  if (layer >= zs.size())
    throw ArgumentError("layer " + std::to_string(layer) + " does not exist (" +
                        std::to_string(zs.size()) + " layers)");
  if (!(max_gap >= 0.0)) throw ArgumentError("max gap must be >= 0");
  const double z = zs[layer];

  std::vector<const Move*> beads;
  double min_width = INFINITY;
  for (const auto& m : path.moves()) {
    if (m.kind != MoveKind::Extrude) continue;
    if (std::abs(m.start.z - z) > Toolpath::kChainTolerance ||
        std::abs(m.end.z - z) > Toolpath::kChainTolerance)
      continue;
    beads.push_back(&m);
    min_width = std::min(min_width, m.width_mm);
  }
  double cell = options.cell_mm;
  if (!(cell > 0.0)) {
    if (beads.empty()) throw ArgumentError("layer has no beads; give an explicit cell size");
    cell = min_width / 4.0;
  }
  const double pass = max_gap + cell / 2.0;

  double x0, y0, x1, y1;
  bounds(region, x0, y0, x1, y1);
  const auto nx = static_cast<std::size_t>(std::ceil((x1 - x0) / cell));
  const auto ny = static_cast<std::size_t>(std::ceil((y1 - y0) / cell));

  CoverageReport rep;
  rep.layer = layer;
  rep.z_mm = z;
  rep.cell_mm = cell;

  // Tiles of cells; each tile tests only the beads near it.
  const std::size_t tile = std::max<std::size_t>(8, static_cast<std::size_t>(2.0 / cell));
  simd::SegmentBatch batch;
  std::vector<double> px, py, clear;
  for (std::size_t ty = 0; ty < ny; ty += tile) {
    for (std::size_t tx = 0; tx < nx; tx += tile) {
      px.clear();
      py.clear();
      const std::size_t ex = std::min(nx, tx + tile), ey = std::min(ny, ty + tile);
      for (std::size_t j = ty; j < ey; ++j)
        for (std::size_t i = tx; i < ex; ++i) {
          const double x = x0 + (i + 0.5) * cell, y = y0 + (j + 0.5) * cell;
          if (inside(region, x, y)) {
            px.push_back(x);
            py.push_back(y);
          }
        }
      if (px.empty()) continue;
      rep.interior_cells += px.size();

      const double bx0 = x0 + tx * cell - options.search_mm, bx1 = x0 + ex * cell + options.search_mm;
      const double by0 = y0 + ty * cell - options.search_mm, by1 = y0 + ey * cell + options.search_mm;
      batch.clear();
      for (const Move* m : beads) {
        const double hw = m->width_mm / 2.0;
        if (std::max(m->start.x, m->end.x) + hw < bx0 || std::min(m->start.x, m->end.x) - hw > bx1 ||
            std::max(m->start.y, m->end.y) + hw < by0 || std::min(m->start.y, m->end.y) - hw > by1)
          continue;
        batch.add(m->start.x, m->start.y, m->end.x, m->end.y, hw);
      }
      clear.resize(px.size());
      simd::bead_clearance(px, py, batch, clear);
      for (std::size_t k = 0; k < px.size(); ++k) {
        if (clear[k] > pass) {
          rep.gaps.push_back({{px[k], py[k]}, clear[k]});
          rep.max_clearance_mm = std::max(rep.max_clearance_mm, clear[k]);
        }
      }
    }
  }
  return rep;
}

}  // namespace tpekit::toolpath
