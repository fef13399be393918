#pragma once
// Raster check that a layer's beads leave no uncovered interior cell.

#include <variant>
#include <vector>

#include "tpekit/toolpath/path.hpp"

namespace tpekit::toolpath {

struct CircleRegion {
  Vec2 center;
  double radius = 0.0;
};

struct PolygonRegion {
  Ring outline;
};

using Region = std::variant<CircleRegion, PolygonRegion>;

struct CoverageOptions {
  // Grid pitch; 0 means a quarter of the narrowest bead in the layer.
  double cell_mm = 0.0;
  // Clearances up to max_gap + cell/2 pass (the raster cannot resolve less).
  // Beads farther than search_mm from a cell are ignored, so a cell with no
  // bead nearby reports an infinite clearance.
  double search_mm = 3.0;
};

struct GapCell {
  Vec2 center;
  double clearance_mm = 0.0;  // distance to the nearest bead edge
};

struct CoverageReport {
  std::size_t layer = 0;
  double z_mm = 0.0;
  double cell_mm = 0.0;
  std::size_t interior_cells = 0;
  std::vector<GapCell> gaps;
  double max_clearance_mm = 0.0;  // over reported cells

  bool airtight_candidate() const noexcept { return gaps.empty(); }
  // Width of the widest uncovered band, 2 * max clearance.
  double gap_width_mm() const noexcept { return 2.0 * max_clearance_mm; }
};

// `layer` indexes Toolpath::layer_heights(). Throws ArgumentError when the
// layer does not exist, or when it has no beads and no cell size is given.
CoverageReport verify_coverage(const Toolpath& path, std::size_t layer, const Region& region,
                               double max_gap_mm, const CoverageOptions& options = {});

}  // namespace tpekit::toolpath
