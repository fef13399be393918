#pragma once
// Extrusion toolpaths for flat single-region parts (membranes, dogbones,
// concentric rings). Plans are centered on the region; bed placement is
// applied when G-code is emitted.

#include <optional>
#include <vector>

namespace tpekit::toolpath {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

using Ring = std::vector<Vec2>;  // closed implicitly, last != first

enum class MoveKind { Travel, Extrude };

struct Move {
  MoveKind kind = MoveKind::Travel;
  Vec3 start;
  Vec3 end;
  double width_mm = 0.0;         // Extrude only
  double layer_height_mm = 0.0;  // Extrude only
  double multiplier = 1.0;       // Extrude only
  double feedrate_mm_s = 0.0;
  int tool = 0;

  double length() const noexcept;
};

// Moves chained end-to-start within kChainTolerance.
class Toolpath {
 public:
  static constexpr double kChainTolerance = 1e-9;

  Toolpath() = default;
  // Throws ArgumentError when the moves violate the invariants.
  explicit Toolpath(std::vector<Move> moves);

  const std::vector<Move>& moves() const noexcept { return moves_; }
  std::size_t size() const noexcept { return moves_.size(); }
  bool empty() const noexcept { return moves_.empty(); }

  // Appends a move; checks width and chaining against the previous move.
  void push_back(const Move& m);
  // Travel from the current end (or `to` itself when empty) to `to`.
  void travel_to(const Vec3& to, double feedrate_mm_s, int tool);
  void append(const Toolpath& other);

  // Distinct z heights in order of first appearance.
  std::vector<double> layer_heights() const;
  const Vec3* end_point() const noexcept { return moves_.empty() ? nullptr : &moves_.back().end; }

 private:
  std::vector<Move> moves_;
};

// Structural check; returns false instead of throwing.
bool is_chained(const std::vector<Move>& moves, double tol = Toolpath::kChainTolerance);

enum class InfillPattern { Lines, Concentric };

struct MembranePrintSpec {
  double diameter_mm = 42.0;
  int layers = 3;
  double layer_height_mm = 0.2;
  double line_width_mm = 0.4;
  InfillPattern infill = InfillPattern::Lines;
  int perimeter_loops = 1;
  // Unset: 1.5 for a single layer, 1.0 otherwise.
  std::optional<double> extrusion_multiplier;
  int tool = 0;
  double nozzle_temp_c = 200.0;
  double print_speed_mm_s = 20.0;
  double travel_speed_mm_s = 80.0;
  double first_angle_deg = 0.0;
  double angle_step_deg = 90.0;  // Lines rotation between successive layers
  double chordal_tol_mm = 0.01;

  void validate() const;
  double effective_multiplier() const;
};

inline constexpr double kSingleLayerMultiplier = 1.5;

struct Loop {
  Vec2 center;
  double radius = 0.0;
};

// Nested loops r_k = radius - w/2 - k w while r_k >= w/2, outermost first.
// Throws ArgumentError unless radius > w/2 and w > 0.
std::vector<Loop> plan_concentric(double radius, double line_width);

struct Chord {
  Vec2 a;
  Vec2 b;
  double offset = 0.0;  // signed distance of the chord line from the center
  double length() const noexcept;
};

// Chords of a circle at offsets j*spacing (|offset| < radius), rotated by
// angle_deg, in serpentine order. Half-length sqrt(r^2 - offset^2).
std::vector<Chord> plan_lines(double radius, double spacing, double angle_deg);

// Circle as a closed polyline whose sagitta is at most chordal_tol. The first
// vertex sits at angle start_deg.
Ring circle_polyline(Vec2 center, double radius, double chordal_tol, double start_deg = 0.0);

// Per layer: perimeter loops, then infill. Layer k sits at z = (k+1) lh.
// Throws ArgumentError on an invalid spec, GeometryError when nothing is left
// to infill inside the perimeters.
Toolpath plan_membrane(const MembranePrintSpec& spec);

// Even-odd scanline clip of parallel lines against a set of rings. Lines sit
// at offsets min + spacing/2 + j*spacing across the rotated extent.
std::vector<Chord> scanline_chords(const std::vector<Ring>& rings, double spacing,
                                   double angle_deg);

struct DogboneSpec {
  int layers = 10;
  double layer_height_mm = 0.2;
  double line_width_mm = 0.4;
  int perimeter_loops = 1;
  double infill_angle_deg = 0.0;
  double angle_step_deg = 90.0;
  double multiplier = 1.0;
  double print_speed_mm_s = 20.0;
  double travel_speed_mm_s = 80.0;
  int tool = 0;
};

// Perimeters inset from the outline, then lines infill clipped to the
// remaining region. Throws GeometryError for self-intersecting or zero-area
// outlines.
Toolpath plan_dogbone(const Ring& outline, const DogboneSpec& spec);

// ISO 37 type 2 style dumbbell centered on the origin, long axis along x:
// 75 mm overall, 12.5 mm ends, 4 mm x 25 mm narrow section, 12.5/8 mm fillets.
Ring dumbbell_outline(double chordal_tol = 0.01);

struct RingBand {
  double inner_radius_mm = 0.0;  // 0 for a full disc
  double outer_radius_mm = 0.0;
  int tool = 0;
};

struct RingsSpec {
  std::vector<RingBand> bands;
  int layers = 4;
  double layer_height_mm = 0.2;
  double line_width_mm = 0.4;
  double multiplier = 1.0;
  double print_speed_mm_s = 20.0;
  double travel_speed_mm_s = 80.0;
  double chordal_tol_mm = 0.01;
  // Reverse the band order on odd layers so the tool in use carries over.
  bool alternate_order = true;
};

// Concentric annuli, each filled with loops by its own tool (e.g. a soft
// sucker lip printed from pellets inside a rigid filament ring).
Toolpath plan_rings(const RingsSpec& spec);

// Signed area (counter-clockwise positive).
double ring_area(const Ring& ring);
Ring rotate(const Ring& ring, double angle_deg);

}  // namespace tpekit::toolpath
