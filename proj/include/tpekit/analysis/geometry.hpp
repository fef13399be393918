#pragma once
// Geometric fits on extracted point sets: membrane side profiles (ellipse,
// for stretch) and actuator markers (circle, for curvature).

#include <vector>

namespace tpekit::analysis {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Side-view boundary of an inflated membrane.
struct MembraneProfile {
  std::vector<Point> points;  // at least 6
  double base_diameter_l0_mm = 0.0;

  void validate() const;  // ArgumentError
};

struct Ellipse {
  Point center;
  double semi_major_mm = 0.0;
  double semi_minor_mm = 0.0;
  double rotation_rad = 0.0;  // of the major axis from +x
};

struct ConicFit {
  Ellipse ellipse;
  double phi_start = 0.0;  // eccentric-anomaly span covered by the points
  double phi_end = 0.0;
};

// Direct least-squares ellipse fit (Fitzgibbon, numerically stable
// Halir-Flusser form). Throws GeometryError when the best conic is not an
// ellipse.
ConicFit fit_ellipse(const std::vector<Point>& points);

// Arc length of an ellipse between eccentric anomalies, adaptive
// Gauss-Kronrod to the given relative tolerance.
double ellipse_arc_length(double a, double b, double phi0, double phi1, double rel_tol = 1e-9);

struct StretchEstimate {
  double stretch = 1.0;
  double stretch_percent = 100.0;  // stretch * 100
  double strain_percent = 0.0;     // (stretch - 1) * 100
  double arc_length_mm = 0.0;
  bool flat = false;  // straight profile: no ellipse fitted
  Ellipse ellipse;
};

// stretch = L / L0 with L the fitted-ellipse arc spanned by the profile points
// (half the perimeter for a semi-ellipse). A straight profile takes the flat
// path: L is its extent along the line.
StretchEstimate stretch_from_profile(const MembraneProfile& profile);

struct CurvatureEstimate {
  double radius_mm = 0.0;  // +inf for collinear markers
  double curvature_per_mm = 0.0;
  double bend_angle_deg = 0.0;
  Point center;
  bool collinear = false;
};

// Algebraic (Kasa) circle fit. bend_angle is the angle swept around the
// fitted center from the first to the last marker, following marker order.
// Throws ArgumentError for fewer than 3 points.
CurvatureEstimate curvature_from_markers(const std::vector<Point>& points);

}  // namespace tpekit::analysis
