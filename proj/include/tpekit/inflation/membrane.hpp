#pragma once
// Clamped circular membrane inflated into a uniform-stretch spherical cap.
//
// One degree of freedom: the cap half-angle theta. For aperture radius a,
//   stretch   = theta / sin(theta)   (meridian arc over clamped diameter)
//   R         = a / sin(theta)
//   apex h    = R (1 - cos theta) = a tan(theta / 2)
//   volume    = pi h^2 (3R - h) / 3
//   thickness = t0 / stretch^2
//   pressure  = 2 thickness sigma_biax(stretch) sin(theta) / a
// Lengths mm, stresses MPa, pressures kPa.

#include <numbers>
#include <vector>

#include "tpekit/material/hyperelastic.hpp"

namespace tpekit::inflation {

enum class Infill { Lines, Concentric };

struct MembraneSpec {
  double radius_a_mm = 21.0;
  double thickness_t0_mm = 0.6;
  int layers = 3;
  Infill infill = Infill::Lines;  // metadata only; the solver does not use it
  material::HyperelasticModel material = material::NeoHookean{0.1};

  // Throws ArgumentError on invalid geometry or material.
  void validate() const;
};

inline constexpr double kThetaMax = std::numbers::pi - 1e-6;
// Below this half-angle the stretch uses its Taylor series.
inline constexpr double kSeriesThreshold = 1e-4;

struct CapKinematics {
  double theta = 0.0;
  double stretch = 1.0;
  double cap_radius_mm = 0.0;
  double apex_height_mm = 0.0;
  double enclosed_volume_mm3 = 0.0;
};

struct InflationState {
  double theta = 0.0;
  double stretch = 1.0;
  double pressure_kpa = 0.0;
  double cap_radius_mm = 0.0;
  double apex_height_mm = 0.0;
  double current_thickness_mm = 0.0;
  double enclosed_volume_mm3 = 0.0;
};

// theta / sin(theta), exact above kSeriesThreshold.
double cap_stretch(double theta);
// Throws DomainError unless 0 < theta <= kThetaMax.
CapKinematics cap_kinematics(double theta, double radius_a_mm);
double cap_volume(double theta, double radius_a_mm);

double cap_pressure(const MembraneSpec& spec, double theta);
InflationState inflation_state(const MembraneSpec& spec, double theta);

// Largest admissible half-angle: kThetaMax, or just below the angle where a
// Gent material locks in equibiaxial tension.
double admissible_theta_limit(const MembraneSpec& spec);

// n_points states evenly spaced in theta over (0, theta_max]. States at or
// beyond a Gent locking angle are dropped, so the result can be shorter.
std::vector<InflationState> pressure_stretch_curve(const MembraneSpec& spec, double theta_max,
                                                   int n_points);

}  // namespace tpekit::inflation
