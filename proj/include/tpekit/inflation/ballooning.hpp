#pragma once

#include <functional>

#include "tpekit/inflation/membrane.hpp"
#include "tpekit/material/hyperelastic.hpp"

namespace tpekit::inflation {

struct LocalMaximum {
  double x = 0.0;
  double value = 0.0;
  bool found = false;
};

// First interior local maximum of f over (lo, hi]: a dense scan of `samples`
// evenly spaced points, then golden-section refinement of the bracketing
// interval until it is narrower than `tolerance`. found=false when the scan
// never turns downward.
LocalMaximum first_local_maximum(const std::function<double(double)>& f, double lo, double hi,
                                 int samples = 2048, double tolerance = 1e-9);

struct BallooningResult {
  double p_balloon_kpa = 0.0;
  double stretch_at_limit = 0.0;
  double theta_at_limit = 0.0;
  bool found = false;
};

// Limit point of cap_pressure over the admissible half-angle range.
BallooningResult find_ballooning(const MembraneSpec& spec, int samples = 2048);

// Ideal thin-walled spherical balloon of reference radius r0 and wall t0:
//   P = 2 (t0 / r0) sigma_biax(stretch) / stretch^3   (kPa)
// Neo-Hookean reduces to 2 mu (t0/r0) (stretch^-1 - stretch^-7).
double sphere_pressure(const material::HyperelasticModel& model, double t0_mm, double r0_mm,
                       double stretch);

struct SphereLimit {
  double stretch_at_limit = 0.0;
  double p_limit_kpa = 0.0;
  bool found = false;
};

// Limit point of sphere_pressure over stretch in (1, stretch_max] (clipped
// below any Gent locking stretch).
SphereLimit find_sphere_limit(const material::HyperelasticModel& model, double t0_mm,
                              double r0_mm, double stretch_max = 10.0, int samples = 2048);

}  // namespace tpekit::inflation
