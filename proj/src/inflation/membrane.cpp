#include "tpekit/inflation/membrane.hpp"

#include <cmath>
#include <sstream>

#include "tpekit/error.hpp"

namespace tpekit::inflation {

namespace {

void require_theta(double theta) {
  if (!(theta > 0.0 && theta <= kThetaMax)) {
    std::ostringstream os;
    os.precision(17);
    os << "cap half-angle " << theta << " rad outside (0, pi - 1e-6]";
    throw DomainError(os.str());
  }
}

}  // namespace

void MembraneSpec::validate() const {
  if (!(radius_a_mm > 0.0)) throw ArgumentError("membrane radius must be > 0");
  if (!(thickness_t0_mm > 0.0)) throw ArgumentError("membrane thickness must be > 0");
  if (layers < 1) throw ArgumentError("membrane needs at least one layer");
  material::validate(material);
}

double cap_stretch(double theta) {
  if (std::abs(theta) < kSeriesThreshold) {
    const double t2 = theta * theta;
    return 1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0 + 31.0 * t2 * t2 * t2 / 15120.0;
  }
  return theta / std::sin(theta);
}

double cap_volume(double theta, double a) {
  const double r = a / std::sin(theta);
  const double h = a * std::tan(0.5 * theta);
  return std::numbers::pi * h * h * (3.0 * r - h) / 3.0;
}

CapKinematics cap_kinematics(double theta, double a) {
  require_theta(theta);
  if (!(a > 0.0)) throw ArgumentError("aperture radius must be > 0");
  CapKinematics k;
  k.theta = theta;
  k.stretch = cap_stretch(theta);
  k.cap_radius_mm = a / std::sin(theta);
  k.apex_height_mm = a * std::tan(0.5 * theta);
  k.enclosed_volume_mm3 = cap_volume(theta, a);
  return k;
}

double cap_pressure(const MembraneSpec& spec, double theta) {
  return inflation_state(spec, theta).pressure_kpa;
}

InflationState inflation_state(const MembraneSpec& spec, double theta) {
  const CapKinematics k = cap_kinematics(theta, spec.radius_a_mm);
  InflationState s;
  s.theta = theta;
  s.stretch = k.stretch;
  s.cap_radius_mm = k.cap_radius_mm;
  s.apex_height_mm = k.apex_height_mm;
  s.enclosed_volume_mm3 = k.enclosed_volume_mm3;
  s.current_thickness_mm = spec.thickness_t0_mm / (k.stretch * k.stretch);
  double sigma = 0.0;
  try {
    sigma = material::equibiaxial_cauchy_stress(spec.material, k.stretch);
  } catch (const DomainError& e) {
    std::ostringstream os;
    os.precision(17);
    os << e.what() << " at cap half-angle " << theta << " rad";
    throw DomainError(os.str());
  }
  // MPa * mm / mm = MPa -> kPa
  s.pressure_kpa = 2.0 * s.current_thickness_mm * sigma * std::sin(theta) / spec.radius_a_mm * 1000.0;
  return s;
}

double admissible_theta_limit(const MembraneSpec& spec) {
  const double lock = material::equibiaxial_locking_stretch(spec.material);
  if (!std::isfinite(lock) || lock >= cap_stretch(kThetaMax)) return kThetaMax;
  double lo = 0.0, hi = kThetaMax;
  for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cap_stretch(mid) < lock ? lo : hi) = mid;
  }
  return lo * (1.0 - 1e-12);
}

std::vector<InflationState> pressure_stretch_curve(const MembraneSpec& spec, double theta_max,
                                                   int n_points) {
  spec.validate();
  if (n_points < 2) throw ArgumentError("pressure-stretch curve needs at least 2 points");
  require_theta(theta_max);
  const double limit = admissible_theta_limit(spec);
  std::vector<InflationState> out;
  out.reserve(static_cast<std::size_t>(n_points));
  for (int k = 0; k < n_points; ++k) {
    // first point just off zero so the flat state is represented
    const double theta =
        k == 0 ? std::min(1e-9, theta_max) : theta_max * static_cast<double>(k) / (n_points - 1);
    if (theta > limit) break;
    out.push_back(inflation_state(spec, theta));
  }
  return out;
}

}  // namespace tpekit::inflation
