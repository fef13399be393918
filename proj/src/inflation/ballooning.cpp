#include "tpekit/inflation/ballooning.hpp"

#include <cmath>
#include <vector>

#include "tpekit/error.hpp"

namespace tpekit::inflation {

LocalMaximum first_local_maximum(const std::function<double(double)>& f, double lo, double hi,
                                 int samples, double tolerance) {
  if (samples < 3) throw ArgumentError("local maximum scan needs at least 3 samples");
  if (!(hi > lo)) throw ArgumentError("empty scan interval");
  auto x_at = [&](int k) { return lo + (hi - lo) * static_cast<double>(k + 1) / samples; };

  double prev = f(x_at(0));
  double cur = f(x_at(1));
  for (int k = 1; k + 1 < samples; ++k) {
    const double next = f(x_at(k + 1));
    if (cur > prev && cur >= next) {
      double a = x_at(k - 1), b = x_at(k + 1);
      const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
      double fc = f(c), fd = f(d);
      while (b - a > tolerance) {
        if (fc > fd) {
          b = d;
          d = c;
          fd = fc;
          c = b - inv_phi * (b - a);
          fc = f(c);
        } else {
          a = c;
          c = d;
          fc = fd;
          d = a + inv_phi * (b - a);
          fd = f(d);
        }
      }
      LocalMaximum m;
      m.x = 0.5 * (a + b);
      m.value = f(m.x);
      // the scanned sample may sit higher than the refined point by rounding
      if (cur > m.value) {
        m.x = x_at(k);
        m.value = cur;
      }
      m.found = true;
      return m;
    }
    prev = cur;
    cur = next;
  }
  return {};
}

BallooningResult find_ballooning(const MembraneSpec& spec, int samples) {
  spec.validate();
  const double limit = admissible_theta_limit(spec);
  const auto m = first_local_maximum(
      [&](double theta) { return cap_pressure(spec, theta); }, 0.0, limit, samples, 1e-9);
  BallooningResult r;
  if (!m.found) return r;
  r.found = true;
  r.theta_at_limit = m.x;
  r.stretch_at_limit = cap_stretch(m.x);
  r.p_balloon_kpa = m.value;
  return r;
}

double sphere_pressure(const material::HyperelasticModel& model, double t0_mm, double r0_mm,
                       double stretch) {
  if (!(t0_mm > 0.0) || !(r0_mm > 0.0)) throw ArgumentError("sphere t0 and r0 must be > 0");
  const double sigma = material::equibiaxial_cauchy_stress(model, stretch);
  return 2.0 * (t0_mm / r0_mm) * sigma / (stretch * stretch * stretch) * 1000.0;
}

SphereLimit find_sphere_limit(const material::HyperelasticModel& model, double t0_mm,
                              double r0_mm, double stretch_max, int samples) {
  material::validate(model);
  double hi = stretch_max;
  const double lock = material::equibiaxial_locking_stretch(model);
  if (std::isfinite(lock)) hi = std::min(hi, lock * (1.0 - 1e-12));
  if (!(hi > 1.0)) throw ArgumentError("sphere stretch range is empty");
  const auto m = first_local_maximum(
      [&](double l) { return sphere_pressure(model, t0_mm, r0_mm, l); }, 1.0, hi, samples, 1e-9);
  return {m.x, m.value, m.found};
}

}  // namespace tpekit::inflation
