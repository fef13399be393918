#include "tpekit/material/curve.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tpekit/error.hpp"

namespace tpekit::material {

StressStrainCurve::StressStrainCurve(std::vector<StrainStress> points, std::string label,
                                     std::string source)
    : points_(std::move(points)), label_(std::move(label)), source_(std::move(source)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const auto& p = points_[i];
    if (!std::isfinite(p.strain) || !std::isfinite(p.stress_mpa))
      throw ArgumentError("stress-strain sample " + std::to_string(i) + " is not finite");
    if (i == 0 && p.strain < 0.0) throw ArgumentError("first strain must be >= 0");
    if (i > 0 && !(p.strain > points_[i - 1].strain))
      throw ArgumentError("strains must be strictly increasing (sample " + std::to_string(i) +
                          ")");
    if (p.strain == 0.0 && std::abs(p.stress_mpa) > 1e-9)
      throw ArgumentError("stress at zero strain must be zero");
  }
}

double StressStrainCurve::stress_at(double strain) const {
  if (points_.size() < 2) throw ArgumentError("interpolation needs at least 2 samples");
  if (!(strain >= points_.front().strain && strain <= points_.back().strain)) {
    std::ostringstream os;
    os << "strain " << strain << " outside sampled range [" << points_.front().strain << ", "
       << points_.back().strain << "]";
    throw RangeError(os.str());
  }
  auto hi = std::lower_bound(points_.begin(), points_.end(), strain,
                             [](const StrainStress& p, double s) { return p.strain < s; });
  if (hi->strain == strain) return hi->stress_mpa;
  auto lo = hi - 1;
  const double w = (strain - lo->strain) / (hi->strain - lo->strain);
  return lo->stress_mpa + w * (hi->stress_mpa - lo->stress_mpa);
}

double secant_modulus(const StressStrainCurve& curve, double at_strain) {
  if (!(at_strain > 0.0)) throw RangeError("secant modulus needs a positive strain");
  return curve.stress_at(at_strain) / at_strain;
}

CurveExtremes curve_extremes(const StressStrainCurve& curve) {
  if (curve.empty()) throw ArgumentError("curve is empty");
  const auto& pts = curve.points();
  const auto peak = std::max_element(pts.begin(), pts.end(), [](const auto& a, const auto& b) {
    return a.stress_mpa < b.stress_mpa;
  });
  return {peak->stress_mpa, pts.back().strain};
}

}  // namespace tpekit::material
