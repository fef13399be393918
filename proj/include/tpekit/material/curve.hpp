#pragma once

#include <string>
#include <vector>

namespace tpekit::material {

struct StrainStress {
  double strain = 0.0;      // engineering strain, dimensionless
  double stress_mpa = 0.0;  // engineering stress
};

// Uniaxial tensile test samples. Strains strictly increase from >= 0; a
// sample at zero strain must carry zero stress (within 1e-9 MPa).
class StressStrainCurve {
 public:
  StressStrainCurve() = default;
  explicit StressStrainCurve(std::vector<StrainStress> points, std::string label = {},
                             std::string source = {});

  const std::vector<StrainStress>& points() const noexcept { return points_; }
  const std::string& label() const noexcept { return label_; }
  const std::string& source() const noexcept { return source_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  // Linear interpolation between bracketing samples. Throws RangeError
  // outside [first strain, last strain].
  double stress_at(double strain) const;

 private:
  std::vector<StrainStress> points_;
  std::string label_;
  std::string source_;
};

// stress(at_strain) / at_strain. Secant, not tangent.
double secant_modulus(const StressStrainCurve& curve, double at_strain);

struct CurveExtremes {
  double max_stress_mpa = 0.0;
  double max_strain = 0.0;  // strain of the final sample
};

CurveExtremes curve_extremes(const StressStrainCurve& curve);

}  // namespace tpekit::material
