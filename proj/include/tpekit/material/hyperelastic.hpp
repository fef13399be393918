#pragma once
// Incompressible isotropic hyperelastic models in closed form.
//
// Units: stresses in MPa, stretches dimensionless. Only tension is
// supported (stretch >= 1); compression raises DomainError everywhere.

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace tpekit::material {

struct NeoHookean {
  double mu = 0.0;
};

struct MooneyRivlin {
  double c10 = 0.0;
  double c01 = 0.0;
};

struct OgdenTerm {
  double mu = 0.0;
  double alpha = 0.0;
};

// W = sum_i mu_i / alpha_i (l1^a_i + l2^a_i + l3^a_i - 3); 1 to 3 terms.
struct Ogden {
  std::vector<OgdenTerm> terms;
};

// W = -mu Jm / 2 ln(1 - (I1 - 3) / Jm)
struct Gent {
  double mu = 0.0;
  double jm = 0.0;
};

using HyperelasticModel = std::variant<NeoHookean, MooneyRivlin, Ogden, Gent>;

enum class ModelFamily { NeoHookean, MooneyRivlin, Ogden, Gent };

// A family plus, for Ogden, the number of terms. This is the unit the fitter
// works with: it fixes the length and meaning of the parameter vector.
struct FamilyTag {
  ModelFamily family = ModelFamily::NeoHookean;
  int ogden_terms = 1;

  bool operator==(const FamilyTag&) const = default;
};

inline constexpr double kMaxOgdenAlpha = 20.0;
inline constexpr int kMaxOgdenTerms = 3;

FamilyTag family_of(const HyperelasticModel& model);
std::string family_name(FamilyTag tag);
// Accepts "neohookean", "mooney-rivlin", "ogden" (1 term), "ogden2",
// "ogden3", "gent" (case-insensitive; '_' and '-' optional).
FamilyTag parse_family(std::string_view name);

// Throws ArgumentError when the model violates its invariants.
void validate(const HyperelasticModel& model);

// Small-strain shear modulus (MPa).
double ground_state_shear_modulus(const HyperelasticModel& model);

double stretch_from_strain(double strain);

double uniaxial_eng_stress(const HyperelasticModel& model, double stretch);
double equibiaxial_cauchy_stress(const HyperelasticModel& model, double stretch);

// Gent locking stretches; +inf for models that never lock.
double uniaxial_locking_stretch(const HyperelasticModel& model);
double equibiaxial_locking_stretch(const HyperelasticModel& model);

// Flat parameter vectors, in the order given by parameter_names().
std::size_t parameter_count(FamilyTag tag);
std::vector<std::string> parameter_names(FamilyTag tag);
std::vector<double> parameters(const HyperelasticModel& model);
HyperelasticModel from_parameters(FamilyTag tag, std::span<const double> p);

// d(uniaxial_eng_stress)/d(parameters), analytic.
std::vector<double> uniaxial_stress_parameter_gradient(const HyperelasticModel& model,
                                                       double stretch);

// The same model with every stress multiplied by `factor` (> 0).
HyperelasticModel scaled(const HyperelasticModel& model, double factor);

}  // namespace tpekit::material
