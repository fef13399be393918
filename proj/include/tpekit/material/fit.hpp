#pragma once
// Damped least-squares fitting of hyperelastic models to uniaxial data.

#include <optional>
#include <vector>

#include "tpekit/material/curve.hpp"
#include "tpekit/material/hyperelastic.hpp"

namespace tpekit::material {

struct FitOptions {
  int max_iterations = 500;
  // Converged once ||step|| < tol * ||params||.
  double relative_tolerance = 1e-8;
  // Central-difference step is jacobian_step * max(1, |p|).
  double jacobian_step = 1e-6;
};

struct FitResult {
  HyperelasticModel model;
  double rms_residual_mpa = 0.0;
  double max_residual_mpa = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Lower bounds and box constraints applied after every step:
// mu, C10, Jm >= 1e-9; C10 + C01 >= 1e-9; Ogden alpha in [-20, 20].
inline constexpr double kParameterFloor = 1e-9;
std::vector<double> project_parameters(FamilyTag tag, std::vector<double> p);

// Sum of squared absolute residuals (MPa^2) of uniaxial_eng_stress over the
// curve, stretches taken as 1 + strain.
double fit_objective(const StressStrainCurve& curve, const HyperelasticModel& model);
// Analytic gradient of fit_objective with respect to parameters(model).
std::vector<double> fit_objective_gradient(const StressStrainCurve& curve,
                                           const HyperelasticModel& model);

// Non-convergence is reported through FitResult::converged, not thrown.
// Throws ArgumentError for too few points (needs parameter_count + 1) or an
// initial model of the wrong family or with invalid parameters.
FitResult fit_model(const StressStrainCurve& curve, FamilyTag family,
                    std::optional<HyperelasticModel> initial = std::nullopt,
                    const FitOptions& options = {});

}  // namespace tpekit::material
