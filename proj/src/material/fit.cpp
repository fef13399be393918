#include "tpekit/material/fit.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "tpekit/error.hpp"
#include "tpekit/simd/kernels.hpp"

namespace tpekit::material {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Data {
  std::vector<double> stretch;
  std::vector<double> stress;
};

Data to_data(const StressStrainCurve& curve) {
  Data d;
  for (const auto& p : curve.points()) {
    d.stretch.push_back(stretch_from_strain(p.strain));
    d.stress.push_back(p.stress_mpa);
  }
  return d;
}

// Residuals model - data. Returns false when the parameters leave the
// model's domain (invalid parameters or Gent locking at a data point).
bool residuals(const Data& d, FamilyTag tag, std::span<const double> p, std::vector<double>& r) {
  r.resize(d.stretch.size());
  try {
    const HyperelasticModel m = from_parameters(tag, p);
    for (std::size_t i = 0; i < d.stretch.size(); ++i)
      r[i] = uniaxial_eng_stress(m, d.stretch[i]) - d.stress[i];
  } catch (const Error&) {
    return false;
  }
  return std::all_of(r.begin(), r.end(), [](double v) { return std::isfinite(v); });
}

double cost_of(const std::vector<double>& r) { return simd::residual_stats(r).sum_squares; }

// Best linear least-squares coefficients for stress ~ sum_k c_k basis_k.
// Returns the coefficients and the residual sum of squares.
std::pair<Eigen::VectorXd, double> linear_fit(const Eigen::MatrixXd& basis,
                                              const Eigen::VectorXd& y) {
  Eigen::VectorXd c = basis.colPivHouseholderQr().solve(y);
  const double sse = (basis * c - y).squaredNorm();
  return {c, std::isfinite(sse) ? sse : kInf};
}

double uniaxial_i1m3(double l) { return l * l + 2.0 / l - 3.0; }

std::vector<double> initial_guess(const Data& d, FamilyTag tag) {
  const Eigen::Index n = static_cast<Eigen::Index>(d.stretch.size());
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(d.stress.data(), n);
  auto base = [&](Eigen::Index i) {
    const double l = d.stretch[static_cast<std::size_t>(i)];
    return l - 1.0 / (l * l);
  };

  switch (tag.family) {
    case ModelFamily::NeoHookean: {
      Eigen::MatrixXd b(n, 1);
      for (Eigen::Index i = 0; i < n; ++i) b(i, 0) = base(i);
      return project_parameters(tag, {linear_fit(b, y).first(0)});
    }
    case ModelFamily::MooneyRivlin: {
      Eigen::MatrixXd b(n, 2);
      for (Eigen::Index i = 0; i < n; ++i) {
        b(i, 0) = 2.0 * base(i);
        b(i, 1) = 2.0 * base(i) / d.stretch[static_cast<std::size_t>(i)];
      }
      const auto c = linear_fit(b, y).first;
      return project_parameters(tag, {c(0), c(1)});
    }
    case ModelFamily::Gent: {
      double max_i1m3 = 0.0;
      for (double l : d.stretch) max_i1m3 = std::max(max_i1m3, uniaxial_i1m3(l));
      const double scale = max_i1m3 > 0.0 ? max_i1m3 : 1.0;
      static constexpr double kFactors[] = {1.001, 1.01, 1.03, 1.1, 1.3, 1.6, 2.0,  3.0, 5.0,
                                            8.0,   13.0, 20.0, 50.0, 100.0, 1e3, 1e4};
      double best_sse = kInf;
      std::vector<double> best{kParameterFloor, 1e4 * scale};
      for (double f : kFactors) {
        const double jm = f * scale;
        Eigen::MatrixXd b(n, 1);
        for (Eigen::Index i = 0; i < n; ++i)
          b(i, 0) = base(i) / (1.0 - uniaxial_i1m3(d.stretch[static_cast<std::size_t>(i)]) / jm);
        const auto [c, sse] = linear_fit(b, y);
        if (sse < best_sse && c(0) > 0.0) {
          best_sse = sse;
          best = {c(0), jm};
        }
      }
      return project_parameters(tag, best);
    }
    case ModelFamily::Ogden: {
      // Exponent grid search with linear solves for the moduli.
      std::vector<std::vector<double>> combos;
      if (tag.ogden_terms == 1) {
        for (int k = -80; k <= 80; ++k)
          if (k != 0) combos.push_back({0.25 * k});
      } else if (tag.ogden_terms == 2) {
        for (int a = -10; a <= 12; ++a)
          for (int b = a + 1; b <= 12; ++b)
            if (a != 0 && b != 0) combos.push_back({double(a), double(b)});
      } else {
        for (int a = -8; a <= 12; a += 2)
          for (int b = a + 2; b <= 12; b += 2)
            for (int c = b + 2; c <= 12; c += 2)
              if (a != 0 && b != 0 && c != 0) combos.push_back({double(a), double(b), double(c)});
      }
      double best_sse = kInf;
      std::vector<double> best;
      for (const auto& alphas : combos) {
        Eigen::MatrixXd b(n, static_cast<Eigen::Index>(alphas.size()));
        for (Eigen::Index i = 0; i < n; ++i) {
          const double l = d.stretch[static_cast<std::size_t>(i)];
          for (std::size_t k = 0; k < alphas.size(); ++k)
            b(i, static_cast<Eigen::Index>(k)) =
                std::pow(l, alphas[k] - 1.0) - std::pow(l, -0.5 * alphas[k] - 1.0);
        }
        const auto [c, sse] = linear_fit(b, y);
        double stiffness = 0.0;
        for (std::size_t k = 0; k < alphas.size(); ++k)
          stiffness += c(static_cast<Eigen::Index>(k)) * alphas[k];
        if (!(stiffness > 0.0) || !(sse < best_sse)) continue;
        best_sse = sse;
        best.clear();
        for (std::size_t k = 0; k < alphas.size(); ++k) {
          best.push_back(c(static_cast<Eigen::Index>(k)));
          best.push_back(alphas[k]);
        }
      }
      if (best.empty()) {
        // Nothing with positive stiffness: start from a soft Neo-Hookean-like
        // set of terms.
        for (int k = 0; k < tag.ogden_terms; ++k) {
          best.push_back(1e-3);
          best.push_back(2.0 + k);
        }
      }
      return project_parameters(tag, best);
    }
  }
  throw ArgumentError("unknown family");
}

}  // namespace

std::vector<double> project_parameters(FamilyTag tag, std::vector<double> p) {
  switch (tag.family) {
    case ModelFamily::NeoHookean:
      p[0] = std::max(p[0], kParameterFloor);
      break;
    case ModelFamily::MooneyRivlin:
      p[0] = std::max(p[0], kParameterFloor);
      p[1] = std::max(p[1], kParameterFloor - p[0]);
      break;
    case ModelFamily::Gent:
      p[0] = std::max(p[0], kParameterFloor);
      p[1] = std::max(p[1], kParameterFloor);
      break;
    case ModelFamily::Ogden:
      for (std::size_t i = 1; i < p.size(); i += 2)
        p[i] = std::clamp(p[i], -kMaxOgdenAlpha, kMaxOgdenAlpha);
      break;
  }
  return p;
}

double fit_objective(const StressStrainCurve& curve, const HyperelasticModel& model) {
  std::vector<double> r;
  r.reserve(curve.size());
  for (const auto& p : curve.points())
    r.push_back(uniaxial_eng_stress(model, stretch_from_strain(p.strain)) - p.stress_mpa);
  return cost_of(r);
}

std::vector<double> fit_objective_gradient(const StressStrainCurve& curve,
                                           const HyperelasticModel& model) {
  std::vector<double> g(parameters(model).size(), 0.0);
  for (const auto& p : curve.points()) {
    const double l = stretch_from_strain(p.strain);
    const double r = uniaxial_eng_stress(model, l) - p.stress_mpa;
    const auto dsig = uniaxial_stress_parameter_gradient(model, l);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] += 2.0 * r * dsig[k];
  }
  return g;
}

FitResult fit_model(const StressStrainCurve& curve, FamilyTag tag,
                    std::optional<HyperelasticModel> initial, const FitOptions& options) {
  if (tag.family == ModelFamily::Ogden &&
      (tag.ogden_terms < 1 || tag.ogden_terms > kMaxOgdenTerms))
    throw ArgumentError("Ogden fits support 1 to 3 terms");
  const std::size_t np = parameter_count(tag);
  if (curve.size() < np + 1)
    throw ArgumentError("insufficient data: " + family_name(tag) + " needs at least " +
                        std::to_string(np + 1) + " points, got " + std::to_string(curve.size()));
  if (options.max_iterations < 1) throw ArgumentError("max_iterations must be >= 1");

  const Data data = to_data(curve);
  std::vector<double> p;
  if (initial) {
    if (!(family_of(*initial) == tag))
      throw ArgumentError("initial model is not of family " + family_name(tag));
    validate(*initial);
    p = project_parameters(tag, parameters(*initial));
  } else {
    p = initial_guess(data, tag);
  }

  std::vector<double> r;
  if (!residuals(data, tag, p, r))
    throw ArgumentError("initial parameters are outside the model domain for this data");
  double cost = cost_of(r);

  const Eigen::Index m = static_cast<Eigen::Index>(r.size());
  const Eigen::Index n = static_cast<Eigen::Index>(np);
  Eigen::MatrixXd jac(m, n);
  std::vector<double> rp, rm, trial_r;
  double damping = 1e-3;
  bool converged = cost == 0.0;
  int iterations = 0;

  while (!converged && iterations < options.max_iterations) {
    ++iterations;
    // Central differences, one-sided where a neighbour leaves the domain.
    for (Eigen::Index j = 0; j < n; ++j) {
      const double h = options.jacobian_step * std::max(1.0, std::abs(p[j]));
      std::vector<double> plus = p, minus = p;
      plus[j] += h;
      minus[j] -= h;
      const bool ok_p = residuals(data, tag, plus, rp);
      const bool ok_m = residuals(data, tag, minus, rm);
      for (Eigen::Index i = 0; i < m; ++i) {
        if (ok_p && ok_m) jac(i, j) = (rp[i] - rm[i]) / (2.0 * h);
        else if (ok_p) jac(i, j) = (rp[i] - r[i]) / h;
        else if (ok_m) jac(i, j) = (r[i] - rm[i]) / h;
        else jac(i, j) = 0.0;
      }
    }
    const Eigen::Map<const Eigen::VectorXd> res(r.data(), m);
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd g = jac.transpose() * res;
    const double diag_floor = 1e-12 * std::max(1.0, a.diagonal().maxCoeff());

    bool stepped = false;
    while (!stepped) {
      Eigen::MatrixXd damped = a;
      for (Eigen::Index k = 0; k < n; ++k)
        damped(k, k) += damping * std::max(a(k, k), diag_floor);
      const Eigen::VectorXd delta = damped.ldlt().solve(-g);
      std::vector<double> trial(p);
      for (Eigen::Index k = 0; k < n; ++k) trial[k] += delta(k);
      trial = project_parameters(tag, std::move(trial));

      double step_norm = 0.0, p_norm = 0.0;
      for (std::size_t k = 0; k < np; ++k) {
        step_norm += (trial[k] - p[k]) * (trial[k] - p[k]);
        p_norm += p[k] * p[k];
      }
      step_norm = std::sqrt(step_norm);
      p_norm = std::sqrt(p_norm);
      if (!std::isfinite(step_norm)) {
        damping *= 10.0;
        if (damping > 1e20) break;
        continue;
      }
      if (step_norm <= options.relative_tolerance * p_norm) {
        // The step no longer moves the parameters; keep it if it does not hurt.
        if (residuals(data, tag, trial, trial_r) && cost_of(trial_r) <= cost) {
          p = trial;
          r = trial_r;
          cost = cost_of(r);
        }
        converged = true;
        break;
      }
      if (residuals(data, tag, trial, trial_r)) {
        const double trial_cost = cost_of(trial_r);
        if (trial_cost < cost) {
          p = std::move(trial);
          r = trial_r;
          cost = trial_cost;
          damping = std::max(damping / 10.0, 1e-15);
          stepped = true;
          if (cost == 0.0) converged = true;
          continue;
        }
      }
      damping *= 10.0;
      if (damping > 1e20) break;
    }
    if (!stepped && !converged) break;
  }

  FitResult out;
  out.model = from_parameters(tag, p);
  const auto stats = simd::residual_stats(r);
  out.max_residual_mpa = stats.max_abs;
  out.rms_residual_mpa =
      std::min(std::sqrt(stats.sum_squares / static_cast<double>(r.size())), stats.max_abs);
  out.iterations = iterations;
  try {
    validate(out.model);
    out.converged = converged && std::isfinite(out.rms_residual_mpa);
  } catch (const ArgumentError&) {
    out.converged = false;
  }
  return out;
}

}  // namespace tpekit::material
