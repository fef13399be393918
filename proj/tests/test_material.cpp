#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "tpekit/error.hpp"
#include "tpekit/material/curve.hpp"
#include "tpekit/material/fit.hpp"
#include "tpekit/material/hyperelastic.hpp"

using namespace tpekit;
using namespace tpekit::material;

namespace {

StressStrainCurve synthetic(const HyperelasticModel& m, double lmax, int n) {
  std::vector<StrainStress> pts;
  for (int i = 0; i < n; ++i) {
    const double l = 1.0 + (lmax - 1.0) * i / (n - 1);
    pts.push_back({l - 1.0, uniaxial_eng_stress(m, l)});
  }
  return StressStrainCurve(pts, "synthetic");
}

HyperelasticModel random_model(std::mt19937_64& rng, int family) {
  std::uniform_real_distribution<double> mu(0.01, 2.0);
  std::uniform_real_distribution<double> alpha(0.5, 8.0);
  std::uniform_real_distribution<double> jm(5.0, 200.0);
  std::uniform_real_distribution<double> frac(-0.5, 0.9);
  switch (family % 4) {
    case 0:
      return NeoHookean{mu(rng)};
    case 1: {
      const double c10 = mu(rng);
      return MooneyRivlin{c10, frac(rng) * c10};
    }
    case 2: {
      Ogden o;
      o.terms.push_back({mu(rng), alpha(rng)});
      if (family % 8 == 6) o.terms.push_back({-0.1 * mu(rng), -alpha(rng)});
      return o;
    }
    default:
      return Gent{mu(rng), jm(rng)};
  }
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("uniaxial closed forms") {
  CHECK(uniaxial_eng_stress(NeoHookean{1.0}, 1.0) == 0.0);
  CHECK(uniaxial_eng_stress(NeoHookean{0.3}, 2.0) == doctest::Approx(0.525).epsilon(1e-12));
  CHECK(uniaxial_eng_stress(Gent{0.3, 100.0}, 2.0) ==
        doctest::Approx(0.525 / 0.98).epsilon(1e-12));
  CHECK(uniaxial_eng_stress(Gent{0.3, 100.0}, 2.0) == doctest::Approx(0.5357).epsilon(1e-4));
  CHECK(uniaxial_eng_stress(MooneyRivlin{0.1, 0.05}, 2.0) ==
        doctest::Approx(2.0 * 1.75 * (0.1 + 0.025)).epsilon(1e-12));
  CHECK(uniaxial_eng_stress(Ogden{{{0.2, 2.0}}}, 2.0) ==
        doctest::Approx(0.2 * (2.0 - 0.25)).epsilon(1e-12));
}

TEST_CASE("equibiaxial closed forms") {
  CHECK(equibiaxial_cauchy_stress(NeoHookean{1.0}, 1.0) == 0.0);
  CHECK(equibiaxial_cauchy_stress(NeoHookean{0.3}, 2.0) == doctest::Approx(1.18125).epsilon(1e-12));
  CHECK(equibiaxial_cauchy_stress(MooneyRivlin{0.15, 0.0}, 2.0) ==
        doctest::Approx(1.18125).epsilon(1e-12));
  // Ogden with alpha = 2 is Neo-Hookean with mu = mu_1.
  CHECK(equibiaxial_cauchy_stress(Ogden{{{0.3, 2.0}}}, 2.0) ==
        doctest::Approx(1.18125).epsilon(1e-12));
}

TEST_CASE("compression and Gent locking are domain errors") {
  CHECK_THROWS_AS(uniaxial_eng_stress(NeoHookean{1.0}, 0.9), DomainError);
  CHECK_THROWS_AS(equibiaxial_cauchy_stress(NeoHookean{1.0}, 0.5), DomainError);
  // uniaxial I1 - 3 at stretch 3 is 6.667 > Jm = 5
  try {
    (void)uniaxial_eng_stress(Gent{0.1, 5.0}, 3.0);
    FAIL("expected locking");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("locking stretch") != std::string::npos);
  }
  const double lock = uniaxial_locking_stretch(Gent{0.1, 5.0});
  CHECK(lock * lock + 2.0 / lock - 3.0 == doctest::Approx(5.0).epsilon(1e-12));
  const double lock_b = equibiaxial_locking_stretch(Gent{0.1, 1.0});
  CHECK(2.0 * lock_b * lock_b + std::pow(lock_b, -4.0) - 3.0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::isinf(uniaxial_locking_stretch(NeoHookean{1.0})));
}

TEST_CASE("model invariants are validated") {
  CHECK_THROWS_AS(validate(NeoHookean{0.0}), ArgumentError);
  CHECK_THROWS_AS(validate(Gent{0.1, 0.0}), ArgumentError);
  CHECK_THROWS_AS(validate(Ogden{{{0.1, -2.0}}}), ArgumentError);
  CHECK_THROWS_AS(validate(Ogden{}), ArgumentError);
  CHECK_THROWS_AS(validate(MooneyRivlin{0.1, -0.2}), ArgumentError);
  CHECK_NOTHROW(validate(Ogden{{{-0.1, -2.0}}}));
  CHECK(parse_family("Mooney_Rivlin") == FamilyTag{ModelFamily::MooneyRivlin, 1});
  CHECK(parse_family("ogden3").ogden_terms == 3);
  CHECK_THROWS_AS(parse_family("yeoh"), ArgumentError);
}

TEST_CASE("stress properties over random valid models") {
  std::mt19937_64 rng(20240601);
  for (int trial = 0; trial < 200; ++trial) {
    const auto m = random_model(rng, trial);
    REQUIRE_NOTHROW(validate(m));
    CHECK(uniaxial_eng_stress(m, 1.0) == 0.0);
    CHECK(equibiaxial_cauchy_stress(m, 1.0) == 0.0);
    const double h = 1e-6;
    CHECK(uniaxial_eng_stress(m, 1.0 + h) / h > 0.0);
    CHECK(equibiaxial_cauchy_stress(m, 1.0 + h) / h > 0.0);
  }
}

TEST_CASE("Mooney-Rivlin with C01 = 0 is Neo-Hookean with mu = 2 C10") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> c(0.01, 3.0), l(1.0, 8.0);
  for (int i = 0; i < 500; ++i) {
    const double c10 = c(rng), s = l(rng);
    CHECK(rel(uniaxial_eng_stress(MooneyRivlin{c10, 0.0}, s),
              uniaxial_eng_stress(NeoHookean{2.0 * c10}, s)) <= 1e-12);
    CHECK(rel(equibiaxial_cauchy_stress(MooneyRivlin{c10, 0.0}, s),
              equibiaxial_cauchy_stress(NeoHookean{2.0 * c10}, s)) <= 1e-12);
  }
}

TEST_CASE("Gent tends to Neo-Hookean for large Jm") {
  for (double s = 1.01; s <= 5.0; s += 0.01) {
    CHECK(rel(uniaxial_eng_stress(Gent{0.3, 1e9}, s), uniaxial_eng_stress(NeoHookean{0.3}, s)) <
          1e-6);
    CHECK(rel(equibiaxial_cauchy_stress(Gent{0.3, 1e9}, s),
              equibiaxial_cauchy_stress(NeoHookean{0.3}, s)) < 1e-6);
  }
}

TEST_CASE("secant modulus and curve extremes") {
  CHECK(secant_modulus(StressStrainCurve({{0, 0}, {0.25, 0.05}}), 0.25) ==
        doctest::Approx(0.2).epsilon(1e-12));
  CHECK(secant_modulus(StressStrainCurve({{0, 0}, {0.5, 0.5}}), 0.25) ==
        doctest::Approx(1.0).epsilon(1e-12));
  std::vector<StrainStress> pts;
  for (int i = 0; i <= 40; ++i) {
    const double e = 0.125 * i;
    pts.push_back({e, 0.3 * ((1 + e) - 1 / ((1 + e) * (1 + e)))});
  }
  CHECK(secant_modulus(StressStrainCurve(pts), 4.0) == doctest::Approx(0.372).epsilon(1e-12));
  CHECK_THROWS_AS(secant_modulus(StressStrainCurve(pts), 6.0), RangeError);
  CHECK_THROWS_AS(secant_modulus(StressStrainCurve({{0, 0}}), 0.1), ArgumentError);

  const auto ex = curve_extremes(StressStrainCurve({{0, 0}, {1, 2}, {2, 1.5}}));
  CHECK(ex.max_stress_mpa == 2.0);
  CHECK(ex.max_strain == 2.0);
  const auto single = curve_extremes(StressStrainCurve({{0, 0}}));
  CHECK(single.max_stress_mpa == 0.0);
  CHECK(single.max_strain == 0.0);
  // NinjaFlex-like digitized curve: stiff toe, peak 34.6 MPa, then failure drop
  const auto nf = curve_extremes(
      StressStrainCurve({{0, 0}, {0.5, 8.0}, {2.0, 18.0}, {5.0, 30.1}, {6.6, 34.6}, {6.7, 2.0}}));
  CHECK(nf.max_stress_mpa == 34.6);
  CHECK_THROWS_AS(curve_extremes(StressStrainCurve{}), ArgumentError);
}

TEST_CASE("curve invariants") {
  CHECK_THROWS_AS(StressStrainCurve({{0, 0}, {0, 1}}), ArgumentError);
  CHECK_THROWS_AS(StressStrainCurve({{-0.1, 0}}), ArgumentError);
  CHECK_THROWS_AS(StressStrainCurve({{0, 0.1}}), ArgumentError);
  CHECK_THROWS_AS(StressStrainCurve({{0, 0}, {1, NAN}}), ArgumentError);
}

TEST_CASE("fit recovers Neo-Hookean exactly") {
  const auto r = fit_model(synthetic(NeoHookean{0.42}, 3.0, 20), parse_family("neohookean"));
  CHECK(r.converged);
  CHECK(std::get<NeoHookean>(r.model).mu == doctest::Approx(0.42).epsilon(1e-9));
  CHECK(std::abs(std::get<NeoHookean>(r.model).mu - 0.42) <= 1e-6);
  CHECK(r.rms_residual_mpa <= r.max_residual_mpa);
}

TEST_CASE("fit round-trips all families within 1e-5 relative") {
  const std::vector<HyperelasticModel> truth = {
      NeoHookean{0.42}, MooneyRivlin{0.2, 0.05}, Ogden{{{0.15, 2.8}}}, Gent{0.1, 50.0},
      MooneyRivlin{0.3, -0.1}, Ogden{{{0.05, 6.5}}}};
  for (const auto& m : truth) {
    CAPTURE(family_name(family_of(m)));
    const auto r = fit_model(synthetic(m, 3.0, 20), family_of(m));
    CHECK(r.converged);
    const auto want = parameters(m);
    const auto got = parameters(r.model);
    for (std::size_t k = 0; k < want.size(); ++k) CHECK(rel(got[k], want[k]) < 1e-5);
  }
}

TEST_CASE("fit tolerates 1% multiplicative noise on Gent data") {
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> noise(0.0, 0.01);
  const HyperelasticModel truth = Gent{0.1, 50.0};
  std::vector<StrainStress> pts;
  for (int i = 0; i < 30; ++i) {
    const double l = 1.0 + 4.0 * i / 29.0;
    pts.push_back({l - 1.0, uniaxial_eng_stress(truth, l) * (1.0 + noise(rng))});
  }
  const auto r = fit_model(StressStrainCurve(pts), parse_family("gent"));
  CHECK(r.converged);
  const auto& g = std::get<Gent>(r.model);
  CHECK(rel(g.mu, 0.1) < 0.05);
  CHECK(rel(g.jm, 50.0) < 0.05);
}

TEST_CASE("fit on zero data lands on the lower bound") {
  std::vector<StrainStress> pts;
  for (int i = 0; i < 10; ++i) pts.push_back({0.1 * i, 0.0});
  const auto r = fit_model(StressStrainCurve(pts), parse_family("neohookean"));
  CHECK(r.converged);
  CHECK(std::get<NeoHookean>(r.model).mu == doctest::Approx(kParameterFloor));
  CHECK(r.rms_residual_mpa < 1e-8);
}

TEST_CASE("fit argument errors") {
  const auto two = StressStrainCurve({{0, 0}, {1, 0.5}});
  CHECK_THROWS_AS(fit_model(two, parse_family("gent")), ArgumentError);
  CHECK_THROWS_AS(fit_model(two, parse_family("ogden3")), ArgumentError);
  const auto data = synthetic(NeoHookean{0.42}, 3.0, 20);
  CHECK_THROWS_AS(fit_model(data, parse_family("neohookean"), Gent{0.1, 10.0}), ArgumentError);
  CHECK_THROWS_AS(fit_model(data, parse_family("neohookean"), NeoHookean{-1.0}), ArgumentError);
  CHECK_THROWS_AS(fit_model(data, FamilyTag{ModelFamily::Ogden, 4}), ArgumentError);
}

TEST_CASE("non-convergence is a flag, not an exception") {
  FitOptions opts;
  opts.max_iterations = 1;
  const auto r = fit_model(synthetic(Gent{0.1, 50.0}, 3.0, 20), parse_family("gent"),
                           Gent{1.0, 1000.0}, opts);
  CHECK_FALSE(r.converged);
  CHECK(r.iterations == 1);
}

TEST_CASE("analytic objective gradient matches central differences") {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 0.02);
  int checked = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const auto m = random_model(rng, trial);
    // Data from a different model so the residuals are not zero.
    std::vector<StrainStress> pts;
    for (int i = 0; i < 15; ++i) {
      const double l = 1.0 + 1.5 * i / 14.0;
      pts.push_back({l - 1.0, i == 0 ? 0.0 : uniaxial_eng_stress(m, l) * (1.1 + noise(rng))});
    }
    const StressStrainCurve curve(pts);
    const auto g = fit_objective_gradient(curve, m);
    const auto p = parameters(m);
    const auto tag = family_of(m);
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double h = 1e-6 * std::max(1.0, std::abs(p[k]));
      auto pp = p, pm = p;
      pp[k] += h;
      pm[k] -= h;
      const double fd = (fit_objective(curve, from_parameters(tag, pp)) -
                         fit_objective(curve, from_parameters(tag, pm))) /
                        (2.0 * h);
      CHECK(std::abs(fd - g[k]) <= 1e-4 * std::max(std::abs(g[k]), 1e-8));
    }
    ++checked;
  }
  CHECK(checked == 40);
}
