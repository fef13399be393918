#include "tpekit/material/hyperelastic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <sstream>

#include "tpekit/error.hpp"

namespace tpekit::material {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_tension(double stretch) {
  if (!(stretch >= 1.0) || !std::isfinite(stretch)) {
    std::ostringstream os;
    os << "stretch " << stretch << " is not >= 1 (compression is not supported)";
    throw DomainError(os.str());
  }
}

// Uniaxial incompressible: I1 = l^2 + 2/l. Equibiaxial: I1 = 2 l^2 + l^-4.
double uniaxial_i1m3(double l) { return l * l + 2.0 / l - 3.0; }
double equibiaxial_i1m3(double l) { return 2.0 * l * l + 1.0 / (l * l * l * l) - 3.0; }

// Solves i1m3(l) = target for l >= 1; i1m3 is increasing there.
template <class F>
double solve_stretch(F i1m3, double target) {
  double lo = 1.0;
  double hi = 2.0;
  while (i1m3(hi) < target) hi *= 2.0;
  for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
    const double mid = 0.5 * (lo + hi);
    (i1m3(mid) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double gent_denominator(const Gent& g, double i1m3, double locking_stretch) {
  const double d = 1.0 - i1m3 / g.jm;
  if (!(d > 0.0)) {
    std::ostringstream os;
    os.precision(10);
    os << "Gent locking: I1 - 3 = " << i1m3 << " >= Jm = " << g.jm
       << " (locking stretch " << locking_stretch << ")";
    throw DomainError(os.str());
  }
  return d;
}

std::string normalize(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

FamilyTag family_of(const HyperelasticModel& model) {
  return std::visit(Overloaded{
                        [](const NeoHookean&) { return FamilyTag{ModelFamily::NeoHookean, 1}; },
                        [](const MooneyRivlin&) { return FamilyTag{ModelFamily::MooneyRivlin, 1}; },
                        [](const Ogden& o) {
                          return FamilyTag{ModelFamily::Ogden, static_cast<int>(o.terms.size())};
                        },
                        [](const Gent&) { return FamilyTag{ModelFamily::Gent, 1}; },
                    },
                    model);
}

std::string family_name(FamilyTag tag) {
  switch (tag.family) {
    case ModelFamily::NeoHookean:
      return "neohookean";
    case ModelFamily::MooneyRivlin:
      return "mooney-rivlin";
    case ModelFamily::Ogden:
      return tag.ogden_terms == 1 ? "ogden" : "ogden" + std::to_string(tag.ogden_terms);
    case ModelFamily::Gent:
      return "gent";
  }
  return "unknown";
}

FamilyTag parse_family(std::string_view name) {
  const std::string n = normalize(name);
  if (n == "neohookean" || n == "nh") return {ModelFamily::NeoHookean, 1};
  if (n == "mooneyrivlin" || n == "mr") return {ModelFamily::MooneyRivlin, 1};
  if (n == "ogden" || n == "ogden1") return {ModelFamily::Ogden, 1};
  if (n == "ogden2") return {ModelFamily::Ogden, 2};
  if (n == "ogden3") return {ModelFamily::Ogden, 3};
  if (n == "gent") return {ModelFamily::Gent, 1};
  throw ArgumentError("unknown model family '" + std::string(name) + "'");
}

void validate(const HyperelasticModel& model) {
  std::visit(Overloaded{
                 [](const NeoHookean& m) {
                   if (!(m.mu > 0.0) || !std::isfinite(m.mu))
                     throw ArgumentError("Neo-Hookean requires mu > 0");
                 },
                 [](const MooneyRivlin& m) {
                   if (!(m.c10 > 0.0) || !std::isfinite(m.c10) || !std::isfinite(m.c01))
                     throw ArgumentError("Mooney-Rivlin requires C10 > 0");
                   if (!(m.c10 + m.c01 > 0.0))
                     throw ArgumentError("Mooney-Rivlin requires C10 + C01 > 0");
                 },
                 [](const Ogden& m) {
                   if (m.terms.empty() || m.terms.size() > kMaxOgdenTerms)
                     throw ArgumentError("Ogden requires 1 to 3 terms");
                   double stiffness = 0.0;
                   for (const auto& t : m.terms) {
                     if (!std::isfinite(t.mu) || !std::isfinite(t.alpha))
                       throw ArgumentError("Ogden parameters must be finite");
                     stiffness += t.mu * t.alpha;
                   }
                   if (!(stiffness > 0.0))
                     throw ArgumentError("Ogden requires sum(mu_i * alpha_i) > 0");
                 },
                 [](const Gent& m) {
                   if (!(m.mu > 0.0) || !std::isfinite(m.mu))
                     throw ArgumentError("Gent requires mu > 0");
                   if (!(m.jm > 0.0)) throw ArgumentError("Gent requires Jm > 0");
                 },
             },
             model);
}

double ground_state_shear_modulus(const HyperelasticModel& model) {
  return std::visit(Overloaded{
                        [](const NeoHookean& m) { return m.mu; },
                        [](const MooneyRivlin& m) { return 2.0 * (m.c10 + m.c01); },
                        [](const Ogden& m) {
                          double s = 0.0;
                          for (const auto& t : m.terms) s += t.mu * t.alpha;
                          return 0.5 * s;
                        },
                        [](const Gent& m) { return m.mu; },
                    },
                    model);
}

double stretch_from_strain(double strain) { return 1.0 + strain; }

double uniaxial_locking_stretch(const HyperelasticModel& model) {
  if (const auto* g = std::get_if<Gent>(&model)) return solve_stretch(uniaxial_i1m3, g->jm);
  return std::numeric_limits<double>::infinity();
}

double equibiaxial_locking_stretch(const HyperelasticModel& model) {
  if (const auto* g = std::get_if<Gent>(&model)) return solve_stretch(equibiaxial_i1m3, g->jm);
  return std::numeric_limits<double>::infinity();
}

double uniaxial_eng_stress(const HyperelasticModel& model, double l) {
  require_tension(l);
  validate(model);
  const double base = l - 1.0 / (l * l);
  return std::visit(Overloaded{
                        [&](const NeoHookean& m) { return m.mu * base; },
                        [&](const MooneyRivlin& m) { return 2.0 * base * (m.c10 + m.c01 / l); },
                        [&](const Ogden& m) {
                          double s = 0.0;
                          for (const auto& t : m.terms)
                            s += t.mu * (std::pow(l, t.alpha - 1.0) -
                                         std::pow(l, -0.5 * t.alpha - 1.0));
                          return s;
                        },
                        [&](const Gent& m) {
                          const double i1m3 = uniaxial_i1m3(l);
                          if (i1m3 >= m.jm)
                            return m.mu * base /
                                   gent_denominator(m, i1m3, uniaxial_locking_stretch(model));
                          return m.mu * base / (1.0 - i1m3 / m.jm);
                        },
                    },
                    model);
}

double equibiaxial_cauchy_stress(const HyperelasticModel& model, double l) {
  require_tension(l);
  validate(model);
  const double l2 = l * l;
  const double base = l2 - 1.0 / (l2 * l2);
  return std::visit(Overloaded{
                        [&](const NeoHookean& m) { return m.mu * base; },
                        [&](const MooneyRivlin& m) { return 2.0 * base * (m.c10 + m.c01 * l2); },
                        [&](const Ogden& m) {
                          double s = 0.0;
                          for (const auto& t : m.terms)
                            s += t.mu * (std::pow(l, t.alpha) - std::pow(l, -2.0 * t.alpha));
                          return s;
                        },
                        [&](const Gent& m) {
                          const double i1m3 = equibiaxial_i1m3(l);
                          if (i1m3 >= m.jm)
                            return m.mu * base /
                                   gent_denominator(m, i1m3, equibiaxial_locking_stretch(model));
                          return m.mu * base / (1.0 - i1m3 / m.jm);
                        },
                    },
                    model);
}

std::size_t parameter_count(FamilyTag tag) {
  switch (tag.family) {
    case ModelFamily::NeoHookean:
      return 1;
    case ModelFamily::MooneyRivlin:
    case ModelFamily::Gent:
      return 2;
    case ModelFamily::Ogden:
      return 2 * static_cast<std::size_t>(tag.ogden_terms);
  }
  return 0;
}

std::vector<std::string> parameter_names(FamilyTag tag) {
  switch (tag.family) {
    case ModelFamily::NeoHookean:
      return {"mu"};
    case ModelFamily::MooneyRivlin:
      return {"c10", "c01"};
    case ModelFamily::Gent:
      return {"mu", "jm"};
    case ModelFamily::Ogden: {
      std::vector<std::string> names;
      for (int i = 1; i <= tag.ogden_terms; ++i) {
        names.push_back("mu" + std::to_string(i));
        names.push_back("alpha" + std::to_string(i));
      }
      return names;
    }
  }
  return {};
}

std::vector<double> parameters(const HyperelasticModel& model) {
  return std::visit(Overloaded{
                        [](const NeoHookean& m) { return std::vector<double>{m.mu}; },
                        [](const MooneyRivlin& m) { return std::vector<double>{m.c10, m.c01}; },
                        [](const Ogden& m) {
                          std::vector<double> p;
                          for (const auto& t : m.terms) {
                            p.push_back(t.mu);
                            p.push_back(t.alpha);
                          }
                          return p;
                        },
                        [](const Gent& m) { return std::vector<double>{m.mu, m.jm}; },
                    },
                    model);
}

HyperelasticModel from_parameters(FamilyTag tag, std::span<const double> p) {
  if (tag.family == ModelFamily::Ogden &&
      (tag.ogden_terms < 1 || tag.ogden_terms > kMaxOgdenTerms))
    throw ArgumentError("Ogden requires 1 to 3 terms");
  if (p.size() != parameter_count(tag))
    throw ArgumentError("parameter vector has wrong length for " + family_name(tag));
  switch (tag.family) {
    case ModelFamily::NeoHookean:
      return NeoHookean{p[0]};
    case ModelFamily::MooneyRivlin:
      return MooneyRivlin{p[0], p[1]};
    case ModelFamily::Gent:
      return Gent{p[0], p[1]};
    case ModelFamily::Ogden: {
      Ogden o;
      for (std::size_t i = 0; i + 1 < p.size(); i += 2) o.terms.push_back({p[i], p[i + 1]});
      return o;
    }
  }
  throw ArgumentError("unknown family");
}

std::vector<double> uniaxial_stress_parameter_gradient(const HyperelasticModel& model, double l) {
  require_tension(l);
  const double base = l - 1.0 / (l * l);
  return std::visit(
      Overloaded{
          [&](const NeoHookean&) { return std::vector<double>{base}; },
          [&](const MooneyRivlin&) { return std::vector<double>{2.0 * base, 2.0 * base / l}; },
          [&](const Ogden& m) {
            const double ln = std::log(l);
            std::vector<double> g;
            for (const auto& t : m.terms) {
              const double up = std::pow(l, t.alpha - 1.0);
              const double down = std::pow(l, -0.5 * t.alpha - 1.0);
              g.push_back(up - down);
              g.push_back(t.mu * ln * (up + 0.5 * down));
            }
            return g;
          },
          [&](const Gent& m) {
            const double i1m3 = uniaxial_i1m3(l);
            const double d = gent_denominator(m, i1m3, uniaxial_locking_stretch(model));
            return std::vector<double>{base / d, -m.mu * base * i1m3 / (m.jm * m.jm * d * d)};
          },
      },
      model);
}

HyperelasticModel scaled(const HyperelasticModel& model, double factor) {
  if (!(factor > 0.0)) throw ArgumentError("scale factor must be positive");
  return std::visit(Overloaded{
                        [&](NeoHookean m) -> HyperelasticModel {
                          m.mu *= factor;
                          return m;
                        },
                        [&](MooneyRivlin m) -> HyperelasticModel {
                          m.c10 *= factor;
                          m.c01 *= factor;
                          return m;
                        },
                        [&](Ogden m) -> HyperelasticModel {
                          for (auto& t : m.terms) t.mu *= factor;
                          return m;
                        },
                        [&](Gent m) -> HyperelasticModel {
                          m.mu *= factor;
                          return m;
                        },
                    },
                    model);
}

}  // namespace tpekit::material
