// End-to-end demo: writes synthetic inputs under <out>/data, then runs every
// command on them into sibling directories.

#include <cmath>
#include <numbers>
#include <random>

#include "commands.hpp"
#include "tpekit/cli/app.hpp"
#include "tpekit/error.hpp"
#include "tpekit/inflation/ballooning.hpp"
#include "tpekit/inflation/source_coupled.hpp"
#include "tpekit/io/csv.hpp"

namespace tpekit::cli {

using io::Json;

namespace {

constexpr double kPi = std::numbers::pi;

void put(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::create_directories(dir);
  io::write_text(dir / name, text);
}

std::string pressure_csv(const PressureTrace& t) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : t.samples()) rows.push_back({s.t_s, s.p_kpa});
  return io::to_csv({"time_s", "pressure_kpa"}, rows);
}

// Ramp to the rupture pressure, then an abrupt loss.
std::string rupture_csv(double p_rupture, double ramp_s) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i <= 1000; ++i) {
    const double t = i * 0.01;
    double p = 0.0;
    if (t >= 0.5 && t <= 0.5 + ramp_s) p = p_rupture * (t - 0.5) / ramp_s;
    rows.push_back({t, p});
  }
  return io::to_csv({"time_s", "pressure_kpa"}, rows);
}

struct Data {
  fs::path dir;
  std::vector<fs::path> inflation, force, hysteresis;
  fs::path uniaxial, cyclic, markers, manifest;
};

Data write_data(const Config& cfg, const fs::path& dir) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(cfg.at("seed").get<long long>()));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Data d{dir, {}, {}, {}, {}, {}, {}, {}};

  // uniaxial test of a Gent material, 0-400 % strain, 0.1 kPa noise
  const material::Gent gent{0.1, 100.0};
  std::vector<std::vector<double>> uni;
  for (int i = 0; i <= 40; ++i) {
    const double e = 0.1 * i;
    const double s = material::uniaxial_eng_stress(gent, 1.0 + e);
    uni.push_back({e, i == 0 ? 0.0 : s + 1e-4 * gauss(rng)});
  }
  d.uniaxial = dir / "uniaxial.csv";
  put(dir, "uniaxial.csv", io::to_csv({"strain", "stress_mpa"}, uni));

  // inflation logs from the source-coupled model, above and below the limit
  inflation::MembraneSpec spec;
  spec.material = gent;
  const double pb = inflation::find_ballooning(spec).p_balloon_kpa;
  const auto hi = inflation::simulate_source_coupled(spec, 1.5 * pb, 6e4, 8.0, 1e-3);
  const auto lo = inflation::simulate_source_coupled(spec, 0.5 * pb, 6e4, 8.0, 1e-3);
  put(dir, "inflation_above.csv", pressure_csv(hi.trace));
  put(dir, "inflation_below.csv", pressure_csv(lo.trace));
  d.inflation = {dir / "inflation_above.csv", dir / "inflation_below.csv"};

  // side profile of a hemispherical membrane
  std::vector<std::vector<double>> prof;
  for (int i = 0; i <= 60; ++i) {
    const double a = kPi * i / 60;
    prof.push_back({21.0 * std::cos(a), 21.0 * std::sin(a)});
  }
  put(dir, "profile.csv", "# L0_mm=42\n" + io::to_csv({"x_mm", "y_mm"}, prof));
  d.inflation.push_back(dir / "profile.csv");

  // 1000 cycles of 8 s; peaks decay slowly and collapse from cycle 681
  std::vector<std::vector<double>> cyc;
  const double rate_hz = 10.0;
  for (int k = 1; k <= 1000; ++k) {
    const double peak = k < 681 ? 8.0 + 2.0 * std::exp(-0.005 * k) : 0.6;
    for (int j = 0; j < 80; ++j) {
      const double tau = j / rate_hz;
      const double p = tau < 4.0 ? peak * std::pow(std::sin(kPi * tau / 4.0), 2) : 0.0;
      cyc.push_back({(k - 1) * 8.0 + tau, p + 0.02 * gauss(rng)});
    }
  }
  d.cyclic = dir / "cyclic.csv";
  put(dir, "cyclic.csv", io::to_csv({"time_s", "pressure_kpa"}, cyc));

  // markers along a 60 mm actuator bent into a half circle
  std::vector<std::vector<double>> mk;
  const double r = 60.0 / kPi;
  for (int i = 0; i <= 6; ++i) {
    const double a = kPi * i / 6;
    mk.push_back({r * std::cos(a), r * std::sin(a)});
  }
  d.markers = dir / "markers.csv";
  put(dir, "markers.csv", io::to_csv({"x_mm", "y_mm"}, mk));

  // blocked-force hold at 13.33 N and a sucker pull-off peaking at 12 N
  std::vector<std::vector<double>> hold, pull;
  for (int i = 0; i <= 300; ++i) {
    const double t = i * 0.02;
    double f = 13.33;
    if (t < 1.0) f = 13.33 * t;
    if (t > 5.0) f = 13.33 * (6.0 - t);
    hold.push_back({t, f + (t >= 1.0 && t <= 5.0 ? 0.02 * gauss(rng) : 0.0)});
  }
  for (int i = 0; i <= 100; ++i) {
    const double x = i * 0.05;
    pull.push_back({x, 12.0 * std::sin(kPi * x / 5.0)});
  }
  put(dir, "hold_force.csv", io::to_csv({"time_s", "force_n"}, hold));
  put(dir, "pull_off.csv", io::to_csv({"displacement_mm", "force_n"}, pull));
  d.force = {dir / "hold_force.csv", dir / "pull_off.csv"};

  // tactile sensor: unloading sits 0.2 kPa below loading over a 2 kPa span
  std::vector<std::vector<double>> load, unload;
  for (int i = 0; i <= 20; ++i) {
    const double f = 0.5 * i;
    load.push_back({f, 0.2 + 0.18 * f});
    unload.push_back({10.0 - f, 0.18 * (10.0 - f)});
  }
  put(dir, "loading.csv", io::to_csv({"force_n", "pressure_kpa"}, load));
  put(dir, "unloading.csv", io::to_csv({"force_n", "pressure_kpa"}, unload));
  d.hysteresis = {dir / "loading.csv", dir / "unloading.csv"};

  // ballooning/rupture series for two thicknesses
  Json traces = Json::array();
  for (double t0 : {0.6, 1.2}) {
    auto s = spec;
    s.thickness_t0_mm = t0;
    const double p = inflation::find_ballooning(s).p_balloon_kpa;
    for (int rep = 0; rep < 2; ++rep) {
      const std::string tag = "t" + io::format_number(t0) + "_r" + std::to_string(rep + 1);
      const auto sim = inflation::simulate_source_coupled(s, 1.5 * p, 6e4 - 1e4 * rep, 8.0, 1e-3);
      put(dir, "balloon_" + tag + ".csv", pressure_csv(sim.trace));
      put(dir, "rupture_" + tag + ".csv", rupture_csv((1.6 + 0.1 * rep) * p, 4.0 + rep));
      traces.push_back({{"file", "balloon_" + tag + ".csv"},
                        {"label", "balloon_" + tag},
                        {"thickness_mm", t0},
                        {"infill", "lines"},
                        {"event", "ballooned"}});
      traces.push_back({{"file", "rupture_" + tag + ".csv"},
                        {"label", "rupture_" + tag},
                        {"thickness_mm", t0},
                        {"infill", "lines"},
                        {"event", "ruptured"}});
    }
  }
  d.manifest = dir / "manifest.json";
  put(dir, "manifest.json", io::dump(Json{{"traces", traces}}));
  return d;
}

}  // namespace

Outcome cmd_demo(const Config& cfg, const fs::path& out) {
  const Data d = write_data(cfg, out / "data");
  Json echo = cfg.json();
  echo["out"] = ".";
  put(out, "config.json", io::dump(echo));

  Outcome total;
  Json steps = Json::array();
  auto take = [&](const std::string& name, const Outcome& o) {
    total.code = std::max(total.code, o.code);
    for (const auto& w : o.warnings) total.warnings.push_back(name + ": " + w);
    steps.push_back({{"step", name}, {"exit", o.code}, {"summary", o.summary}});
  };

  Config fit_cfg = cfg;
  fit_cfg.set("material.family", "gent");
  take("fit", cmd_fit(fit_cfg, d.uniaxial, out / "fit"));
  take("simulate", cmd_simulate(cfg, out / "simulate"));
  Config sphere = cfg;
  sphere.set_json("material.parameters", Json{{"mu", 0.1}});
  sphere.set("material.family", "neohookean");
  sphere.set("simulate.mode", "sphere");
  take("simulate_sphere", cmd_simulate(sphere, out / "simulate_sphere"));
  for (const char* t : {"membrane", "dogbone", "rings"})
    take(std::string("slice_") + t, cmd_slice(cfg, t, out / (std::string("slice_") + t)));
  take("analyze_inflation", cmd_analyze(cfg, "inflation", d.inflation, out / "analyze_inflation"));
  take("analyze_cyclic", cmd_analyze(cfg, "cyclic", {d.cyclic}, out / "analyze_cyclic"));
  take("analyze_curvature", cmd_analyze(cfg, "curvature", {d.markers}, out / "analyze_curvature"));
  take("analyze_force", cmd_analyze(cfg, "force", d.force, out / "analyze_force"));
  take("analyze_hysteresis",
       cmd_analyze(cfg, "hysteresis", d.hysteresis, out / "analyze_hysteresis"));
  take("report", cmd_report(cfg, d.manifest, out / "report"));
  put(out, "demo.json", io::dump(steps));

  total.summary = {{"command", "demo"}, {"steps", steps.size()}, {"exit", total.code},
                   {"output", "demo.json"}};
  return total;
}

}  // namespace tpekit::cli
