#include "tpekit/cli/app.hpp"

#include <CLI11.hpp>
#include <optional>

#include "commands.hpp"
#include "tpekit/error.hpp"

namespace tpekit::cli {

namespace {

struct Flag {
  std::string key;    // config key it overrides
  std::string value;  // as typed
  bool is_path = false;
};

std::string absolute(const std::string& p) { return fs::absolute(p).lexically_normal().string(); }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Design and analysis toolkit for printed elastomer membranes", "tpekit"};
  app.fallthrough();
  app.require_subcommand(1);

  std::string config_path, out_dir, jobs, seed;
  std::vector<std::string> sets;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--jobs", jobs, "concurrent per-file analyses");
  app.add_option("--seed", seed, "seed for synthetic data (demo)");
  app.add_option("--set", sets, "override any config key: key.path=value");

  std::vector<Flag> flags;
  // Adds `--name` overriding config key `key`.
  auto flag = [&flags](CLI::App* sub, const std::string& name, const std::string& key,
                       const std::string& help, bool is_path = false) {
    sub->add_option_function<std::string>(
        name, [&flags, key, is_path](const std::string& v) { flags.push_back({key, v, is_path}); },
        help + " (" + key + ")");
  };

  std::string fit_csv;
  auto* fit = app.add_subcommand("fit", "fit a hyperelastic model to a stress-strain CSV");
  fit->add_option("curve", fit_csv, "strain,stress_mpa CSV")->required();
  flag(fit, "--family", "material.family", "model family");

  auto* sim = app.add_subcommand("simulate", "pressure-stretch curve, ballooning point, transient");
  flag(sim, "--mode", "simulate.mode", "cap or sphere");
  flag(sim, "--family", "material.family", "model family");
  flag(sim, "--thickness", "membrane.thickness_mm", "membrane thickness");
  flag(sim, "--radius", "membrane.radius_mm", "aperture radius");
  flag(sim, "--supply-kpa", "simulate.source.supply_kpa", "source pressure");

  std::string target;
  bool check_airtight = false;
  auto* slice = app.add_subcommand("slice", "plan a toolpath and write G-code");
  slice->add_option("target", target, "membrane, dogbone, rings, or an outline CSV")->required();
  slice->add_flag("--check-airtight", check_airtight, "warn about uncovered cells");
  flag(slice, "--infill", "print.infill", "lines or concentric");
  flag(slice, "--layers", "print.layers", "membrane layers");
  flag(slice, "--diameter", "print.diameter_mm", "membrane diameter");
  flag(slice, "--perimeters", "print.perimeter_loops", "perimeter loops");
  flag(slice, "--multiplier", "print.extrusion_multiplier", "extrusion multiplier");
  flag(slice, "--profile", "printer_profile", "printer profile JSON", true);
  flag(slice, "--calibration", "calibration", "calibration CSV", true);

  std::string kind;
  std::vector<std::string> inputs;
  auto* analyze = app.add_subcommand("analyze", "analyze experiment logs");
  analyze->add_option("kind", kind, "inflation|cyclic|curvature|force|hysteresis|report")
      ->required()
      ->check(CLI::IsMember({"inflation", "cyclic", "curvature", "force", "hysteresis", "report"}));
  analyze->add_option("inputs", inputs, "input files")->required();
  flag(analyze, "--period", "analysis.period_s", "cycle period hint");
  flag(analyze, "--window", "analysis.plateau_window", "plateau window");

  std::string manifest;
  auto* report = app.add_subcommand("report", "ballooning/rupture statistics from a manifest");
  report->add_option("manifest", manifest, "manifest JSON")->required();

  auto* demo = app.add_subcommand("demo", "write synthetic data and run every command on it");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  std::string command = app.get_subcommands().front()->get_name();
  io::Json summary;
  int code = kOk;
  try {
    Config cfg = config_path.empty() ? Config() : Config::load(config_path);
    if (!out_dir.empty()) cfg.set_json("out", absolute(out_dir));
    if (!jobs.empty()) cfg.set("jobs", jobs);
    if (!seed.empty()) cfg.set("seed", seed);
    if (check_airtight) cfg.set_json("check_airtight", true);
    for (const auto& f : flags) cfg.set(f.key, f.is_path ? absolute(f.value) : f.value);
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value");
      cfg.set(s.substr(0, eq), s.substr(eq + 1));
    }
    const fs::path dir = cfg.path("out");

    Outcome o;
    if (*fit)
      o = cmd_fit(cfg, fit_csv, dir);
    else if (*sim)
      o = cmd_simulate(cfg, dir);
    else if (*slice)
      o = cmd_slice(cfg, target, dir);
    else if (*analyze)
      o = cmd_analyze(cfg, kind, std::vector<fs::path>(inputs.begin(), inputs.end()), dir);
    else if (*report)
      o = cmd_report(cfg, manifest, dir);
    else if (*demo)
      o = cmd_demo(cfg, dir);
    for (const auto& w : o.warnings) err << "warning: " << w << "\n";
    code = o.code;
    summary = o.summary;
  } catch (const AnalysisError& e) {
    err << "error: " << e.what() << "\n";
    code = kAnalysisError;
    summary = {{"command", command}, {"error", e.what()}};
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    code = kInputError;
    summary = {{"command", command}, {"error", e.what()}};
  }
  summary["exit"] = code;
  out << summary.dump() << "\n";
  return code;
}

}  // namespace tpekit::cli
