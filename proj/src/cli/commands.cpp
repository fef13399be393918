#include "commands.hpp"

#include "tpekit/cli/app.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "tpekit/analysis/cycles.hpp"
#include "tpekit/analysis/forces.hpp"
#include "tpekit/analysis/geometry.hpp"
#include "tpekit/analysis/phases.hpp"
#include "tpekit/error.hpp"
#include "tpekit/inflation/ballooning.hpp"
#include "tpekit/inflation/source_coupled.hpp"
#include "tpekit/io/csv.hpp"
#include "tpekit/material/fit.hpp"
#include "tpekit/toolpath/coverage.hpp"

namespace tpekit::cli {

using io::Json;

namespace {

// JSON has no inf/nan; they become null.
Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_file(const fs::path& out, const std::string& name, const std::string& text) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw IoError("cannot create " + out.string() + ": " + ec.message());
  io::write_text(out / name, text);
}

// Only the file name goes into reports so output does not depend on where
// the inputs live.
std::string name_of(const fs::path& p) { return p.filename().string(); }

material::HyperelasticModel material_from(const Config& cfg) {
  Json family, params;
  const fs::path report = cfg.path("material.fit_report");
  if (!report.empty()) {
    Json j;
    try {
      j = Json::parse(io::read_text(report));
    } catch (const Json::parse_error& e) {
      throw ConfigError(report.string() + ": " + e.what());
    }
    if (!j.is_object() || !j.contains("family") || !j.contains("parameters"))
      throw ConfigError(report.string() + ": not a fit report");
    family = j["family"];
    params = j["parameters"];
  } else {
    family = cfg.at("material.family");
    params = cfg.at("material.parameters");
  }
  if (!family.is_string() || !params.is_object()) throw ConfigError("malformed material entry");
  const auto tag = material::parse_family(family.get<std::string>());
  const auto names = material::parameter_names(tag);
  std::vector<double> p;
  for (const auto& n : names) {
    if (!params.contains(n) || !params[n].is_number())
      throw ConfigError("material parameter '" + n + "' missing for " + material::family_name(tag));
    p.push_back(params[n].get<double>());
  }
  if (params.size() != names.size())
    throw ConfigError("material has parameters not used by " + material::family_name(tag));
  auto model = material::from_parameters(tag, p);
  material::validate(model);
  return model;
}

Json material_json(const material::HyperelasticModel& m) {
  const auto tag = material::family_of(m);
  const auto names = material::parameter_names(tag);
  const auto values = material::parameters(m);
  Json p = Json::object();
  for (std::size_t i = 0; i < names.size(); ++i) p[names[i]] = values[i];
  return Json{{"family", material::family_name(tag)}, {"parameters", p}};
}

inflation::MembraneSpec membrane_from(const Config& cfg) {
  inflation::MembraneSpec s;
  s.radius_a_mm = cfg.number("membrane.radius_mm");
  s.thickness_t0_mm = cfg.number("membrane.thickness_mm");
  s.layers = cfg.integer("membrane.layers");
  s.infill = cfg.string("membrane.infill") == "concentric" ? inflation::Infill::Concentric
                                                           : inflation::Infill::Lines;
  s.material = material_from(cfg);
  s.validate();
  return s;
}

// Runs f(i) for every index on up to `jobs` threads. Results land in their
// own slot, and the first failure in input order is rethrown.
template <class F>
void parallel_for(std::size_t n, int jobs, F f) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t t = std::min<std::size_t>(std::max(jobs, 1), n);
  if (t <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < t; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

analysis::PhaseOptions phase_options(const Config& cfg) {
  analysis::PhaseOptions o;
  o.noise_window_s = cfg.number("analysis.noise_window_s");
  o.onset_sigmas = cfg.number("analysis.onset_sigmas");
  o.recover_fraction = cfg.number("analysis.recover_fraction");
  return o;
}

analysis::CycleOptions cycle_options(const Config& cfg) {
  analysis::CycleOptions o;
  o.threshold_fraction = cfg.number("analysis.threshold_fraction");
  o.failure_fraction = cfg.number("analysis.failure_fraction");
  o.reference_cycles = cfg.integer("analysis.reference_cycles");
  o.period_tolerance = cfg.number("analysis.period_tolerance");
  return o;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string csv_value(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return csv_field(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return io::format_number(v.get<double>());
  return csv_field(v.dump());
}

// Summary table from flat JSON records sharing the given columns.
std::string summary_csv(const std::vector<std::string>& columns, const std::vector<Json>& rows) {
  std::string out;
  for (std::size_t i = 0; i < columns.size(); ++i) out += (i ? "," : "") + columns[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < columns.size(); ++i)
      out += (i ? "," : "") + csv_value(r.value(columns[i], Json(nullptr)));
    out += '\n';
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- fit

Outcome cmd_fit(const Config& cfg, const fs::path& curve_csv, const fs::path& out) {
  const auto curve = io::read_stress_strain(curve_csv);
  const auto tag = material::parse_family(cfg.string("material.family"));
  const auto fit = material::fit_model(curve, tag);
  Json report = io::fit_result_json(fit);
  write_file(out, "fit_report.json", io::dump(report));
  Outcome o;
  o.code = fit.converged ? kOk : kAnalysisError;
  o.summary = {{"command", "fit"},
               {"input", name_of(curve_csv)},
               {"family", report["family"]},
               {"converged", fit.converged},
               {"rms_residual_mpa", fit.rms_residual_mpa},
               {"output", "fit_report.json"}};
  if (!fit.converged) o.warnings.push_back("fit did not converge");
  return o;
}

// ---------------------------------------------------------------- simulate

namespace {

Outcome simulate_sphere(const Config& cfg, const fs::path& out) {
  const auto model = material_from(cfg);
  const double t0 = cfg.number("membrane.thickness_mm");
  const double r0 = cfg.number("membrane.radius_mm");
  if (!(t0 > 0.0) || !(r0 > 0.0)) throw ArgumentError("sphere needs thickness and radius > 0");
  const double smax = cfg.number("simulate.sphere_stretch_max");
  if (!(smax > 1.0)) throw ArgumentError("simulate.sphere_stretch_max must be > 1");
  const int n = cfg.integer("simulate.curve_points");
  if (n < 2) throw ArgumentError("simulate.curve_points must be >= 2");
  const auto lim = inflation::find_sphere_limit(model, t0, r0, smax, cfg.integer("simulate.scan_samples"));

  const double top = std::min(smax, material::equibiaxial_locking_stretch(model) * (1.0 - 1e-9));
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < n; ++i) {
    const double s = 1.0 + (top - 1.0) * i / (n - 1);
    rows.push_back({s, inflation::sphere_pressure(model, t0, r0, s), t0 / (s * s)});
  }
  write_file(out, "sphere_curve.csv", io::to_csv({"stretch", "pressure_kpa", "thickness_mm"}, rows));
  Json j = {{"mode", "sphere"},
            {"material", material_json(model)},
            {"radius_mm", r0},
            {"thickness_mm", t0},
            {"found", lim.found},
            {"stretch_at_limit", lim.found ? num(lim.stretch_at_limit) : Json(nullptr)},
            {"strain_at_limit", lim.found ? num(lim.stretch_at_limit - 1.0) : Json(nullptr)},
            {"p_limit_kpa", lim.found ? num(lim.p_limit_kpa) : Json(nullptr)}};
  write_file(out, "ballooning.json", io::dump(j));
  Outcome o;
  o.summary = {{"command", "simulate"}, {"mode", "sphere"}, {"found", lim.found},
               {"stretch_at_limit", j["stretch_at_limit"]}, {"output", "ballooning.json"}};
  return o;
}

}  // namespace

Outcome cmd_simulate(const Config& cfg, const fs::path& out) {
  if (cfg.string("simulate.mode") == "sphere") return simulate_sphere(cfg, out);
  Outcome o;
  const auto spec = membrane_from(cfg);
  const int n = cfg.integer("simulate.curve_points");
  if (n < 2) throw ArgumentError("simulate.curve_points must be >= 2");
  const int samples = cfg.integer("simulate.scan_samples");
  const double limit = inflation::admissible_theta_limit(spec);
  const double tmax_cfg = cfg.number("simulate.theta_max_rad");
  if (tmax_cfg < 0.0) throw ArgumentError("simulate.theta_max_rad must be >= 0 (0 = full range)");
  const double tmax = tmax_cfg > 0.0 ? std::min(tmax_cfg, limit) : limit;
  const auto curve = inflation::pressure_stretch_curve(spec, tmax, n);
  write_file(out, "pressure_stretch.csv", io::pressure_stretch_csv(curve));

  const auto b = inflation::find_ballooning(spec, samples);
  const double factor = cfg.number("simulate.thickness_factor");
  if (!(factor > 0.0)) throw ArgumentError("simulate.thickness_factor must be > 0");
  auto spec2 = spec;
  spec2.thickness_t0_mm *= factor;
  const auto b2 = inflation::find_ballooning(spec2, samples);

  auto limit_json = [](const inflation::BallooningResult& r) {
    return Json{{"found", r.found},
                {"p_balloon_kpa", r.found ? num(r.p_balloon_kpa) : Json(nullptr)},
                {"stretch_at_limit", r.found ? num(r.stretch_at_limit) : Json(nullptr)},
                {"strain_at_limit", r.found ? num(r.stretch_at_limit - 1.0) : Json(nullptr)},
                {"theta_at_limit_rad", r.found ? num(r.theta_at_limit) : Json(nullptr)}};
  };
  Json j = {{"mode", "cap"},
            {"material", material_json(spec.material)},
            {"membrane",
             {{"radius_mm", spec.radius_a_mm},
              {"thickness_mm", spec.thickness_t0_mm},
              {"layers", spec.layers},
              {"infill", cfg.string("membrane.infill")}}}};
  j.update(limit_json(b));
  Json scaled = limit_json(b2);
  scaled["thickness_mm"] = spec2.thickness_t0_mm;
  scaled["pressure_ratio"] =
      b.found && b2.found ? num(b2.p_balloon_kpa / b.p_balloon_kpa) : Json(nullptr);
  j["thickness_scaling"] = scaled;

  Json source = nullptr;
  if (cfg.flag("simulate.source.enabled")) {
    const double supply_cfg = cfg.number("simulate.source.supply_kpa");
    double supply = -1.0;
    if (supply_cfg > 0.0)
      supply = supply_cfg;
    else if (b.found)
      supply = cfg.number("simulate.source.supply_factor") * b.p_balloon_kpa;
    if (supply < 0.0) {
      o.warnings.push_back("no limit point and no supply_kpa: source-coupled run skipped");
      source = {{"skipped", "no limit point"}};
    } else {
      inflation::SourceCoupledOptions so;
      so.valve_open_s = cfg.number("simulate.source.valve_open_s");
      const auto r = inflation::simulate_source_coupled(
          spec, supply, cfg.number("simulate.source.flow_coefficient"),
          cfg.number("simulate.source.duration_s"), cfg.number("simulate.source.dt_s"), so);
      write_file(out, "simulation_trace.csv", io::simulation_trace_csv(r.trace, r.states));
      double peak = 0.0;
      for (const auto& s : r.trace.samples()) peak = std::max(peak, s.p_kpa);
      source = {{"supply_kpa", supply},
                {"samples", r.trace.size()},
                {"peak_pressure_kpa", peak},
                {"final_stretch", r.states.empty() ? 1.0 : r.states.back().stretch},
                {"delivered_volume_mm3", r.delivered_volume_mm3},
                {"rupture_range_reached", r.rupture_range_reached},
                {"output", "simulation_trace.csv"}};
    }
  }
  j["source"] = source;
  write_file(out, "ballooning.json", io::dump(j));
  o.summary = {{"command", "simulate"},
               {"mode", "cap"},
               {"found", b.found},
               {"p_balloon_kpa", j["p_balloon_kpa"]},
               {"stretch_at_limit", j["stretch_at_limit"]},
               {"output", "ballooning.json"}};
  return o;
}

// ---------------------------------------------------------------- slice

namespace {

toolpath::PrinterProfile profile_from(const Config& cfg, bool& from_file) {
  const fs::path p = cfg.path("printer_profile");
  from_file = !p.empty();
  if (from_file) {
    Json j;
    try {
      j = Json::parse(io::read_text(p));
    } catch (const Json::parse_error& e) {
      throw ConfigError(p.string() + ": " + e.what());
    }
    return io::printer_profile_from_json(j);
  }
  // built-in two-head machine: pellet extruder T0, filament T1
  toolpath::PrinterProfile prof;
  prof.tools = {{0, 200.0}, {1, 220.0}};
  return prof;
}

toolpath::InfillPattern infill_of(const std::string& s) {
  return s == "concentric" ? toolpath::InfillPattern::Concentric : toolpath::InfillPattern::Lines;
}

Json coverage_json(const toolpath::CoverageReport& r) {
  return Json{{"layer", r.layer},
              {"z_mm", r.z_mm},
              {"cell_mm", r.cell_mm},
              {"interior_cells", r.interior_cells},
              {"gap_cells", r.gaps.size()},
              {"max_clearance_mm", num(r.max_clearance_mm)},
              {"gap_width_mm", num(r.gap_width_mm())},
              {"airtight_candidate", r.airtight_candidate()}};
}

}  // namespace

Outcome cmd_slice(const Config& cfg, const std::string& target, const fs::path& out) {
  bool profile_file = false;
  const auto profile = profile_from(cfg, profile_file);
  const fs::path cal_path = cfg.path("calibration");
  const auto calibration =
      cal_path.empty() ? toolpath::CalibrationTable::identity() : io::read_calibration(cal_path);

  toolpath::Toolpath path;
  std::optional<toolpath::Region> region;
  std::string kind = target;
  double tol = cfg.number("print.chordal_tol_mm");
  if (profile_file) tol = profile.chordal_tol_mm;

  if (target == "membrane") {
    toolpath::MembranePrintSpec s;
    s.diameter_mm = cfg.number("print.diameter_mm");
    s.layers = cfg.integer("print.layers");
    s.layer_height_mm = cfg.number("print.layer_height_mm");
    s.line_width_mm = cfg.number("print.line_width_mm");
    s.infill = infill_of(cfg.string("print.infill"));
    s.perimeter_loops = cfg.integer("print.perimeter_loops");
    if (!cfg.at("print.extrusion_multiplier").is_null())
      s.extrusion_multiplier = cfg.number("print.extrusion_multiplier");
    s.tool = cfg.integer("print.tool");
    s.print_speed_mm_s = cfg.number("print.print_speed_mm_s");
    s.travel_speed_mm_s = cfg.number("print.travel_speed_mm_s");
    s.first_angle_deg = cfg.number("print.first_angle_deg");
    s.angle_step_deg = cfg.number("print.angle_step_deg");
    s.chordal_tol_mm = tol;
    path = toolpath::plan_membrane(s);
    region = toolpath::CircleRegion{{0.0, 0.0}, s.diameter_mm / 2};
  } else if (target == "rings") {
    toolpath::RingsSpec s;
    for (const auto& b : cfg.at("rings.bands"))
      s.bands.push_back({b["inner_radius_mm"].get<double>(), b["outer_radius_mm"].get<double>(),
                         b["tool"].get<int>()});
    s.layers = cfg.integer("rings.layers");
    s.layer_height_mm = cfg.number("rings.layer_height_mm");
    s.line_width_mm = cfg.number("rings.line_width_mm");
    s.multiplier = cfg.number("rings.multiplier");
    s.print_speed_mm_s = cfg.number("rings.print_speed_mm_s");
    s.travel_speed_mm_s = cfg.number("rings.travel_speed_mm_s");
    s.chordal_tol_mm = profile_file ? tol : cfg.number("rings.chordal_tol_mm");
    s.alternate_order = cfg.flag("rings.alternate_order");
    path = toolpath::plan_rings(s);
    double inner = INFINITY, outer = 0.0;
    for (const auto& b : s.bands) {
      inner = std::min(inner, b.inner_radius_mm);
      outer = std::max(outer, b.outer_radius_mm);
    }
    // a ring set with a central hole is not a disc; coverage is skipped
    if (inner == 0.0) region = toolpath::CircleRegion{{0.0, 0.0}, outer};
  } else {
    toolpath::Ring outline;
    if (target == "dogbone") {
      const fs::path o = cfg.path("dogbone.outline");
      if (o.empty()) {
        outline = toolpath::dumbbell_outline(tol);
      } else {
        for (const auto& p : io::read_markers(o)) outline.push_back({p.x, p.y});
      }
    } else {
      kind = "polygon";
      for (const auto& p : io::read_markers(target)) outline.push_back({p.x, p.y});
    }
    toolpath::DogboneSpec s;
    s.layers = cfg.integer("dogbone.layers");
    s.layer_height_mm = cfg.number("dogbone.layer_height_mm");
    s.line_width_mm = cfg.number("dogbone.line_width_mm");
    s.perimeter_loops = cfg.integer("dogbone.perimeter_loops");
    s.infill_angle_deg = cfg.number("dogbone.infill_angle_deg");
    s.angle_step_deg = cfg.number("dogbone.angle_step_deg");
    s.multiplier = cfg.number("dogbone.multiplier");
    s.print_speed_mm_s = cfg.number("dogbone.print_speed_mm_s");
    s.travel_speed_mm_s = cfg.number("dogbone.travel_speed_mm_s");
    s.tool = cfg.integer("dogbone.tool");
    path = toolpath::plan_dogbone(outline, s);
    if (toolpath::ring_area(outline) < 0.0) std::reverse(outline.begin(), outline.end());
    region = toolpath::PolygonRegion{outline};
  }

  const auto program = toolpath::emit_gcode(path, profile, calibration);
  const std::string text = toolpath::serialize(program);
  write_file(out, "toolpath.gcode", text);
  const bool round_trip = toolpath::serialize(toolpath::parse_gcode(text)) == text;

  Outcome o;
  const double max_gap = cfg.number("max_gap_mm");
  if (max_gap < 0.0) throw ArgumentError("max_gap_mm must be >= 0");
  Json layers = Json::array();
  std::size_t gap_layers = 0;
  if (region) {
    const auto heights = path.layer_heights();
    for (std::size_t k = 0; k < heights.size(); ++k) {
      const auto r = toolpath::verify_coverage(path, k, *region, max_gap);
      layers.push_back(coverage_json(r));
      if (!r.airtight_candidate()) {
        ++gap_layers;
        if (cfg.flag("check_airtight"))
          o.warnings.push_back("layer " + std::to_string(k) + " has " +
                               std::to_string(r.gaps.size()) + " uncovered cells, gap width " +
                               io::format_number(r.gap_width_mm()) + " mm: may not be airtight");
      }
    }
  }
  Json report = {{"target", kind},
                 {"layers", path.layer_heights().size()},
                 {"moves", path.moves().size()},
                 {"extruded_volume_mm3", toolpath::total_extrusion(program)},
                 {"tool_changes", toolpath::count_tool_changes(program)},
                 {"round_trip_identical", round_trip},
                 {"coverage_checked", region.has_value()},
                 {"airtight_candidate", region ? Json(gap_layers == 0) : Json(nullptr)},
                 {"coverage", layers}};
  write_file(out, "coverage.json", io::dump(report));
  o.summary = {{"command", "slice"},
               {"target", kind},
               {"lines", program.commands.size()},
               {"tool_changes", report["tool_changes"]},
               {"airtight_candidate", report["airtight_candidate"]},
               {"output", "toolpath.gcode"}};
  return o;
}

// ---------------------------------------------------------------- analyze

namespace {

Json point_json(const PressureTrace& t, std::size_t i) {
  return Json{{"index", i}, {"t_s", t[i].t_s}, {"p_kpa", t[i].p_kpa}};
}

Json analyze_inflation(const Config& cfg, const fs::path& file) {
  const auto table = io::read_csv(file);
  if (table.header == std::vector<std::string>{"x_mm", "y_mm"}) {
    const auto est = analysis::stretch_from_profile(io::read_profile(file));
    Json e = nullptr;
    if (!est.flat)
      e = {{"center_x_mm", est.ellipse.center.x},
           {"center_y_mm", est.ellipse.center.y},
           {"semi_major_mm", est.ellipse.semi_major_mm},
           {"semi_minor_mm", est.ellipse.semi_minor_mm},
           {"rotation_rad", est.ellipse.rotation_rad}};
    return Json{{"file", name_of(file)},   {"type", "profile"},
                {"stretch", est.stretch},  {"stretch_percent", est.stretch_percent},
                {"strain_percent", est.strain_percent},
                {"arc_length_mm", est.arc_length_mm},
                {"flat", est.flat},        {"ellipse", e}};
  }
  const auto trace = io::read_pressure_trace(file);
  const auto r = analysis::detect_inflation_phases(trace, phase_options(cfg));
  Json marks = nullptr;
  if (r.status != analysis::PhaseStatus::NoSignature) {
    marks = {{"i", point_json(trace, r.marks.i_open)},
             {"ii", point_json(trace, r.marks.ii_peak)},
             {"iii", point_json(trace, r.marks.iii_trough)},
             {"iv", r.status == analysis::PhaseStatus::Complete
                        ? point_json(trace, r.marks.iv_recover)
                        : Json(nullptr)}};
  }
  Json j = {{"file", name_of(file)},
            {"type", "pressure"},
            {"status", analysis::phase_status_name(r.status)},
            {"noise_sigma_kpa", r.noise_sigma_kpa},
            {"marks", marks}};
  if (r.status != analysis::PhaseStatus::NoSignature) {
    j["ballooning_at_peak_kpa"] = trace[r.marks.ii_peak].p_kpa;
    j["ballooning_at_trough_kpa"] = trace[r.marks.iii_trough].p_kpa;
  }
  return j;
}

Json analyze_cyclic(const Config& cfg, const fs::path& file) {
  const auto trace = io::read_pressure_trace(file);
  auto st = analysis::segment_cycles(trace, cfg.number("analysis.period_s"), cycle_options(cfg));
  Json decay = nullptr;
  std::size_t before = 0;
  for (const auto& c : st.cycles)
    if (!st.failure_cycle || c.index < *st.failure_cycle) ++before;
  if (before >= 10) {
    const auto fit = analysis::fit_peak_decay(st);
    decay = {{"converged", fit.converged}, {"rms_residual_kpa", fit.rms_residual_kpa}};
    if (fit.params) {
      decay["offset_kpa"] = fit.params->offset_kpa;
      decay["amplitude_kpa"] = fit.params->amplitude_kpa;
      decay["rate_per_cycle"] = fit.params->rate_per_cycle;
    }
  }
  Json cycles = Json::array();
  for (const auto& c : st.cycles)
    cycles.push_back({c.index, c.start_t_s, c.peak_p_kpa, c.baseline_p_kpa});
  return Json{{"file", name_of(file)},
              {"cycle_count", st.cycles.size()},
              {"failure_cycle", st.failure_cycle ? Json(*st.failure_cycle) : Json(nullptr)},
              {"baseline_kpa", st.baseline_kpa},
              {"median_amplitude_kpa", st.median_amplitude_kpa},
              {"decay", decay},
              {"cycles_columns", {"index", "start_t_s", "peak_p_kpa", "baseline_p_kpa"}},
              {"cycles", cycles}};
}

Json analyze_curvature(const fs::path& file) {
  const auto est = analysis::curvature_from_markers(io::read_markers(file));
  return Json{{"file", name_of(file)},
              {"radius_mm", num(est.radius_mm)},
              {"curvature_per_mm", est.curvature_per_mm},
              {"bend_angle_deg", est.bend_angle_deg},
              {"center_x_mm", est.collinear ? Json(nullptr) : Json(est.center.x)},
              {"center_y_mm", est.collinear ? Json(nullptr) : Json(est.center.y)},
              {"collinear", est.collinear}};
}

Json analyze_force(const Config& cfg, const fs::path& file, std::vector<std::string>& notes) {
  const auto trace = io::read_force_trace(file);
  const double window = cfg.number("analysis.plateau_window");
  Json plateau = nullptr;
  const auto& s = trace.samples();
  if (s.size() >= 2 && s.back().x - s.front().x >= window) {
    const auto p = analysis::plateau_force(trace, window);
    plateau = {{"mean_n", p.mean_n}, {"sd_n", p.sd_n}, {"start", p.start}, {"end", p.end}};
  } else {
    notes.push_back(name_of(file) + ": shorter than the plateau window, plateau skipped");
  }
  const auto a = analysis::adhesion_peak(trace);
  return Json{{"file", name_of(file)},
              {"abscissa", trace.abscissa() == ForceAbscissa::Time ? "time_s" : "displacement_mm"},
              {"plateau", plateau},
              {"peak_force_n", a.pull_off_force_n},
              {"peak_at", a.at}};
}

// Flattens nested objects one level ("plateau.mean_n") for the CSV summary.
Json flatten(const Json& j) {
  Json f = Json::object();
  for (const auto& [k, v] : j.items()) {
    if (v.is_object()) {
      for (const auto& [k2, v2] : v.items())
        if (!v2.is_structured()) f[k + "." + k2] = v2;
    } else if (!v.is_array()) {
      f[k] = v;
    }
  }
  return f;
}

std::vector<std::string> union_columns(const std::vector<Json>& rows) {
  std::vector<std::string> cols;
  for (const auto& r : rows)
    for (const auto& [k, v] : r.items())
      if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
  return cols;
}

}  // namespace

Outcome cmd_analyze(const Config& cfg, const std::string& kind, const std::vector<fs::path>& inputs,
                    const fs::path& out) {
  if (inputs.empty()) throw ArgumentError("analyze " + kind + " needs at least one input file");
  Outcome o;
  if (kind == "report") {
    if (inputs.size() != 1) throw ArgumentError("analyze report takes one manifest file");
    return cmd_report(cfg, inputs[0], out);
  }
  Json result;
  std::vector<Json> rows;
  if (kind == "hysteresis") {
    if (inputs.size() != 2)
      throw ArgumentError("analyze hysteresis takes a loading and an unloading file");
    const auto h = analysis::sensor_hysteresis(io::read_force_pressure(inputs[0]),
                                               io::read_force_pressure(inputs[1]));
    result = {{"loading", name_of(inputs[0])},
              {"unloading", name_of(inputs[1])},
              {"max_gap_kpa", h.max_gap_kpa},
              {"normalized", h.normalized},
              {"at_force_n", h.at_force_n},
              {"overlap_lo_n", h.overlap_lo_n},
              {"overlap_hi_n", h.overlap_hi_n}};
    rows.push_back(result);
  } else {
    std::vector<Json> per(inputs.size());
    std::vector<std::vector<std::string>> notes(inputs.size());
    auto one = [&](std::size_t i) {
      if (kind == "inflation")
        per[i] = analyze_inflation(cfg, inputs[i]);
      else if (kind == "cyclic")
        per[i] = analyze_cyclic(cfg, inputs[i]);
      else if (kind == "curvature")
        per[i] = analyze_curvature(inputs[i]);
      else if (kind == "force")
        per[i] = analyze_force(cfg, inputs[i], notes[i]);
      else
        throw ArgumentError("unknown analysis kind '" + kind + "'");
    };
    parallel_for(inputs.size(), cfg.integer("jobs"), one);
    result = Json::array();
    for (std::size_t i = 0; i < per.size(); ++i) {
      result.push_back(per[i]);
      rows.push_back(flatten(per[i]));
      for (auto& n : notes[i]) o.warnings.push_back(std::move(n));
    }
  }
  write_file(out, kind + ".json", io::dump(result));
  write_file(out, kind + "_summary.csv", summary_csv(union_columns(rows), rows));

  o.summary = {{"command", "analyze"}, {"kind", kind}, {"inputs", inputs.size()},
               {"output", kind + ".json"}};
  if (kind == "cyclic" && result.size() == 1) {
    o.summary["cycle_count"] = result[0]["cycle_count"];
    o.summary["failure_cycle"] = result[0]["failure_cycle"];
  } else if (kind == "inflation" && result.size() == 1) {
    o.summary["type"] = result[0]["type"];
    if (result[0]["type"] == "profile")
      o.summary["stretch"] = result[0]["stretch"];
    else
      o.summary["status"] = result[0]["status"];
  } else if (kind == "curvature" && result.size() == 1) {
    o.summary["bend_angle_deg"] = result[0]["bend_angle_deg"];
  } else if (kind == "force" && result.size() == 1) {
    o.summary["plateau_n"] =
        result[0]["plateau"].is_null() ? Json(nullptr) : result[0]["plateau"]["mean_n"];
  } else if (kind == "hysteresis") {
    o.summary["normalized"] = result["normalized"];
  }
  return o;
}

// ---------------------------------------------------------------- report

Outcome cmd_report(const Config& cfg, const fs::path& manifest, const fs::path& out) {
  Json m;
  try {
    m = Json::parse(io::read_text(manifest));
  } catch (const Json::parse_error& e) {
    throw ConfigError(manifest.string() + ": " + e.what());
  }
  if (!m.is_object() || !m.contains("traces") || !m["traces"].is_array())
    throw ConfigError(manifest.string() + ": expected {\"traces\": [...]}");
  for (const auto& [k, v] : m.items())
    if (k != "traces") throw ConfigError(manifest.string() + ": unknown key '" + k + "'");

  const fs::path base = manifest.parent_path();
  const auto& entries = m["traces"];
  std::vector<analysis::LabelledTrace> traces(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& e = entries[i];
    if (!e.is_object()) throw ConfigError("manifest entries must be objects");
    for (const auto& [k, v] : e.items())
      if (k != "file" && k != "label" && k != "thickness_mm" && k != "infill" && k != "event")
        throw ConfigError("manifest: unknown key '" + k + "'");
    if (!e.contains("file") || !e["file"].is_string() || !e.contains("thickness_mm") ||
        !e["thickness_mm"].is_number() || !e.contains("infill") || !e["infill"].is_string() ||
        !e.contains("event") || !e["event"].is_string())
      throw ConfigError("manifest entries need file, thickness_mm, infill and event");
    const std::string ev = e["event"].get<std::string>();
    if (ev != "ballooned" && ev != "ruptured")
      throw ConfigError("manifest: event must be 'ballooned' or 'ruptured'");
    fs::path f = e["file"].get<std::string>();
    if (f.is_relative()) f = base / f;
    traces[i].label = e.value("label", name_of(f));
    traces[i].thickness_mm = e["thickness_mm"].get<double>();
    traces[i].infill = e["infill"].get<std::string>();
    traces[i].event = ev == "ballooned" ? analysis::MembraneEvent::Ballooned
                                        : analysis::MembraneEvent::Ruptured;
    traces[i].trace = io::read_pressure_trace(f);
  }
  const auto rep = analysis::ballooning_rupture_report(traces, phase_options(cfg));

  auto stats = [](const std::optional<analysis::Stats>& s) {
    return s ? Json{{"n", s->n}, {"mean_kpa", s->mean}, {"sd_kpa", s->sd}} : Json(nullptr);
  };
  Json events = Json::array();
  for (const auto& e : rep.events)
    events.push_back({{"label", e.label},
                      {"thickness_mm", e.thickness_mm},
                      {"infill", e.infill},
                      {"event", e.event == analysis::MembraneEvent::Ballooned ? "ballooned" : "ruptured"},
                      {"p_at_peak_kpa", e.p_at_peak_kpa},
                      {"p_at_trough_kpa", e.p_at_trough_kpa},
                      {"signature_found", e.signature_found}});
  Json groups = Json::array();
  std::vector<Json> rows;
  for (const auto& g : rep.groups) {
    Json gj = {{"infill", g.infill},
               {"thickness_mm", g.thickness_mm},
               {"ballooning_at_peak", stats(g.ballooning_at_peak)},
               {"ballooning_at_trough", stats(g.ballooning_at_trough)},
               {"rupture", stats(g.rupture)},
               {"margin_kpa", g.margin_kpa ? Json(*g.margin_kpa) : Json(nullptr)},
               {"positive_margin", g.positive_margin}};
    rows.push_back(flatten(gj));
    groups.push_back(std::move(gj));
  }
  Json mono = Json::object();
  for (const auto& [infill, ok] : rep.monotone_in_thickness) mono[infill] = ok;
  Json j = {{"events", events},
            {"groups", groups},
            {"monotone_in_thickness", mono},
            {"warnings", rep.warnings}};
  write_file(out, "ballooning_report.json", io::dump(j));
  write_file(out, "ballooning_summary.csv", summary_csv(union_columns(rows), rows));
  Outcome o;
  o.warnings = rep.warnings;
  o.summary = {{"command", "report"},
               {"traces", traces.size()},
               {"groups", groups.size()},
               {"output", "ballooning_report.json"}};
  return o;
}

}  // namespace tpekit::cli
