#include "tpekit/io/json.hpp"

#include "tpekit/error.hpp"

namespace tpekit::io {

Json fit_result_json(const material::FitResult& fit) {
  const auto tag = material::family_of(fit.model);
  const auto names = material::parameter_names(tag);
  const auto values = material::parameters(fit.model);
  Json params = Json::object();
  for (std::size_t i = 0; i < names.size(); ++i) params[names[i]] = values[i];
  return Json{{"family", material::family_name(tag)},
              {"parameters", params},
              {"rms_residual_mpa", fit.rms_residual_mpa},
              {"max_residual_mpa", fit.max_residual_mpa},
              {"iterations", fit.iterations},
              {"converged", fit.converged}};
}

namespace {

double number(const Json& j, const char* key) {
  if (!j.is_number()) throw ConfigError(std::string("printer profile: '") + key + "' must be a number");
  return j.get<double>();
}

}  // namespace

toolpath::PrinterProfile printer_profile_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("printer profile must be a JSON object");
  toolpath::PrinterProfile p;
  for (const auto& [key, v] : j.items()) {
    if (key == "bed_center_x_mm") {
      p.bed_center_x_mm = number(v, "bed_center_x_mm");
    } else if (key == "bed_center_y_mm") {
      p.bed_center_y_mm = number(v, "bed_center_y_mm");
    } else if (key == "steps_note") {
      if (!v.is_string()) throw ConfigError("printer profile: 'steps_note' must be a string");
      p.steps_note = v.get<std::string>();
    } else if (key == "prime_e_mm3") {
      p.prime_e_mm3 = number(v, "prime_e_mm3");
    } else if (key == "retract_e_mm3") {
      p.retract_e_mm3 = number(v, "retract_e_mm3");
    } else if (key == "chordal_tol_mm") {
      p.chordal_tol_mm = number(v, "chordal_tol_mm");
    } else if (key == "tools") {
      if (!v.is_array() || v.empty())
        throw ConfigError("printer profile: 'tools' must be a non-empty array");
      p.tools.clear();
      for (const auto& t : v) {
        if (!t.is_object() || !t.contains("index") || !t["index"].is_number_integer())
          throw ConfigError("printer profile: each tool needs an integer 'index'");
        for (const auto& [tk, tv] : t.items())
          if (tk != "index" && tk != "nozzle_temp_c")
            throw ConfigError("printer profile: unknown tool key '" + tk + "'");
        toolpath::ToolTemperature tt;
        tt.index = t["index"].get<int>();
        if (tt.index < 0) throw ConfigError("printer profile: tool index must be >= 0");
        if (t.contains("nozzle_temp_c")) tt.nozzle_temp_c = number(t["nozzle_temp_c"], "nozzle_temp_c");
        for (const auto& other : p.tools)
          if (other.index == tt.index) throw ConfigError("printer profile: duplicate tool index");
        p.tools.push_back(tt);
      }
    } else {
      throw ConfigError("printer profile: unknown key '" + key + "'");
    }
  }
  if (p.prime_e_mm3 < 0.0 || p.retract_e_mm3 < 0.0)
    throw ConfigError("printer profile: prime/retract must be >= 0");
  if (!(p.chordal_tol_mm > 0.0)) throw ConfigError("printer profile: chordal_tol_mm must be > 0");
  return p;
}

Json printer_profile_json(const toolpath::PrinterProfile& p) {
  Json tools = Json::array();
  for (const auto& t : p.tools) tools.push_back({{"index", t.index}, {"nozzle_temp_c", t.nozzle_temp_c}});
  return Json{{"bed_center_x_mm", p.bed_center_x_mm}, {"bed_center_y_mm", p.bed_center_y_mm},
              {"steps_note", p.steps_note},           {"tools", tools},
              {"prime_e_mm3", p.prime_e_mm3},         {"retract_e_mm3", p.retract_e_mm3},
              {"chordal_tol_mm", p.chordal_tol_mm}};
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace tpekit::io
