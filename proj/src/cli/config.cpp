#include "tpekit/cli/config.hpp"

#include "tpekit/error.hpp"
#include "tpekit/io/csv.hpp"

namespace tpekit::cli {

using io::Json;

namespace {

const char* kDefaults = R"({
  "units": "mm,MPa,kPa,N,s",
  "out": "out",
  "jobs": 1,
  "seed": 1,
  "material": {
    "family": "gent",
    "parameters": {"mu": 0.1, "jm": 100.0},
    "fit_report": ""
  },
  "membrane": {"radius_mm": 21.0, "thickness_mm": 0.6, "layers": 3, "infill": "lines"},
  "simulate": {
    "mode": "cap",
    "curve_points": 400,
    "theta_max_rad": 0.0,
    "scan_samples": 2048,
    "thickness_factor": 2.0,
    "sphere_stretch_max": 10.0,
    "source": {
      "enabled": true,
      "supply_factor": 1.5,
      "supply_kpa": 0.0,
      "flow_coefficient": 60000.0,
      "duration_s": 8.0,
      "dt_s": 0.001,
      "valve_open_s": 0.5
    }
  },
  "print": {
    "diameter_mm": 42.0,
    "layers": 3,
    "layer_height_mm": 0.2,
    "line_width_mm": 0.4,
    "infill": "lines",
    "perimeter_loops": 1,
    "extrusion_multiplier": null,
    "tool": 0,
    "print_speed_mm_s": 20.0,
    "travel_speed_mm_s": 80.0,
    "first_angle_deg": 0.0,
    "angle_step_deg": 90.0,
    "chordal_tol_mm": 0.01
  },
  "dogbone": {
    "outline": "",
    "layers": 10,
    "layer_height_mm": 0.2,
    "line_width_mm": 0.4,
    "perimeter_loops": 1,
    "infill_angle_deg": 45.0,
    "angle_step_deg": 90.0,
    "multiplier": 1.0,
    "print_speed_mm_s": 20.0,
    "travel_speed_mm_s": 80.0,
    "tool": 0
  },
  "rings": {
    "bands": [
      {"inner_radius_mm": 0.0, "outer_radius_mm": 8.0, "tool": 0},
      {"inner_radius_mm": 8.0, "outer_radius_mm": 12.0, "tool": 1}
    ],
    "layers": 4,
    "layer_height_mm": 0.2,
    "line_width_mm": 0.4,
    "multiplier": 1.0,
    "print_speed_mm_s": 20.0,
    "travel_speed_mm_s": 80.0,
    "chordal_tol_mm": 0.01,
    "alternate_order": true
  },
  "printer_profile": "",
  "calibration": "",
  "check_airtight": false,
  "max_gap_mm": 0.0,
  "analysis": {
    "noise_window_s": 0.5,
    "onset_sigmas": 3.0,
    "recover_fraction": 0.1,
    "threshold_fraction": 0.5,
    "failure_fraction": 0.5,
    "reference_cycles": 10,
    "period_tolerance": 0.25,
    "period_s": 8.0,
    "plateau_window": 1.0
  }
})";

// Keys whose value is replaced wholesale and checked by a dedicated rule.
bool is_free_object(const std::string& path) { return path == "material.parameters"; }
bool is_band_list(const std::string& path) { return path == "rings.bands"; }
bool is_optional_number(const std::string& path) { return path == "print.extrusion_multiplier"; }

std::string type_name(const Json& j) {
  if (j.is_number_integer()) return "integer";
  if (j.is_number()) return "number";
  return j.type_name();
}

void check_bands(const Json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path + " must be a non-empty array");
  for (const auto& b : v) {
    if (!b.is_object()) throw ConfigError(path + " entries must be objects");
    for (const auto& [k, x] : b.items()) {
      if (k == "tool") {
        if (!x.is_number_integer()) throw ConfigError(path + ".tool must be an integer");
      } else if (k == "inner_radius_mm" || k == "outer_radius_mm") {
        if (!x.is_number()) throw ConfigError(path + "." + k + " must be a number");
      } else {
        throw ConfigError("unknown key '" + path + "." + k + "'");
      }
    }
    if (!b.contains("outer_radius_mm")) throw ConfigError(path + " entries need outer_radius_mm");
  }
}

void merge(Json& target, const Json& patch, const std::string& prefix) {
  if (!patch.is_object())
    throw ConfigError((prefix.empty() ? std::string("config") : prefix) + " must be an object");
  for (const auto& [key, v] : patch.items()) {
    const std::string path = prefix.empty() ? key : prefix + "." + key;
    if (!target.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    Json& t = target[key];
    if (is_free_object(path)) {
      if (!v.is_object()) throw ConfigError(path + " must be an object");
      for (const auto& [pk, pv] : v.items())
        if (!pv.is_number()) throw ConfigError(path + "." + pk + " must be a number");
      t = v;
    } else if (is_band_list(path)) {
      check_bands(v, path);
      Json bands = Json::array();
      for (const auto& b : v)
        bands.push_back({{"inner_radius_mm", b.value("inner_radius_mm", 0.0)},
                         {"outer_radius_mm", b["outer_radius_mm"]},
                         {"tool", b.value("tool", 0)}});
      t = bands;
    } else if (is_optional_number(path)) {
      if (!v.is_null() && !v.is_number()) throw ConfigError(path + " must be a number or null");
      t = v;
    } else if (t.is_object()) {
      merge(t, v, path);
    } else if (t.is_number_integer()) {
      if (!v.is_number_integer())
        throw ConfigError(path + " must be an integer, got " + type_name(v));
      t = v;
    } else if (t.is_number()) {
      if (!v.is_number()) throw ConfigError(path + " must be a number, got " + type_name(v));
      t = v.get<double>();
    } else if (t.is_boolean()) {
      if (!v.is_boolean()) throw ConfigError(path + " must be a boolean, got " + type_name(v));
      t = v;
    } else if (t.is_string()) {
      if (!v.is_string()) throw ConfigError(path + " must be a string, got " + type_name(v));
      t = v;
    } else {
      throw ConfigError("cannot set '" + path + "'");
    }
  }
}

Json nest(std::string_view dotted, const Json& value) {
  const auto dot = dotted.find('.');
  if (dot == std::string_view::npos) return Json{{std::string(dotted), value}};
  return Json{{std::string(dotted.substr(0, dot)), nest(dotted.substr(dot + 1), value)}};
}

void check_enums(const Json& root) {
  auto one_of = [&](const char* key, std::initializer_list<const char*> allowed) {
    const std::string v = root.at(Json::json_pointer(key)).get<std::string>();
    for (const char* a : allowed)
      if (v == a) return;
    throw ConfigError(std::string("config '") + key + "' has invalid value '" + v + "'");
  };
  one_of("/membrane/infill", {"lines", "concentric"});
  one_of("/print/infill", {"lines", "concentric"});
  one_of("/simulate/mode", {"cap", "sphere"});
  if (root["units"].get<std::string>() != "mm,MPa,kPa,N,s")
    throw ConfigError("units are fixed to 'mm,MPa,kPa,N,s'");
  if (root["jobs"].get<int>() < 1) throw ConfigError("jobs must be >= 1");
  if (root["seed"].get<long long>() < 0) throw ConfigError("seed must be >= 0");
}

}  // namespace

const Json& Config::defaults() {
  static const Json d = Json::parse(kDefaults);
  return d;
}

Config::Config() : root_(defaults()) {}

Config Config::from_json(const Json& user, std::filesystem::path base_dir) {
  Config c;
  merge(c.root_, user, "");
  check_enums(c.root_);
  c.base_dir_ = std::move(base_dir);
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  const std::string text = io::read_text(path);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

void Config::set_json(std::string_view dotted_key, const Json& value) {
  merge(root_, nest(dotted_key, value), "");
  check_enums(root_);
}

void Config::set(std::string_view dotted_key, std::string_view text) {
  Json v = Json::parse(text, nullptr, false);
  const Json& cur = at(dotted_key);
  if (v.is_discarded() || (v.is_structured() && !cur.is_structured())) v = std::string(text);
  // a flag value that looks numeric but targets a string key stays a string
  if (cur.is_string() && !v.is_string()) v = std::string(text);
  set_json(dotted_key, v);
}

const Json& Config::at(std::string_view dotted_key) const {
  std::string ptr = "/" + std::string(dotted_key);
  for (auto& ch : ptr)
    if (ch == '.') ch = '/';
  const Json::json_pointer p(ptr);
  if (!root_.contains(p)) throw ConfigError("unknown config key '" + std::string(dotted_key) + "'");
  return root_.at(p);
}

std::filesystem::path Config::path(std::string_view key) const {
  std::filesystem::path p = string(key);
  if (p.empty() || p.is_absolute() || base_dir_.empty()) return p;
  return base_dir_ / p;
}

}  // namespace tpekit::cli
