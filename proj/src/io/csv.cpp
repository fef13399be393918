#include "tpekit/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tpekit/error.hpp"

namespace tpekit::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const auto c = line.find(',', pos);
    out.push_back(trim(line.substr(pos, c == std::string_view::npos ? c : c - pos)));
    if (c == std::string_view::npos) break;
    pos = c + 1;
  }
  return out;
}

double parse_field(std::string_view f, std::size_t line) {
  if (!f.empty() && f.front() == '+') f.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || ptr != f.data() + f.size())
    throw ParseError(line, "not a number: '" + std::string(f) + "'");
  if (!std::isfinite(v)) throw ParseError(line, "non-finite value");
  return v;
}

void expect_header(const CsvTable& t, const std::vector<std::string>& want,
                   const std::filesystem::path& path) {
  if (t.header != want) {
    std::string w;
    for (const auto& h : want) w += (w.empty() ? "" : ",") + h;
    throw ParseError(1, path.string() + ": expected header '" + w + "'");
  }
}

}  // namespace

CsvTable parse_csv(std::string_view text) {
  CsvTable t;
  std::size_t line_no = 0, pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line.front() == '#') {
      t.comments.emplace_back(trim(line.substr(1)));
      continue;
    }
    const auto fields = split(line);
    if (!have_header) {
      for (auto f : fields) {
        if (f.empty()) throw ParseError(line_no, "empty column name");
        t.header.emplace_back(f);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != t.header.size())
      throw ParseError(line_no, "expected " + std::to_string(t.header.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    std::vector<double> row;
    for (auto f : fields) row.push_back(parse_field(f, line_no));
    t.rows.push_back(std::move(row));
    t.row_lines.push_back(line_no);
  }
  if (!have_header) throw ParseError(line_no == 0 ? 1 : line_no, "missing header row");
  return t;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path.string());
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return parse_csv(text);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.string() + ": " + e.detail());
  }
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : "nan";
}

std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out += (i ? "," : "") + format_number(r[i]);
    out += '\n';
  }
  return out;
}

material::StressStrainCurve read_stress_strain(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  expect_header(t, {"strain", "stress_mpa"}, path);
  std::vector<material::StrainStress> pts;
  for (const auto& r : t.rows) pts.push_back({r[0], r[1]});
  return material::StressStrainCurve(std::move(pts), path.stem().string(), path.string());
}

PressureTrace read_pressure_trace(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  expect_header(t, {"time_s", "pressure_kpa"}, path);
  std::vector<PressureSample> s;
  for (const auto& r : t.rows) s.push_back({r[0], r[1]});
  return PressureTrace(std::move(s));
}

ForceTrace read_force_trace(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  ForceAbscissa ax;
  if (t.header == std::vector<std::string>{"time_s", "force_n"})
    ax = ForceAbscissa::Time;
  else if (t.header == std::vector<std::string>{"displacement_mm", "force_n"})
    ax = ForceAbscissa::Displacement;
  else
    throw ParseError(1, path.string() + ": expected header 'time_s,force_n' or "
                                        "'displacement_mm,force_n'");
  std::vector<ForceSample> s;
  for (const auto& r : t.rows) s.push_back({r[0], r[1]});
  return ForceTrace(std::move(s), ax);
}

std::vector<analysis::Point> read_markers(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  expect_header(t, {"x_mm", "y_mm"}, path);
  std::vector<analysis::Point> pts;
  for (const auto& r : t.rows) pts.push_back({r[0], r[1]});
  return pts;
}

analysis::MembraneProfile read_profile(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  expect_header(t, {"x_mm", "y_mm"}, path);
  analysis::MembraneProfile prof;
  bool have_l0 = false;
  for (const auto& c : t.comments) {
    if (c.rfind("L0_mm=", 0) != 0) continue;
    prof.base_diameter_l0_mm = parse_field(trim(std::string_view(c).substr(6)), 1);
    have_l0 = true;
  }
  if (!have_l0) throw ParseError(1, path.string() + ": missing '# L0_mm=<v>' line");
  for (const auto& r : t.rows) prof.points.push_back({r[0], r[1]});
  prof.validate();
  return prof;
}

std::vector<analysis::ForcePressure> read_force_pressure(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  expect_header(t, {"force_n", "pressure_kpa"}, path);
  std::vector<analysis::ForcePressure> out;
  for (const auto& r : t.rows) out.push_back({r[0], r[1]});
  return out;
}

toolpath::CalibrationTable read_calibration(const std::filesystem::path& path) {
  const auto t = read_csv(path);
  expect_header(t, {"feedrate_mm_s", "flow_multiplier"}, path);
  std::vector<toolpath::CalibrationEntry> e;
  for (const auto& r : t.rows) e.push_back({r[0], r[1]});
  return toolpath::CalibrationTable(std::move(e));
}

std::string pressure_stretch_csv(const std::vector<inflation::InflationState>& states) {
  std::vector<std::vector<double>> rows;
  for (const auto& s : states)
    rows.push_back(
        {s.theta, s.stretch, s.pressure_kpa, s.current_thickness_mm, s.enclosed_volume_mm3});
  return to_csv({"theta_rad", "stretch", "pressure_kpa", "thickness_mm", "volume_mm3"}, rows);
}

std::string simulation_trace_csv(const PressureTrace& trace,
                                 const std::vector<inflation::InflationState>& states) {
  if (states.size() != trace.size())
    throw ArgumentError("trace and states differ in length");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < trace.size(); ++i)
    rows.push_back({trace[i].t_s, trace[i].p_kpa, states[i].stretch});
  return to_csv({"time_s", "pressure_kpa", "stretch"}, rows);
}

}  // namespace tpekit::io
