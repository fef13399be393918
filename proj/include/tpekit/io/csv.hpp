#pragma once
// Plain CSV with a header row, '.' decimals and '#' comment lines.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tpekit/analysis/forces.hpp"
#include "tpekit/analysis/geometry.hpp"
#include "tpekit/inflation/membrane.hpp"
#include "tpekit/material/curve.hpp"
#include "tpekit/toolpath/gcode.hpp"
#include "tpekit/traces.hpp"

namespace tpekit::io {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;  // 1-based source line of each row
  std::vector<std::string> comments;   // text after '#', leading blanks trimmed
};

// Every data row must have as many numeric fields as the header.
// Throws ParseError with the line number.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

// Throws IoError when the file cannot be read or written.
std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, std::string_view text);

// Round-trip-exact formatting (shortest representation).
std::string format_number(double v);
std::string to_csv(const std::vector<std::string>& header,
                   const std::vector<std::vector<double>>& rows);

// Typed readers check the header and build the domain type, so invariant
// violations surface as ArgumentError.
material::StressStrainCurve read_stress_strain(const std::filesystem::path& path);
PressureTrace read_pressure_trace(const std::filesystem::path& path);
ForceTrace read_force_trace(const std::filesystem::path& path);
// `x_mm,y_mm` plus a `# L0_mm=<v>` comment.
analysis::MembraneProfile read_profile(const std::filesystem::path& path);
// `x_mm,y_mm`, no metadata.
std::vector<analysis::Point> read_markers(const std::filesystem::path& path);
// `force_n,pressure_kpa`.
std::vector<analysis::ForcePressure> read_force_pressure(const std::filesystem::path& path);
toolpath::CalibrationTable read_calibration(const std::filesystem::path& path);

std::string pressure_stretch_csv(const std::vector<inflation::InflationState>& states);
std::string simulation_trace_csv(const PressureTrace& trace,
                                 const std::vector<inflation::InflationState>& states);

}  // namespace tpekit::io
