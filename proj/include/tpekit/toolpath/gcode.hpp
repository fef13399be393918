#pragma once
// Marlin-style G-code: absolute XYZ (G90), millimetres (G21), relative
// volumetric extrusion (M83, E in mm^3).

#include <string>
#include <string_view>
#include <vector>

#include "tpekit/toolpath/path.hpp"

namespace tpekit::toolpath {

struct CalibrationEntry {
  double feedrate_mm_s = 0.0;
  double flow_multiplier = 1.0;
};

// Feedrate -> flow multiplier, piecewise linear, clamped at both ends.
class CalibrationTable {
 public:
  CalibrationTable() = default;
  // Throws ConfigError when empty, ArgumentError when feedrates do not
  // strictly increase or a multiplier is not > 0.
  explicit CalibrationTable(std::vector<CalibrationEntry> entries);

  static CalibrationTable identity() { return CalibrationTable({{1.0, 1.0}}); }

  const std::vector<CalibrationEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }
  double factor(double feedrate_mm_s) const;

 private:
  std::vector<CalibrationEntry> entries_;
};

// length * width * layer_height * multiplier * calibration(feedrate), mm^3.
double extrusion_amount(double move_length_mm, double width_mm, double layer_height_mm,
                        double multiplier, const CalibrationTable& calibration,
                        double feedrate_mm_s);

struct ToolTemperature {
  int index = 0;
  double nozzle_temp_c = 200.0;
};

struct PrinterProfile {
  double bed_center_x_mm = 0.0;
  double bed_center_y_mm = 0.0;
  std::string steps_note;
  std::vector<ToolTemperature> tools{{0, 200.0}};
  double prime_e_mm3 = 0.0;    // added to the first extrude of each run
  double retract_e_mm3 = 0.0;  // taken from the last extrude of each run
  double chordal_tol_mm = 0.01;
};

struct GCodeParam {
  char letter = 0;
  double value = 0.0;
  bool has_value = true;
};

struct GCodeCommand {
  std::string code;  // "G1", "M104", "T1", ...
  std::vector<GCodeParam> params;
  std::size_t line_no = 0;

  // First parameter with this letter, or nullptr.
  const GCodeParam* param(char letter) const noexcept;
};

struct GCodeProgram {
  std::vector<GCodeCommand> commands;
};

// Command-level equality: codes and parameters, ignoring line numbers.
bool same_commands(const GCodeProgram& a, const GCodeProgram& b);

// One command per line, parameters in stored order, values with 5 decimals
// (tool indices as integers), '\n' line ends including the last line.
std::string serialize(const GCodeProgram& program);

// Throws ConfigError when the path uses a tool missing from the profile.
GCodeProgram emit_gcode(const Toolpath& path, const PrinterProfile& profile,
                        const CalibrationTable& calibration = CalibrationTable::identity());

// Accepts the emitted dialect plus ';' comments, blank lines and unknown
// codes (kept as opaque commands). Throws ParseError with the 1-based line.
GCodeProgram parse_gcode(std::string_view text);

// Sum of E over G1 commands.
double total_extrusion(const GCodeProgram& program);
std::size_t count_tool_changes(const GCodeProgram& program);

}  // namespace tpekit::toolpath
