#include "tpekit/toolpath/gcode.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

#include "tpekit/error.hpp"

namespace tpekit::toolpath {

CalibrationTable::CalibrationTable(std::vector<CalibrationEntry> entries)
    : entries_(std::move(entries)) {
  if (entries_.empty()) throw ConfigError("calibration table is empty");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    const auto& e = entries_[i];
    if (!std::isfinite(e.feedrate_mm_s)) throw ArgumentError("calibration feedrate must be finite");
    if (!(e.flow_multiplier > 0.0) || !std::isfinite(e.flow_multiplier))
      throw ArgumentError("calibration multipliers must be > 0");
    if (i > 0 && !(e.feedrate_mm_s > entries_[i - 1].feedrate_mm_s))
      throw ArgumentError("calibration feedrates must strictly increase");
  }
}

double CalibrationTable::factor(double f) const {
  if (entries_.empty()) throw ConfigError("calibration table is empty");
  if (f <= entries_.front().feedrate_mm_s) return entries_.front().flow_multiplier;
  if (f >= entries_.back().feedrate_mm_s) return entries_.back().flow_multiplier;
  const auto hi = std::upper_bound(entries_.begin(), entries_.end(), f,
                                   [](double v, const CalibrationEntry& e) {
                                     return v < e.feedrate_mm_s;
                                   });
  const auto lo = hi - 1;
  const double u = (f - lo->feedrate_mm_s) / (hi->feedrate_mm_s - lo->feedrate_mm_s);
  return lo->flow_multiplier + u * (hi->flow_multiplier - lo->flow_multiplier);
}

double extrusion_amount(double length, double width, double layer_height, double multiplier,
                        const CalibrationTable& calibration, double feedrate) {
  if (calibration.empty()) throw ConfigError("calibration table is empty");
  if (!(length >= 0.0) || !(width > 0.0) || !(layer_height > 0.0) || !(multiplier > 0.0) ||
      !(feedrate > 0.0))
    throw ArgumentError("extrusion inputs must be positive");
  return length * width * layer_height * multiplier * calibration.factor(feedrate);
}

const GCodeParam* GCodeCommand::param(char letter) const noexcept {
  for (const auto& p : params)
    if (p.letter == letter) return &p;
  return nullptr;
}

bool same_commands(const GCodeProgram& a, const GCodeProgram& b) {
  if (a.commands.size() != b.commands.size()) return false;
  for (std::size_t i = 0; i < a.commands.size(); ++i) {
    const auto& x = a.commands[i];
    const auto& y = b.commands[i];
    if (x.code != y.code || x.params.size() != y.params.size()) return false;
    for (std::size_t k = 0; k < x.params.size(); ++k) {
      const auto& p = x.params[k];
      const auto& q = y.params[k];
      if (p.letter != q.letter || p.has_value != q.has_value ||
          (p.has_value && p.value != q.value))
        return false;
    }
  }
  return true;
}

namespace {

void append_number(std::string& out, char letter, double v) {
  char buf[64];
  if (letter == 'T' && v == std::floor(v) && std::abs(v) < 1e15) {
    std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
  } else {
    std::snprintf(buf, sizeof buf, "%.5f", v);
    if (std::string_view(buf) == "-0.00000") std::snprintf(buf, sizeof buf, "0.00000");
  }
  out += buf;
}

GCodeCommand cmd(std::string code, std::vector<GCodeParam> params = {}) {
  return {std::move(code), std::move(params), 0};
}

}  // namespace

std::string serialize(const GCodeProgram& program) {
  std::string out;
  for (const auto& c : program.commands) {
    out += c.code;
    for (const auto& p : c.params) {
      out += ' ';
      out += p.letter;
      if (p.has_value) append_number(out, p.letter, p.value);
    }
    out += '\n';
  }
  return out;
}

GCodeProgram emit_gcode(const Toolpath& path, const PrinterProfile& profile,
                        const CalibrationTable& calibration) {
  std::set<int> used;
  for (const auto& m : path.moves()) used.insert(m.tool);
  std::vector<ToolTemperature> temps;
  for (int t : used) {
    auto it = std::find_if(profile.tools.begin(), profile.tools.end(),
                           [t](const ToolTemperature& tt) { return tt.index == t; });
    if (it == profile.tools.end())
      throw ConfigError("printer profile has no tool " + std::to_string(t));
    temps.push_back(*it);
  }

  GCodeProgram prog;
  auto& out = prog.commands;
  out.push_back(cmd("G21"));
  out.push_back(cmd("G90"));
  out.push_back(cmd("M83"));
  for (const auto& t : temps)
    out.push_back(cmd("M104", {{'S', t.nozzle_temp_c}, {'T', double(t.index)}}));
  for (const auto& t : temps)
    out.push_back(cmd("M109", {{'S', t.nozzle_temp_c}, {'T', double(t.index)}}));

  const auto& moves = path.moves();
  int tool = -1;
  bool have_pos = false;
  Vec3 pos;
  for (std::size_t i = 0; i < moves.size(); ++i) {
    const Move& m = moves[i];
    if (m.tool != tool) {
      out.push_back(cmd("T" + std::to_string(m.tool)));
      tool = m.tool;
    }
    const bool same_xy = have_pos && m.end.x == pos.x && m.end.y == pos.y;
    const bool same_z = have_pos && m.end.z == pos.z;
    if (m.kind == MoveKind::Travel && same_xy && same_z) continue;

    GCodeCommand c = cmd(m.kind == MoveKind::Travel ? "G0" : "G1");
    c.params.push_back({'X', m.end.x + profile.bed_center_x_mm});
    c.params.push_back({'Y', m.end.y + profile.bed_center_y_mm});
    if (!same_z) c.params.push_back({'Z', m.end.z});
    if (m.kind == MoveKind::Extrude) {
      double e = extrusion_amount(m.length(), m.width_mm, m.layer_height_mm, m.multiplier,
                                  calibration, m.feedrate_mm_s);
      const bool run_start = i == 0 || moves[i - 1].kind != MoveKind::Extrude ||
                             moves[i - 1].tool != m.tool;
      const bool run_end = i + 1 == moves.size() || moves[i + 1].kind != MoveKind::Extrude ||
                           moves[i + 1].tool != m.tool;
      if (run_start) e += profile.prime_e_mm3;
      if (run_end) e -= profile.retract_e_mm3;
      c.params.push_back({'E', e});
    }
    c.params.push_back({'F', m.feedrate_mm_s * 60.0});
    out.push_back(std::move(c));
    pos = m.end;
    have_pos = true;
  }

  for (const auto& t : temps) out.push_back(cmd("M104", {{'S', 0.0}, {'T', double(t.index)}}));
  out.push_back(cmd("M84"));
  return prog;
}

namespace {

bool parse_number(std::string_view s, double& v) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const char c0 = s.front() == '-' && s.size() > 1 ? s[1] : s.front();
  if (!(std::isdigit(static_cast<unsigned char>(c0)) || c0 == '.')) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size() && std::isfinite(v);
}

}  // namespace

GCodeProgram parse_gcode(std::string_view text) {
  GCodeProgram prog;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const auto sc = line.find(';'); sc != std::string_view::npos) line = line.substr(0, sc);

    std::vector<std::string_view> words;
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      const std::size_t j = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      if (i > j) words.push_back(line.substr(j, i - j));
    }
    if (words.empty()) continue;

    GCodeCommand c;
    c.line_no = line_no;
    const auto head = words[0];
    double code_num = 0.0;
    if (!std::isalpha(static_cast<unsigned char>(head[0])) || !parse_number(head.substr(1), code_num))
      throw ParseError(line_no, "malformed command word '" + std::string(head) + "'");
    c.code = std::string(head);
    c.code[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(c.code[0])));
    for (std::size_t k = 1; k < words.size(); ++k) {
      const auto w = words[k];
      if (!std::isalpha(static_cast<unsigned char>(w[0])))
        throw ParseError(line_no, "malformed parameter '" + std::string(w) + "'");
      GCodeParam p;
      p.letter = static_cast<char>(std::toupper(static_cast<unsigned char>(w[0])));
      if (w.size() == 1) {
        p.has_value = false;
      } else if (!parse_number(w.substr(1), p.value)) {
        throw ParseError(line_no, "malformed parameter '" + std::string(w) + "'");
      }
      c.params.push_back(p);
    }
    if (c.code == "G1" && c.param('E') && !c.param('X') && !c.param('Y'))
      throw ParseError(line_no, "G1 with E must also move in X or Y");
    prog.commands.push_back(std::move(c));
  }
  return prog;
}

double total_extrusion(const GCodeProgram& program) {
  double e = 0.0;
  for (const auto& c : program.commands)
    if (c.code == "G1")
      if (const auto* p = c.param('E'); p && p->has_value) e += p->value;
  return e;
}

std::size_t count_tool_changes(const GCodeProgram& program) {
  return std::count_if(program.commands.begin(), program.commands.end(),
                       [](const GCodeCommand& c) { return !c.code.empty() && c.code[0] == 'T'; });
}

}  // namespace tpekit::toolpath
