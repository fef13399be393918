#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tpekit/cli/config.hpp"

namespace tpekit::cli {

struct Outcome {
  int code = 0;
  io::Json summary = io::Json::object();  // printed as the stdout line
  std::vector<std::string> warnings;      // printed to stderr
};

namespace fs = std::filesystem;

Outcome cmd_fit(const Config& cfg, const fs::path& curve_csv, const fs::path& out);
Outcome cmd_simulate(const Config& cfg, const fs::path& out);
// target: "membrane", "dogbone", "rings", or a polygon outline CSV (x_mm,y_mm)
Outcome cmd_slice(const Config& cfg, const std::string& target, const fs::path& out);
Outcome cmd_analyze(const Config& cfg, const std::string& kind, const std::vector<fs::path>& inputs,
                    const fs::path& out);
Outcome cmd_report(const Config& cfg, const fs::path& manifest, const fs::path& out);
Outcome cmd_demo(const Config& cfg, const fs::path& out);

}  // namespace tpekit::cli
