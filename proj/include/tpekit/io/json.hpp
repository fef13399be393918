#pragma once

#include <json.hpp>

#include "tpekit/material/fit.hpp"
#include "tpekit/toolpath/gcode.hpp"

namespace tpekit::io {

using Json = nlohmann::ordered_json;

// {family, parameters:{...}, rms_residual_mpa, max_residual_mpa, iterations, converged}
Json fit_result_json(const material::FitResult& fit);

// Unknown keys and wrong types raise ConfigError; absent keys take defaults.
toolpath::PrinterProfile printer_profile_from_json(const Json& j);
Json printer_profile_json(const toolpath::PrinterProfile& p);

// Two-space indent, trailing newline.
std::string dump(const Json& j);

}  // namespace tpekit::io
