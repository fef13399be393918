#include "tpekit/traces.hpp"

#include <cmath>
#include <string>

#include "tpekit/error.hpp"

namespace tpekit {

PressureTrace::PressureTrace(std::vector<PressureSample> samples,
                             std::optional<double> sample_rate_hint_hz)
    : rate_hint_(sample_rate_hint_hz) {
  samples_.reserve(samples.size());
  for (const auto& s : samples) push_back(s);
}

void PressureTrace::push_back(PressureSample s) {
  if (!std::isfinite(s.t_s) || !std::isfinite(s.p_kpa))
    throw ArgumentError("pressure sample " + std::to_string(samples_.size()) + " is not finite");
  if (!samples_.empty() && !(s.t_s > samples_.back().t_s))
    throw ArgumentError("pressure trace time must be strictly increasing (sample " +
                        std::to_string(samples_.size()) + ")");
  samples_.push_back(s);
}

ForceTrace::ForceTrace(std::vector<ForceSample> samples, ForceAbscissa abscissa)
    : samples_(std::move(samples)), abscissa_(abscissa) {
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i].x) || !std::isfinite(samples_[i].f_n))
      throw ArgumentError("force sample " + std::to_string(i) + " is not finite");
    if (i > 0 && !(samples_[i].x > samples_[i - 1].x))
      throw ArgumentError("force trace abscissa must be strictly increasing (sample " +
                          std::to_string(i) + ")");
  }
}

}  // namespace tpekit
