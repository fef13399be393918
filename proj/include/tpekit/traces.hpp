#pragma once
// Time series shared by the inflation solver (which produces them) and the
// experiment analysis (which consumes them).

#include <optional>
#include <vector>

namespace tpekit {

struct PressureSample {
  double t_s = 0.0;
  double p_kpa = 0.0;
};

// Time strictly increasing, pressures finite.
class PressureTrace {
 public:
  PressureTrace() = default;
  explicit PressureTrace(std::vector<PressureSample> samples,
                         std::optional<double> sample_rate_hint_hz = std::nullopt);

  const std::vector<PressureSample>& samples() const noexcept { return samples_; }
  std::optional<double> sample_rate_hint_hz() const noexcept { return rate_hint_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }
  const PressureSample& operator[](std::size_t i) const { return samples_[i]; }

  // Appends one sample; throws ArgumentError when it breaks the invariants.
  void push_back(PressureSample s);

 private:
  std::vector<PressureSample> samples_;
  std::optional<double> rate_hint_;
};

enum class ForceAbscissa { Time, Displacement };

struct ForceSample {
  double x = 0.0;  // s or mm, see ForceTrace::abscissa()
  double f_n = 0.0;
};

// Abscissa strictly increasing, forces finite.
class ForceTrace {
 public:
  ForceTrace() = default;
  ForceTrace(std::vector<ForceSample> samples, ForceAbscissa abscissa);

  const std::vector<ForceSample>& samples() const noexcept { return samples_; }
  ForceAbscissa abscissa() const noexcept { return abscissa_; }
  std::size_t size() const noexcept { return samples_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

 private:
  std::vector<ForceSample> samples_;
  ForceAbscissa abscissa_ = ForceAbscissa::Time;
};

}  // namespace tpekit
