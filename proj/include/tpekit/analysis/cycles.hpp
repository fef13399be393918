#pragma once
// Cyclic inflation logs: per-cycle peaks, the failure cycle, and the
// exponential decay of peak pressure before failure.

#include <optional>
#include <vector>

#include "tpekit/traces.hpp"

namespace tpekit::analysis {

struct Cycle {
  int index = 0;  // 1-based, consecutive
  double start_t_s = 0.0;
  double peak_p_kpa = 0.0;
  double baseline_p_kpa = 0.0;
};

struct DecayParams {
  double amplitude_kpa = 0.0;
  double rate_per_cycle = 0.0;
  double offset_kpa = 0.0;
};

struct CycleStats {
  std::vector<Cycle> cycles;
  std::optional<int> failure_cycle;
  std::optional<DecayParams> decay;
  double baseline_kpa = 0.0;        // trace baseline used for amplitudes
  double median_amplitude_kpa = 0.0;
};

struct CycleOptions {
  double threshold_fraction = 0.5;  // of the median peak amplitude, above baseline
  double failure_fraction = 0.5;    // of the median amplitude of the reference cycles
  int reference_cycles = 10;
  double period_tolerance = 0.25;   // crossings snapped to period_hint * (1 +- this)
};

// Cycle starts are rising threshold crossings at least (1 - tol) periods
// apart; gaps longer than (1 + tol) periods (cycles that never reached the
// threshold) are filled with starts every period_hint. Amplitudes are
// measured from the trace baseline (its 5th percentile), so a constant
// pressure offset changes nothing. Throws AnalysisError for fewer than 2
// cycles, ArgumentError for a non-positive period.
CycleStats segment_cycles(const PressureTrace& trace, double period_hint_s,
                          const CycleOptions& options = {});

struct DecayFit {
  bool converged = false;
  std::optional<DecayParams> params;
  double rms_residual_kpa = 0.0;
};

// Least squares peak(k) = offset + amplitude exp(-rate k), rate >= 0, over
// the cycles before failure (k = cycle index). Needs at least 10 cycles
// (ArgumentError).
DecayFit fit_peak_decay(const CycleStats& stats);

}  // namespace tpekit::analysis
