#pragma once

#include <vector>

#include "tpekit/traces.hpp"

namespace tpekit::analysis {

struct Plateau {
  double mean_n = 0.0;
  double sd_n = 0.0;
  double start = 0.0;  // abscissa of the chosen window
  double end = 0.0;
};

// Mean force over the minimum-variance window of the given width (same units
// as the abscissa). Throws ArgumentError when the trace is shorter than the
// window.
Plateau plateau_force(const ForceTrace& trace, double window);

struct AdhesionPeak {
  double pull_off_force_n = 0.0;
  double at = 0.0;
};

// Largest force and its first abscissa. ArgumentError when empty.
AdhesionPeak adhesion_peak(const ForceTrace& trace);

struct ForcePressure {
  double force_n = 0.0;
  double pressure_kpa = 0.0;
};

struct Hysteresis {
  double max_gap_kpa = 0.0;
  double normalized = 0.0;  // max gap over the pressure span of both branches
  double at_force_n = 0.0;
  double overlap_lo_n = 0.0;
  double overlap_hi_n = 0.0;
};

// Both branches are sorted by force (order does not matter; repeated forces
// are averaged) and compared by linear interpolation on every breakpoint of
// their overlap, which finds the exact maximum. RangeError without overlap.
Hysteresis sensor_hysteresis(const std::vector<ForcePressure>& loading,
                             const std::vector<ForcePressure>& unloading);

}  // namespace tpekit::analysis
