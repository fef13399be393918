#pragma once
// Lumped pressure source feeding a quasi-static membrane through a linear
// restriction:  dV/dt = C (P_supply - P_membrane(V)).
//
// The membrane pressure comes from inverting the cap volume V(theta). The
// valve stays closed (no flow) for the first valve_open_s seconds, which
// leaves a quiet baseline for noise estimation downstream.

#include <vector>

#include "tpekit/inflation/membrane.hpp"
#include "tpekit/traces.hpp"

namespace tpekit::inflation {

struct SourceCoupledOptions {
  double valve_open_s = 0.5;
  // Sub-step when |dV| exceeds this fraction of max(V, volume_floor).
  double relative_volume_step = 0.01;
  // volume_floor = this fraction of the hemisphere volume (2/3) pi a^3.
  double volume_floor_fraction = 1e-3;
  int max_substeps = 1 << 14;
};

struct SourceCoupledResult {
  PressureTrace trace;                 // membrane pressure, one sample per dt
  std::vector<InflationState> states;  // aligned with trace samples
  // C * integral (P_supply - P_membrane) dt over open-valve time, as integrated
  double delivered_volume_mm3 = 0.0;
  bool rupture_range_reached = false;  // volume exceeded the admissible cap
};

// Forward Euler with automatic sub-stepping. Throws ArgumentError unless
// supply >= 0, flow coefficient > 0, dt > 0 and duration >= dt.
SourceCoupledResult simulate_source_coupled(const MembraneSpec& spec, double supply_pressure_kpa,
                                            double flow_coefficient, double duration_s,
                                            double dt_s, const SourceCoupledOptions& options = {});

// Half-angle whose cap encloses `volume` (0 for volume <= 0). Throws
// DomainError when the volume exceeds the cap at theta_limit.
double theta_for_volume(double volume_mm3, double radius_a_mm, double theta_limit);

}  // namespace tpekit::inflation
