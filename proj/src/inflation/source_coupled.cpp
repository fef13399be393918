#include "tpekit/inflation/source_coupled.hpp"

#include <cmath>
#include <numbers>

#include "tpekit/error.hpp"

namespace tpekit::inflation {

double theta_for_volume(double volume, double a, double theta_limit) {
  if (!(volume > 0.0)) return 0.0;
  if (volume > cap_volume(theta_limit, a))
    throw DomainError("volume exceeds the admissible cap range");
  double lo = 0.0, hi = theta_limit;
  for (int i = 0; i < 200 && hi - lo > 4e-16 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (cap_volume(mid, a) < volume ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

InflationState state_at_volume(const MembraneSpec& spec, double volume, double theta_limit) {
  const double theta = theta_for_volume(volume, spec.radius_a_mm, theta_limit);
  if (theta > 0.0) return inflation_state(spec, theta);
  InflationState flat;
  flat.current_thickness_mm = spec.thickness_t0_mm;
  return flat;
}

}  // namespace

SourceCoupledResult simulate_source_coupled(const MembraneSpec& spec, double supply,
                                            double flow_coefficient, double duration, double dt,
                                            const SourceCoupledOptions& options) {
  spec.validate();
  if (!(supply >= 0.0) || !std::isfinite(supply))
    throw ArgumentError("supply pressure must be >= 0");
  if (!(flow_coefficient > 0.0)) throw ArgumentError("flow coefficient must be > 0");
  if (!(dt > 0.0)) throw ArgumentError("time step must be > 0");
  if (!(duration >= dt)) throw ArgumentError("duration must be >= time step");

  const double a = spec.radius_a_mm;
  const double theta_limit = admissible_theta_limit(spec);
  const double v_max = cap_volume(theta_limit, a);
  const double v_floor =
      options.volume_floor_fraction * (2.0 / 3.0) * std::numbers::pi * a * a * a;
  const double h_min = dt / options.max_substeps;
  const auto steps = static_cast<long>(std::floor(duration / dt + 1e-9));

  SourceCoupledResult out;
  double volume = 0.0;
  InflationState state = state_at_volume(spec, 0.0, theta_limit);
  out.trace.push_back({0.0, state.pressure_kpa});
  out.states.push_back(state);

  double t = 0.0;
  for (long k = 1; k <= steps && !out.rupture_range_reached; ++k) {
    const double t_end = static_cast<double>(k) * dt;
    while (t < t_end && !out.rupture_range_reached) {
      double h = t_end - t;
      const bool open = t >= options.valve_open_s - 1e-12;
      if (!open && t + h > options.valve_open_s) h = options.valve_open_s - t;
      if (!open || (supply == 0.0 && state.pressure_kpa == 0.0)) {
        t += h;
        continue;
      }
      for (;;) {
        const double flow = flow_coefficient * (supply - state.pressure_kpa);
        const double dv = flow * h;
        const double next_volume = volume + dv;
        if (next_volume > v_max) {
          if (h > h_min) {
            h *= 0.5;
            continue;
          }
          out.rupture_range_reached = true;
          break;
        }
        const InflationState next = state_at_volume(spec, next_volume, theta_limit);
        const bool too_big = std::abs(dv) > options.relative_volume_step * std::max(volume, v_floor);
        const bool overshoot =
            (supply - next.pressure_kpa) * (supply - state.pressure_kpa) < 0.0;
        if ((too_big || overshoot) && h > h_min) {
          h *= 0.5;
          continue;
        }
        volume = next_volume;
        state = next;
        out.delivered_volume_mm3 += dv;
        t += h;
        break;
      }
    }
    if (out.rupture_range_reached) break;
    t = t_end;
    out.trace.push_back({t_end, state.pressure_kpa});
    out.states.push_back(state);
  }
  return out;
}

}  // namespace tpekit::inflation
