#pragma once
// Inflation events in pressure logs: the four-phase ballooning signature and
// the per-group ballooning/rupture summary.

#include <optional>
#include <string>
#include <vector>

#include "tpekit/traces.hpp"

namespace tpekit::analysis {

struct PhaseMarks {
  std::size_t i_open = 0;
  std::size_t ii_peak = 0;
  std::size_t iii_trough = 0;
  std::size_t iv_recover = 0;
};

struct PhaseOptions {
  double noise_window_s = 0.5;    // leading span assumed quiet
  double onset_sigmas = 3.0;      // slope threshold in noise standard deviations
  double recover_fraction = 0.1;  // iv: p >= p[ii] - fraction * (p[ii] - p[iii])
};

enum class PhaseStatus {
  Complete,       // all four marks
  NoRecovery,     // a dip exists but pressure never climbs back (iv unset)
  NoSignature,    // monotone or featureless trace
};

struct PhaseResult {
  PhaseStatus status = PhaseStatus::NoSignature;
  PhaseMarks marks;  // valid up to iii for NoRecovery, meaningless for NoSignature
  double noise_sigma_kpa = 0.0;
  bool has_signature() const noexcept { return status == PhaseStatus::Complete; }
};

// Onset i: first index whose centred 5-sample slope exceeds the baseline slope
// mean + onset_sigmas * its standard deviation. ii: first local maximum after
// i followed by a drop larger than the noise. iii: minimum of that drop.
// Needs at least 5 samples (ArgumentError otherwise).
PhaseResult detect_inflation_phases(const PressureTrace& trace, const PhaseOptions& options = {});

std::string phase_status_name(PhaseStatus s);

enum class MembraneEvent { Ballooned, Ruptured };

struct LabelledTrace {
  std::string label;
  double thickness_mm = 0.0;
  std::string infill;
  MembraneEvent event = MembraneEvent::Ballooned;
  PressureTrace trace;
};

struct TraceEvent {
  std::string label;
  double thickness_mm = 0.0;
  std::string infill;
  MembraneEvent event = MembraneEvent::Ballooned;
  // Ballooned: pressure at mark ii and at mark iii. Ruptured: peak pressure in
  // both. When no signature is found the peak pressure stands in.
  double p_at_peak_kpa = 0.0;
  double p_at_trough_kpa = 0.0;
  bool signature_found = false;
};

struct Stats {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample standard deviation, 0 for n < 2
};

Stats mean_sd(const std::vector<double>& v);

struct GroupSummary {
  double thickness_mm = 0.0;
  std::string infill;
  std::optional<Stats> ballooning_at_peak;
  std::optional<Stats> ballooning_at_trough;
  std::optional<Stats> rupture;
  std::optional<double> margin_kpa;  // mean rupture - mean ballooning (at peak)
  bool positive_margin = false;
};

struct BallooningReport {
  std::vector<TraceEvent> events;
  std::vector<GroupSummary> groups;  // sorted by infill, then thickness
  // Per infill: ballooning means strictly increase with thickness (needs at
  // least two thicknesses).
  std::vector<std::pair<std::string, bool>> monotone_in_thickness;
  std::vector<std::string> warnings;
};

BallooningReport ballooning_rupture_report(const std::vector<LabelledTrace>& traces,
                                           const PhaseOptions& options = {});

}  // namespace tpekit::analysis
