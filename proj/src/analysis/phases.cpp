#include "tpekit/analysis/phases.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tpekit/error.hpp"

namespace tpekit::analysis {

namespace {

Stats stats_of(const std::vector<double>& v) {
  Stats s;
  s.n = v.size();
  if (v.empty()) return s;
  double sum = 0.0;
  for (double x : v) sum += x;
  s.mean = sum / v.size();
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (v.size() - 1));
  }
  return s;
}

}  // namespace

Stats mean_sd(const std::vector<double>& v) { return stats_of(v); }

std::string phase_status_name(PhaseStatus s) {
  switch (s) {
    case PhaseStatus::Complete: return "complete";
    case PhaseStatus::NoRecovery: return "no_recovery";
    case PhaseStatus::NoSignature: return "no_ballooning_signature";
  }
  return "unknown";
}

PhaseResult detect_inflation_phases(const PressureTrace& trace, const PhaseOptions& opt) {
  const auto& s = trace.samples();
  const std::size_t n = s.size();
  if (n < 5) throw ArgumentError("phase detection needs at least 5 samples");
  if (!(opt.noise_window_s >= 0.0) || !(opt.onset_sigmas >= 0.0) ||
      !(opt.recover_fraction >= 0.0 && opt.recover_fraction < 1.0))
    throw ArgumentError("invalid phase detection options");

  auto slope = [&](std::size_t k) {
    return (s[k + 2].p_kpa - s[k - 2].p_kpa) / (s[k + 2].t_s - s[k - 2].t_s);
  };
  const double t_quiet = s.front().t_s + opt.noise_window_s;
  std::vector<double> base_slopes, base_p;
  for (std::size_t k = 0; k < n && s[k].t_s <= t_quiet; ++k) {
    base_p.push_back(s[k].p_kpa);
    if (k >= 2 && k + 2 < n) base_slopes.push_back(slope(k));
  }
  if (base_slopes.empty()) base_slopes.push_back(slope(2));
  const Stats bs = stats_of(base_slopes);
  const Stats bp = stats_of(base_p);

  double p_min = s[0].p_kpa, p_max = s[0].p_kpa;
  for (const auto& x : s) {
    p_min = std::min(p_min, x.p_kpa);
    p_max = std::max(p_max, x.p_kpa);
  }
  const double range = p_max - p_min;
  const double duration = s.back().t_s - s.front().t_s;
  const double threshold = bs.mean + std::max(opt.onset_sigmas * bs.sd, 1e-9 * range / duration);
  // a dip must exceed what the baseline noise can produce
  const double drop_min = std::max(opt.onset_sigmas * std::sqrt(2.0) * bp.sd, 1e-6 * range);

  PhaseResult r;
  r.noise_sigma_kpa = bp.sd;
  std::size_t i_open = n;
  for (std::size_t k = 2; k + 2 < n; ++k)
    if (slope(k) > threshold) {
      i_open = k;
      break;
    }
  if (i_open == n) return r;

  for (std::size_t c = i_open + 1; c + 1 < n; ++c) {
    if (!(s[c].p_kpa > s[c + 1].p_kpa && s[c].p_kpa >= s[c - 1].p_kpa)) continue;
    std::size_t jm = c + 1;
    for (std::size_t j = c + 1; j < n; ++j) {
      if (s[j].p_kpa < s[jm].p_kpa) jm = j;
      if (s[j].p_kpa > s[jm].p_kpa + drop_min) break;
    }
    if (s[c].p_kpa - s[jm].p_kpa <= drop_min) continue;

    r.marks.i_open = i_open;
    r.marks.ii_peak = c;
    r.marks.iii_trough = jm;
    const double target =
        s[c].p_kpa - opt.recover_fraction * (s[c].p_kpa - s[jm].p_kpa);
    for (std::size_t k = jm + 1; k < n; ++k)
      if (s[k].p_kpa >= target) {
        r.marks.iv_recover = k;
        r.status = PhaseStatus::Complete;
        return r;
      }
    r.status = PhaseStatus::NoRecovery;
    return r;
  }
  return r;
}

BallooningReport ballooning_rupture_report(const std::vector<LabelledTrace>& traces,
                                           const PhaseOptions& options) {
  BallooningReport rep;
  using Key = std::pair<std::string, double>;
  struct Acc {
    std::vector<double> peak, trough, rupture;
  };
  std::map<Key, Acc> groups;

  for (const auto& lt : traces) {
    if (lt.trace.empty()) {
      rep.warnings.push_back("trace '" + lt.label + "' is empty; skipped");
      continue;
    }
    TraceEvent ev{lt.label, lt.thickness_mm, lt.infill, lt.event, 0.0, 0.0, false};
    double p_peak = lt.trace[0].p_kpa;
    for (const auto& x : lt.trace.samples()) p_peak = std::max(p_peak, x.p_kpa);
    ev.p_at_peak_kpa = ev.p_at_trough_kpa = p_peak;
    if (lt.event == MembraneEvent::Ballooned) {
      const auto ph = lt.trace.size() >= 5 ? detect_inflation_phases(lt.trace, options)
                                           : PhaseResult{};
      if (ph.status != PhaseStatus::NoSignature) {
        ev.p_at_peak_kpa = lt.trace[ph.marks.ii_peak].p_kpa;
        ev.p_at_trough_kpa = lt.trace[ph.marks.iii_trough].p_kpa;
        ev.signature_found = true;
      } else {
        rep.warnings.push_back("trace '" + lt.label +
                               "' shows no ballooning signature; using its peak pressure");
      }
    } else {
      ev.signature_found = true;
    }
    auto& acc = groups[{lt.infill, lt.thickness_mm}];
    if (lt.event == MembraneEvent::Ballooned) {
      acc.peak.push_back(ev.p_at_peak_kpa);
      acc.trough.push_back(ev.p_at_trough_kpa);
    } else {
      acc.rupture.push_back(ev.p_at_peak_kpa);
    }
    rep.events.push_back(std::move(ev));
  }

  std::map<std::string, std::vector<std::pair<double, double>>> by_infill;
  for (const auto& [key, acc] : groups) {
    GroupSummary g;
    g.infill = key.first;
    g.thickness_mm = key.second;
    if (!acc.peak.empty()) {
      g.ballooning_at_peak = stats_of(acc.peak);
      g.ballooning_at_trough = stats_of(acc.trough);
      by_infill[g.infill].push_back({g.thickness_mm, g.ballooning_at_peak->mean});
    } else {
      rep.warnings.push_back("group " + g.infill + "/" + std::to_string(g.thickness_mm) +
                             " mm has no ballooning samples");
    }
    if (!acc.rupture.empty()) {
      g.rupture = stats_of(acc.rupture);
    } else {
      rep.warnings.push_back("group " + g.infill + "/" + std::to_string(g.thickness_mm) +
                             " mm has no rupture samples");
    }
    if (g.rupture && g.ballooning_at_peak) {
      g.margin_kpa = g.rupture->mean - g.ballooning_at_peak->mean;
      g.positive_margin = *g.margin_kpa > 0.0;
    }
    rep.groups.push_back(std::move(g));
  }
  for (const auto& [infill, pts] : by_infill) {
    if (pts.size() < 2) continue;
    bool mono = true;
    for (std::size_t k = 1; k < pts.size(); ++k) mono = mono && pts[k].second > pts[k - 1].second;
    rep.monotone_in_thickness.push_back({infill, mono});
  }
  return rep;
}

}  // namespace tpekit::analysis
