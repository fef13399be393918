#include "tpekit/analysis/forces.hpp"

#include <algorithm>
#include <cmath>

#include "tpekit/error.hpp"

namespace tpekit::analysis {

Plateau plateau_force(const ForceTrace& trace, double window) {
  const auto& s = trace.samples();
  if (!(window > 0.0)) throw ArgumentError("plateau window must be > 0");
  if (s.size() < 2 || s.back().x - s.front().x < window * (1.0 - 1e-12))
    throw ArgumentError("trace is shorter than the plateau window");

  // prefix sums of shifted values keep the variance well conditioned
  const double shift = s.front().f_n;
  std::vector<double> c1(s.size() + 1, 0.0), c2(s.size() + 1, 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double v = s[k].f_n - shift;
    c1[k + 1] = c1[k] + v;
    c2[k + 1] = c2[k] + v * v;
  }
  const double eps = 1e-12 * std::max(1.0, std::abs(s.back().x));
  Plateau best;
  double best_var = INFINITY;
  std::size_t j = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double end = s[i].x + window;
    if (end > s.back().x + eps) break;
    j = std::max(j, i);
    while (j + 1 < s.size() && s[j + 1].x <= end + eps) ++j;
    const std::size_t m = j - i + 1;
    if (m < 2) continue;
    const double mean = (c1[j + 1] - c1[i]) / m;
    const double var = std::max(0.0, (c2[j + 1] - c2[i]) / m - mean * mean);
    if (var < best_var) {
      best_var = var;
      best.mean_n = mean + shift;
      best.sd_n = std::sqrt(var);
      best.start = s[i].x;
      best.end = s[j].x;
    }
  }
  if (!std::isfinite(best_var)) throw ArgumentError("plateau window holds fewer than 2 samples");
  return best;
}

AdhesionPeak adhesion_peak(const ForceTrace& trace) {
  const auto& s = trace.samples();
  if (s.empty()) throw ArgumentError("adhesion trace is empty");
  AdhesionPeak p{s[0].f_n, s[0].x};
  for (const auto& x : s)
    if (x.f_n > p.pull_off_force_n) p = {x.f_n, x.x};
  return p;
}

namespace {

std::vector<ForcePressure> prepare(std::vector<ForcePressure> b, const char* name) {
  if (b.size() < 2) throw ArgumentError(std::string(name) + " branch needs at least 2 points");
  for (const auto& x : b)
    if (!std::isfinite(x.force_n) || !std::isfinite(x.pressure_kpa))
      throw ArgumentError(std::string(name) + " branch has non-finite values");
  std::stable_sort(b.begin(), b.end(),
                   [](const ForcePressure& a, const ForcePressure& c) { return a.force_n < c.force_n; });
  std::vector<ForcePressure> out;
  std::size_t i = 0;
  while (i < b.size()) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < b.size() && b[j].force_n == b[i].force_n) sum += b[j++].pressure_kpa;
    out.push_back({b[i].force_n, sum / (j - i)});
    i = j;
  }
  return out;
}

double interp(const std::vector<ForcePressure>& b, double f) {
  const auto hi = std::lower_bound(b.begin(), b.end(), f, [](const ForcePressure& a, double v) {
    return a.force_n < v;
  });
  if (hi == b.begin()) return hi->pressure_kpa;
  if (hi == b.end()) return b.back().pressure_kpa;
  const auto lo = hi - 1;
  const double u = (f - lo->force_n) / (hi->force_n - lo->force_n);
  return lo->pressure_kpa + u * (hi->pressure_kpa - lo->pressure_kpa);
}

}  // namespace

Hysteresis sensor_hysteresis(const std::vector<ForcePressure>& loading,
                             const std::vector<ForcePressure>& unloading) {
  const auto a = prepare(loading, "loading");
  const auto b = prepare(unloading, "unloading");
  Hysteresis h;
  h.overlap_lo_n = std::max(a.front().force_n, b.front().force_n);
  h.overlap_hi_n = std::min(a.back().force_n, b.back().force_n);
  if (!(h.overlap_hi_n > h.overlap_lo_n))
    throw RangeError("loading and unloading branches do not overlap in force");

  std::vector<double> grid{h.overlap_lo_n, h.overlap_hi_n};
  for (const auto* br : {&a, &b})
    for (const auto& x : *br)
      if (x.force_n > h.overlap_lo_n && x.force_n < h.overlap_hi_n) grid.push_back(x.force_n);
  std::sort(grid.begin(), grid.end());
  for (double f : grid) {
    const double gap = std::abs(interp(a, f) - interp(b, f));
    if (gap > h.max_gap_kpa) {
      h.max_gap_kpa = gap;
      h.at_force_n = f;
    }
  }
  double p_lo = INFINITY, p_hi = -INFINITY;
  for (const auto* br : {&a, &b})
    for (const auto& x : *br) {
      p_lo = std::min(p_lo, x.pressure_kpa);
      p_hi = std::max(p_hi, x.pressure_kpa);
    }
  h.normalized = p_hi > p_lo ? h.max_gap_kpa / (p_hi - p_lo) : 0.0;
  return h;
}

}  // namespace tpekit::analysis
