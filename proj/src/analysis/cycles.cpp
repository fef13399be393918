#include "tpekit/analysis/cycles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/tools/minima.hpp>
#include <cmath>

#include "tpekit/error.hpp"

namespace tpekit::analysis {

namespace {

double percentile(std::vector<double> v, double q) {
  const auto k = static_cast<std::size_t>(std::floor(q * (v.size() - 1)));
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Start {
  std::size_t index;
  bool crossed;  // from a real threshold crossing (not gap filling)
};

std::vector<Start> cycle_starts(const std::vector<PressureSample>& s, double thr, double period,
                                double tol) {
  std::vector<Start> out;
  auto index_at = [&](double t) {
    const auto it = std::lower_bound(s.begin(), s.end(), t,
                                     [](const PressureSample& a, double v) { return a.t_s < v; });
    return static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - s.begin(), s.size() - 1));
  };
  double last_t = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (!(s[k - 1].p_kpa < thr && s[k].p_kpa >= thr)) continue;
    const double t = s[k].t_s;
    if (!out.empty()) {
      while (t - last_t > (1.0 + tol) * period) {
        last_t += period;
        out.push_back({index_at(last_t), false});
      }
      if (t - last_t < (1.0 - tol) * period) {
        if (out.back().crossed) continue;
        out.pop_back();
      }
    }
    out.push_back({k, true});
    last_t = t;
  }
  if (!out.empty()) {
    const double t_end = s.back().t_s;
    while (last_t + period + (1.0 - tol) * period <= t_end) {
      last_t += period;
      out.push_back({index_at(last_t), false});
    }
  }
  return out;
}

}  // namespace

CycleStats segment_cycles(const PressureTrace& trace, double period, const CycleOptions& opt) {
  if (!(period > 0.0)) throw ArgumentError("period hint must be > 0");
  if (!(opt.threshold_fraction > 0.0 && opt.threshold_fraction < 1.0) ||
      !(opt.failure_fraction > 0.0) || opt.reference_cycles < 1 ||
      !(opt.period_tolerance > 0.0 && opt.period_tolerance < 1.0))
    throw ArgumentError("invalid cycle segmentation options");
  const auto& s = trace.samples();
  if (s.size() < 4) throw AnalysisError("trace too short to segment");

  std::vector<double> p;
  p.reserve(s.size());
  for (const auto& x : s) p.push_back(x.p_kpa);
  CycleStats st;
  st.baseline_kpa = percentile(p, 0.05);
  const double high = percentile(p, 0.995);
  if (!(high - st.baseline_kpa > 1e-12 * std::max(1.0, std::abs(high))))
    throw AnalysisError("trace has no pressure cycles");

  auto build = [&](double thr, std::vector<Cycle>& cycles) {
    const auto starts = cycle_starts(s, thr, period, opt.period_tolerance);
    cycles.clear();
    std::vector<double> crossed_amps;
    for (std::size_t c = 0; c < starts.size(); ++c) {
      const std::size_t a = starts[c].index;
      const std::size_t b = c + 1 < starts.size() ? starts[c + 1].index : s.size();
      Cycle cy;
      cy.index = static_cast<int>(c + 1);
      cy.start_t_s = s[a].t_s;
      cy.peak_p_kpa = cy.baseline_p_kpa = s[a].p_kpa;
      for (std::size_t k = a; k < b; ++k) {
        cy.peak_p_kpa = std::max(cy.peak_p_kpa, s[k].p_kpa);
        cy.baseline_p_kpa = std::min(cy.baseline_p_kpa, s[k].p_kpa);
      }
      if (starts[c].crossed) crossed_amps.push_back(cy.peak_p_kpa - st.baseline_kpa);
      cycles.push_back(cy);
    }
    return median(crossed_amps);
  };

  std::vector<Cycle> cycles;
  const double amp0 = build(0.5 * (st.baseline_kpa + high), cycles);
  st.median_amplitude_kpa = build(st.baseline_kpa + opt.threshold_fraction * amp0, cycles);
  if (cycles.size() < 2)
    throw AnalysisError("fewer than 2 cycles detected (" + std::to_string(cycles.size()) + ")");
  st.cycles = std::move(cycles);

  std::vector<double> ref;
  for (int k = 0; k < opt.reference_cycles && k < static_cast<int>(st.cycles.size()); ++k)
    ref.push_back(st.cycles[k].peak_p_kpa - st.baseline_kpa);
  const double limit = opt.failure_fraction * median(ref);
  for (const auto& c : st.cycles)
    if (c.peak_p_kpa - st.baseline_kpa < limit) {
      st.failure_cycle = c.index;
      break;
    }
  return st;
}

DecayFit fit_peak_decay(const CycleStats& stats) {
  std::vector<double> k, y;
  for (const auto& c : stats.cycles) {
    if (stats.failure_cycle && c.index >= *stats.failure_cycle) break;
    k.push_back(c.index);
    y.push_back(c.peak_p_kpa);
  }
  if (k.size() < 10) throw ArgumentError("peak decay fit needs at least 10 cycles before failure");
  const std::size_t n = k.size();
  double sum_sq = 0.0, mean = 0.0;
  for (double v : y) {
    sum_sq += v * v;
    mean += v;
  }
  mean /= n;
  const Eigen::Map<const Eigen::VectorXd> yv(y.data(), n);

  // Variable projection: offset and amplitude are linear for a fixed rate.
  auto solve = [&](double rate, DecayParams& out) {
    if (rate == 0.0) {
      out = {0.0, 0.0, mean};
      return (yv.array() - mean).square().sum();
    }
    Eigen::MatrixX2d a(n, 2);
    for (std::size_t i = 0; i < n; ++i) a.row(i) << 1.0, std::exp(-rate * k[i]);
    const Eigen::Vector2d c = a.colPivHouseholderQr().solve(yv);
    out = {c(1), rate, c(0)};
    return (a * c - yv).squaredNorm();
  };
  auto sse = [&](double rate) {
    DecayParams tmp;
    return solve(rate, tmp);
  };

  std::vector<double> grid{0.0};
  for (int i = 0; i <= 240; ++i) grid.push_back(1e-6 * std::pow(10.0, 7.0 * i / 240.0));
  std::size_t best = 0;
  double best_sse = sse(0.0);
  const double tie = 1e-12 * sum_sq;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double v = sse(grid[i]);
    if (v < best_sse - tie) {
      best_sse = v;
      best = i;
    }
  }

  DecayFit fit;
  if (best + 1 == grid.size()) return fit;  // rate runs off the grid
  DecayParams params;
  double rate = 0.0;
  if (best > 0) {
    const auto r = boost::math::tools::brent_find_minima(sse, grid[best - 1], grid[best + 1], 52);
    rate = r.second < best_sse ? r.first : grid[best];
  }
  const double final_sse = solve(rate, params);
  fit.converged = true;
  fit.params = params;
  fit.rms_residual_kpa = std::sqrt(final_sse / n);
  return fit;
}

}  // namespace tpekit::analysis
