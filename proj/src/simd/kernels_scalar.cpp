#include "tpekit/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tpekit::simd {

void SegmentBatch::add(double ax, double ay, double bx, double by, double half_width) {
  const double dx = bx - ax;
  const double dy = by - ay;
  const double len2 = dx * dx + dy * dy;
  ax_.push_back(ax);
  ay_.push_back(ay);
  dx_.push_back(dx);
  dy_.push_back(dy);
  // Zero-length segments degrade to their start point (t is forced to 0).
  inv_len2_.push_back(len2 > 0.0 ? 1.0 / len2 : 0.0);
  half_width_.push_back(half_width);
}

void SegmentBatch::clear() {
  ax_.clear();
  ay_.clear();
  dx_.clear();
  dy_.clear();
  inv_len2_.clear();
  half_width_.clear();
}

namespace scalar {

void bead_clearance(const double* px, const double* py, std::size_t n,
                    const SegmentBatch& segments, double* out) {
  const std::size_t m = segments.size();
  const double* ax = segments.ax();
  const double* ay = segments.ay();
  const double* dx = segments.dx();
  const double* dy = segments.dy();
  const double* inv = segments.inv_len2();
  const double* hw = segments.half_width();
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < m; ++s) {
      const double rx = px[i] - ax[s];
      const double ry = py[i] - ay[s];
      double t = (rx * dx[s] + ry * dy[s]) * inv[s];
      t = std::min(std::max(t, 0.0), 1.0);
      const double qx = t * dx[s] - rx;
      const double qy = t * dy[s] - ry;
      const double c = std::sqrt(qx * qx + qy * qy) - hw[s];
      best = std::min(best, c);
    }
    out[i] = best;
  }
}

ResidualStats residual_stats(const double* r, std::size_t n) {
  ResidualStats s;
  for (std::size_t i = 0; i < n; ++i) {
    s.sum_squares += r[i] * r[i];
    s.max_abs = std::max(s.max_abs, std::abs(r[i]));
  }
  return s;
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace scalar
}  // namespace tpekit::simd
