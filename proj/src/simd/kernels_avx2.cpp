#include "tpekit/simd/kernels.hpp"

#if TPEKIT_HAVE_AVX2_KERNELS

#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <limits>

// Compiled with function-level target attributes so the rest of the library
// stays baseline x86-64. Only "avx2" is enabled (not "fma") so the compiler
// cannot contract mul+add and the clearance kernel stays bit-identical to the
// scalar reference.
#define TPEKIT_AVX2 __attribute__((target("avx2")))

namespace tpekit::simd::avx2 {

namespace {

TPEKIT_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

TPEKIT_AVX2 inline double hmax(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

}  // namespace

TPEKIT_AVX2 void bead_clearance(const double* px, const double* py, std::size_t n,
                                const SegmentBatch& segments, double* out) {
  const std::size_t m = segments.size();
  const double* ax = segments.ax();
  const double* ay = segments.ay();
  const double* dx = segments.dx();
  const double* dy = segments.dy();
  const double* inv = segments.inv_len2();
  const double* hw = segments.half_width();

  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d x = _mm256_loadu_pd(px + i);
    const __m256d y = _mm256_loadu_pd(py + i);
    __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < m; ++s) {
      const __m256d sdx = _mm256_broadcast_sd(dx + s);
      const __m256d sdy = _mm256_broadcast_sd(dy + s);
      const __m256d rx = _mm256_sub_pd(x, _mm256_broadcast_sd(ax + s));
      const __m256d ry = _mm256_sub_pd(y, _mm256_broadcast_sd(ay + s));
      __m256d t = _mm256_mul_pd(
          _mm256_add_pd(_mm256_mul_pd(rx, sdx), _mm256_mul_pd(ry, sdy)),
          _mm256_broadcast_sd(inv + s));
      t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
      const __m256d qx = _mm256_sub_pd(_mm256_mul_pd(t, sdx), rx);
      const __m256d qy = _mm256_sub_pd(_mm256_mul_pd(t, sdy), ry);
      const __m256d d = _mm256_sqrt_pd(
          _mm256_add_pd(_mm256_mul_pd(qx, qx), _mm256_mul_pd(qy, qy)));
      best = _mm256_min_pd(best, _mm256_sub_pd(d, _mm256_broadcast_sd(hw + s)));
    }
    _mm256_storeu_pd(out + i, best);
  }
  if (i < n) scalar::bead_clearance(px + i, py + i, n - i, segments, out + i);
}

TPEKIT_AVX2 ResidualStats residual_stats(const double* r, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  __m256d mx = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d a = _mm256_loadu_pd(r + i);
    const __m256d b = _mm256_loadu_pd(r + i + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a, a));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(b, b));
    mx = _mm256_max_pd(mx, _mm256_andnot_pd(sign_mask, a));
    mx = _mm256_max_pd(mx, _mm256_andnot_pd(sign_mask, b));
  }
  ResidualStats s;
  s.sum_squares = hsum(_mm256_add_pd(acc0, acc1));
  s.max_abs = hmax(mx);
  for (; i < n; ++i) {
    s.sum_squares += r[i] * r[i];
    s.max_abs = std::max(s.max_abs, std::abs(r[i]));
  }
  return s;
}

TPEKIT_AVX2 double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    acc1 = _mm256_add_pd(acc1,
                         _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace tpekit::simd::avx2

#endif
