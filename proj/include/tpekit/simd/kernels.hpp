#pragma once
// Data-parallel inner loops with a scalar reference and an AVX2 variant.
//
// The public entry points dispatch at runtime to the best variant the CPU
// supports. The environment variable TPEKIT_ISA=scalar|avx2 pins the choice
// at first use; set_active_isa() overrides it afterwards (tests use this to
// run the same workload through both variants).
//
// Contract shared by all variants:
// - unaligned loads only; callers need not align anything
// - tails (sizes not a multiple of the vector width) go through scalar code
// - bead_clearance is bit-identical across variants (same operation order,
//   no FMA contraction); reductions agree to rounding

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace tpekit::simd {

enum class Isa { Scalar, Avx2 };

// Best variant supported by this CPU.
Isa detected_isa() noexcept;
Isa active_isa() noexcept;
// Throws ArgumentError when the CPU cannot run the requested variant.
void set_active_isa(Isa isa);
std::string_view isa_name(Isa isa) noexcept;
bool isa_supported(Isa isa) noexcept;

// Line segments in structure-of-arrays layout, with the per-segment terms of
// the point projection precomputed.
class SegmentBatch {
 public:
  void add(double ax, double ay, double bx, double by, double half_width);
  void clear();
  std::size_t size() const noexcept { return ax_.size(); }
  bool empty() const noexcept { return ax_.empty(); }

  const double* ax() const noexcept { return ax_.data(); }
  const double* ay() const noexcept { return ay_.data(); }
  const double* dx() const noexcept { return dx_.data(); }
  const double* dy() const noexcept { return dy_.data(); }
  const double* inv_len2() const noexcept { return inv_len2_.data(); }
  const double* half_width() const noexcept { return half_width_.data(); }

 private:
  std::vector<double> ax_, ay_, dx_, dy_, inv_len2_, half_width_;
};

// out[i] = min over segments s of (distance(p_i, s) - half_width_s), i.e. the
// signed clearance from point i to the nearest bead edge (negative inside a
// bead). +inf for an empty batch.
void bead_clearance(std::span<const double> px, std::span<const double> py,
                    const SegmentBatch& segments, std::span<double> out);

struct ResidualStats {
  double sum_squares = 0.0;
  double max_abs = 0.0;
};

ResidualStats residual_stats(std::span<const double> residuals);
double dot(std::span<const double> a, std::span<const double> b);

namespace scalar {
void bead_clearance(const double* px, const double* py, std::size_t n,
                    const SegmentBatch& segments, double* out);
ResidualStats residual_stats(const double* r, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define TPEKIT_HAVE_AVX2_KERNELS 1
namespace avx2 {
void bead_clearance(const double* px, const double* py, std::size_t n,
                    const SegmentBatch& segments, double* out);
ResidualStats residual_stats(const double* r, std::size_t n);
double dot(const double* a, const double* b, std::size_t n);
}  // namespace avx2
#else
#define TPEKIT_HAVE_AVX2_KERNELS 0
#endif

}  // namespace tpekit::simd
