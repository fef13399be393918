#include <atomic>
#include <cstdlib>
#include <string>

#include "tpekit/error.hpp"
#include "tpekit/simd/kernels.hpp"

namespace tpekit::simd {

namespace {

Isa initial_isa() {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("TPEKIT_ISA")) {
    const std::string v(env);
    if (v == "scalar") isa = Isa::Scalar;
    else if (v == "avx2" && isa_supported(Isa::Avx2)) isa = Isa::Avx2;
  }
  return isa;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return true;
    case Isa::Avx2:
#if TPEKIT_HAVE_AVX2_KERNELS && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

Isa detected_isa() noexcept {
  return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa))
    throw ArgumentError("instruction set " + std::string(isa_name(isa)) +
                        " is not supported on this CPU");
  current().store(isa, std::memory_order_relaxed);
}

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

void bead_clearance(std::span<const double> px, std::span<const double> py,
                    const SegmentBatch& segments, std::span<double> out) {
  if (px.size() != py.size() || out.size() != px.size())
    throw ArgumentError("bead_clearance: coordinate and output sizes differ");
#if TPEKIT_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::Avx2) {
    avx2::bead_clearance(px.data(), py.data(), px.size(), segments, out.data());
    return;
  }
#endif
  scalar::bead_clearance(px.data(), py.data(), px.size(), segments, out.data());
}

ResidualStats residual_stats(std::span<const double> residuals) {
#if TPEKIT_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::Avx2) return avx2::residual_stats(residuals.data(), residuals.size());
#endif
  return scalar::residual_stats(residuals.data(), residuals.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ArgumentError("dot: size mismatch");
#if TPEKIT_HAVE_AVX2_KERNELS
  if (active_isa() == Isa::Avx2) return avx2::dot(a.data(), b.data(), a.size());
#endif
  return scalar::dot(a.data(), b.data(), a.size());
}

}  // namespace tpekit::simd
