#pragma once

#include <cstddef>
#include <cstdint>

// Pixel-level kernels used by the segmentation front-ends. Each kernel has
// a scalar reference implementation and, on x86-64, an AVX2 variant; the
// top-level entry points dispatch at runtime. The variants must produce
// bit-identical output (enforced by the equivalence tests), so callers can
// treat the choice as a pure speed knob.

namespace pvtrack::kernels {

enum class Backend { Scalar, Avx2 };

/// Backend selected for the dispatching entry points. Honors the
/// PVTRACK_SIMD environment variable ("scalar" or "avx2") on first use.
Backend active_backend();

/// True when the AVX2 variants are compiled in and the CPU supports them.
bool avx2_available();

/// Force a backend (tests/benchmarks); Avx2 falls back to Scalar when
/// unavailable.
void set_backend(Backend b);

// ---------------------------------------------------------------------------
// Dispatching entry points
// ---------------------------------------------------------------------------

/// out[i] = in[i] if lo < in[i] < hi else 0   (strict band)
void threshold_band_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n,
                       std::uint8_t lo, std::uint8_t hi);

/// out[i] = d[i] > th ? 1 : 0   (strict)
void binarize_gt_f32(const float* d, std::uint8_t* out, std::size_t n, float th);

/// out[i] = 1 iff the hue band predicate holds and s, v lie strictly inside
/// their bands. Non-wrap hue band: h_lo < H < h_hi. Wrapped band: the
/// complement NOT(h_lo <= H <= h_hi), used for hues that straddle 0/360.
void hsv_in_range_f32(const float* h, const float* s, const float* v,
                      std::uint8_t* out, std::size_t n,
                      float h_lo, float h_hi, bool hue_wrap,
                      float s_lo, float s_hi, float v_lo, float v_hi);

/// Number of indices where both masks are nonzero.
std::uint64_t overlap_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);

/// Number of nonzero bytes.
std::uint64_t count_nonzero_u8(const std::uint8_t* a, std::size_t n);

// ---------------------------------------------------------------------------
// Scalar reference kernels
// ---------------------------------------------------------------------------

namespace scalar {
void threshold_band_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n,
                       std::uint8_t lo, std::uint8_t hi);
void binarize_gt_f32(const float* d, std::uint8_t* out, std::size_t n, float th);
void hsv_in_range_f32(const float* h, const float* s, const float* v,
                      std::uint8_t* out, std::size_t n,
                      float h_lo, float h_hi, bool hue_wrap,
                      float s_lo, float s_hi, float v_lo, float v_hi);
std::uint64_t overlap_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
std::uint64_t count_nonzero_u8(const std::uint8_t* a, std::size_t n);
} // namespace scalar

// ---------------------------------------------------------------------------
// AVX2 variants (x86-64 only; callable only when avx2_available())
// ---------------------------------------------------------------------------

#if defined(__x86_64__) || defined(_M_X64)
#define PVTRACK_HAVE_AVX2_KERNELS 1
namespace avx2 {
void threshold_band_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n,
                       std::uint8_t lo, std::uint8_t hi);
void binarize_gt_f32(const float* d, std::uint8_t* out, std::size_t n, float th);
void hsv_in_range_f32(const float* h, const float* s, const float* v,
                      std::uint8_t* out, std::size_t n,
                      float h_lo, float h_hi, bool hue_wrap,
                      float s_lo, float s_hi, float v_lo, float v_hi);
std::uint64_t overlap_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n);
std::uint64_t count_nonzero_u8(const std::uint8_t* a, std::size_t n);
} // namespace avx2
#else
#define PVTRACK_HAVE_AVX2_KERNELS 0
#endif

} // namespace pvtrack::kernels
