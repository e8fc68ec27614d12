#include "pvtrack/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace pvtrack::kernels {

namespace {

Backend detect_backend() {
    if (const char* env = std::getenv("PVTRACK_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0 && avx2_available()) return Backend::Avx2;
    }
    return avx2_available() ? Backend::Avx2 : Backend::Scalar;
}

std::atomic<Backend>& backend_slot() {
    static std::atomic<Backend> slot{detect_backend()};
    return slot;
}

} // namespace

bool avx2_available() {
#if PVTRACK_HAVE_AVX2_KERNELS
    static const bool supported = __builtin_cpu_supports("avx2");
    return supported;
#else
    return false;
#endif
}

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (b == Backend::Avx2 && !avx2_available()) b = Backend::Scalar;
    backend_slot().store(b, std::memory_order_relaxed);
}

void threshold_band_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n,
                       std::uint8_t lo, std::uint8_t hi) {
#if PVTRACK_HAVE_AVX2_KERNELS
    if (active_backend() == Backend::Avx2) {
        avx2::threshold_band_u8(in, out, n, lo, hi);
        return;
    }
#endif
    scalar::threshold_band_u8(in, out, n, lo, hi);
}

void binarize_gt_f32(const float* d, std::uint8_t* out, std::size_t n, float th) {
#if PVTRACK_HAVE_AVX2_KERNELS
    if (active_backend() == Backend::Avx2) {
        avx2::binarize_gt_f32(d, out, n, th);
        return;
    }
#endif
    scalar::binarize_gt_f32(d, out, n, th);
}

void hsv_in_range_f32(const float* h, const float* s, const float* v,
                      std::uint8_t* out, std::size_t n,
                      float h_lo, float h_hi, bool hue_wrap,
                      float s_lo, float s_hi, float v_lo, float v_hi) {
#if PVTRACK_HAVE_AVX2_KERNELS
    if (active_backend() == Backend::Avx2) {
        avx2::hsv_in_range_f32(h, s, v, out, n, h_lo, h_hi, hue_wrap, s_lo, s_hi, v_lo, v_hi);
        return;
    }
#endif
    scalar::hsv_in_range_f32(h, s, v, out, n, h_lo, h_hi, hue_wrap, s_lo, s_hi, v_lo, v_hi);
}

std::uint64_t overlap_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
#if PVTRACK_HAVE_AVX2_KERNELS
    if (active_backend() == Backend::Avx2) return avx2::overlap_count_u8(a, b, n);
#endif
    return scalar::overlap_count_u8(a, b, n);
}

std::uint64_t count_nonzero_u8(const std::uint8_t* a, std::size_t n) {
#if PVTRACK_HAVE_AVX2_KERNELS
    if (active_backend() == Backend::Avx2) return avx2::count_nonzero_u8(a, n);
#endif
    return scalar::count_nonzero_u8(a, n);
}

} // namespace pvtrack::kernels
