#include "pvtrack/kernels.hpp"

namespace pvtrack::kernels::scalar {

void threshold_band_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n,
                       std::uint8_t lo, std::uint8_t hi) {
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint8_t x = in[i];
        out[i] = (x > lo && x < hi) ? x : 0;
    }
}

void binarize_gt_f32(const float* d, std::uint8_t* out, std::size_t n, float th) {
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = d[i] > th ? 1 : 0;
    }
}

void hsv_in_range_f32(const float* h, const float* s, const float* v,
                      std::uint8_t* out, std::size_t n,
                      float h_lo, float h_hi, bool hue_wrap,
                      float s_lo, float s_hi, float v_lo, float v_hi) {
    for (std::size_t i = 0; i < n; ++i) {
        const bool h_ok = hue_wrap ? (h[i] < h_lo || h[i] > h_hi)
                                   : (h[i] > h_lo && h[i] < h_hi);
        const bool ok = h_ok && s[i] > s_lo && s[i] < s_hi && v[i] > v_lo && v[i] < v_hi;
        out[i] = ok ? 1 : 0;
    }
}

std::uint64_t overlap_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        count += (a[i] != 0 && b[i] != 0) ? 1 : 0;
    }
    return count;
}

std::uint64_t count_nonzero_u8(const std::uint8_t* a, std::size_t n) {
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        count += a[i] != 0 ? 1 : 0;
    }
    return count;
}

} // namespace pvtrack::kernels::scalar
