#include "pvtrack/kernels.hpp"

#if PVTRACK_HAVE_AVX2_KERNELS

#include <immintrin.h>

// Compiled with -mavx2; only reached after the runtime CPU check.

namespace pvtrack::kernels::avx2 {

namespace {

// Unsigned byte compares via the sign-flip trick (AVX2 only has signed ones).
inline __m256i cmpgt_u8(__m256i x, __m256i y) {
    const __m256i bias = _mm256_set1_epi8(static_cast<char>(0x80));
    return _mm256_cmpgt_epi8(_mm256_xor_si256(x, bias), _mm256_xor_si256(y, bias));
}

// Pack four 32-bit lane masks (8 floats each) into 32 ordered bytes of 0/1.
inline __m256i pack_masks_to_bytes(__m256i m0, __m256i m1, __m256i m2, __m256i m3) {
    const __m256i a = _mm256_packs_epi32(m0, m1);
    const __m256i b = _mm256_packs_epi32(m2, m3);
    __m256i c = _mm256_packs_epi16(a, b);
    // packs interleaves 128-bit lanes; restore source order dword-wise.
    const __m256i order = _mm256_setr_epi32(0, 4, 1, 5, 2, 6, 3, 7);
    c = _mm256_permutevar8x32_epi32(c, order);
    return _mm256_and_si256(c, _mm256_set1_epi8(1));
}

} // namespace

void threshold_band_u8(const std::uint8_t* in, std::uint8_t* out, std::size_t n,
                       std::uint8_t lo, std::uint8_t hi) {
    const __m256i vlo = _mm256_set1_epi8(static_cast<char>(lo));
    const __m256i vhi = _mm256_set1_epi8(static_cast<char>(hi));
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i x = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(in + i));
        const __m256i keep = _mm256_and_si256(cmpgt_u8(x, vlo), cmpgt_u8(vhi, x));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), _mm256_and_si256(x, keep));
    }
    for (; i < n; ++i) {
        const std::uint8_t x = in[i];
        out[i] = (x > lo && x < hi) ? x : 0;
    }
}

void binarize_gt_f32(const float* d, std::uint8_t* out, std::size_t n, float th) {
    const __m256 vth = _mm256_set1_ps(th);
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i m0 = _mm256_castps_si256(_mm256_cmp_ps(_mm256_loadu_ps(d + i), vth, _CMP_GT_OQ));
        const __m256i m1 = _mm256_castps_si256(_mm256_cmp_ps(_mm256_loadu_ps(d + i + 8), vth, _CMP_GT_OQ));
        const __m256i m2 = _mm256_castps_si256(_mm256_cmp_ps(_mm256_loadu_ps(d + i + 16), vth, _CMP_GT_OQ));
        const __m256i m3 = _mm256_castps_si256(_mm256_cmp_ps(_mm256_loadu_ps(d + i + 24), vth, _CMP_GT_OQ));
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i), pack_masks_to_bytes(m0, m1, m2, m3));
    }
    for (; i < n; ++i) {
        out[i] = d[i] > th ? 1 : 0;
    }
}

void hsv_in_range_f32(const float* h, const float* s, const float* v,
                      std::uint8_t* out, std::size_t n,
                      float h_lo, float h_hi, bool hue_wrap,
                      float s_lo, float s_hi, float v_lo, float v_hi) {
    const __m256 vhlo = _mm256_set1_ps(h_lo);
    const __m256 vhhi = _mm256_set1_ps(h_hi);
    const __m256 vslo = _mm256_set1_ps(s_lo);
    const __m256 vshi = _mm256_set1_ps(s_hi);
    const __m256 vvlo = _mm256_set1_ps(v_lo);
    const __m256 vvhi = _mm256_set1_ps(v_hi);

    auto block = [&](std::size_t i) -> __m256i {
        const __m256 hv = _mm256_loadu_ps(h + i);
        const __m256 sv = _mm256_loadu_ps(s + i);
        const __m256 vv = _mm256_loadu_ps(v + i);
        __m256 h_ok;
        if (hue_wrap) {
            h_ok = _mm256_or_ps(_mm256_cmp_ps(hv, vhlo, _CMP_LT_OQ),
                                _mm256_cmp_ps(hv, vhhi, _CMP_GT_OQ));
        } else {
            h_ok = _mm256_and_ps(_mm256_cmp_ps(hv, vhlo, _CMP_GT_OQ),
                                 _mm256_cmp_ps(hv, vhhi, _CMP_LT_OQ));
        }
        const __m256 s_ok = _mm256_and_ps(_mm256_cmp_ps(sv, vslo, _CMP_GT_OQ),
                                          _mm256_cmp_ps(sv, vshi, _CMP_LT_OQ));
        const __m256 v_ok = _mm256_and_ps(_mm256_cmp_ps(vv, vvlo, _CMP_GT_OQ),
                                          _mm256_cmp_ps(vv, vvhi, _CMP_LT_OQ));
        return _mm256_castps_si256(_mm256_and_ps(h_ok, _mm256_and_ps(s_ok, v_ok)));
    };

    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        _mm256_storeu_si256(reinterpret_cast<__m256i*>(out + i),
                            pack_masks_to_bytes(block(i), block(i + 8), block(i + 16), block(i + 24)));
    }
    for (; i < n; ++i) {
        const bool h_ok = hue_wrap ? (h[i] < h_lo || h[i] > h_hi)
                                   : (h[i] > h_lo && h[i] < h_hi);
        const bool ok = h_ok && s[i] > s_lo && s[i] < s_hi && v[i] > v_lo && v[i] < v_hi;
        out[i] = ok ? 1 : 0;
    }
}

std::uint64_t overlap_count_u8(const std::uint8_t* a, const std::uint8_t* b, std::size_t n) {
    const __m256i zero = _mm256_setzero_si256();
    std::uint64_t count = 0;
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i za = _mm256_cmpeq_epi8(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)), zero);
        const __m256i zb = _mm256_cmpeq_epi8(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(b + i)), zero);
        const auto either_zero = static_cast<std::uint32_t>(_mm256_movemask_epi8(_mm256_or_si256(za, zb)));
        count += static_cast<unsigned>(__builtin_popcount(~either_zero));
    }
    for (; i < n; ++i) {
        count += (a[i] != 0 && b[i] != 0) ? 1 : 0;
    }
    return count;
}

std::uint64_t count_nonzero_u8(const std::uint8_t* a, std::size_t n) {
    const __m256i zero = _mm256_setzero_si256();
    std::uint64_t count = 0;
    std::size_t i = 0;
    for (; i + 32 <= n; i += 32) {
        const __m256i za = _mm256_cmpeq_epi8(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(a + i)), zero);
        const auto zeros = static_cast<std::uint32_t>(_mm256_movemask_epi8(za));
        count += static_cast<unsigned>(__builtin_popcount(~zeros));
    }
    for (; i < n; ++i) {
        count += a[i] != 0 ? 1 : 0;
    }
    return count;
}

} // namespace pvtrack::kernels::avx2

#endif // PVTRACK_HAVE_AVX2_KERNELS
