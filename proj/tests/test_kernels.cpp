#include <doctest.h>

#include <vector>

#include "pvtrack/kernels.hpp"
#include "pvtrack/rng.hpp"

using namespace pvtrack;
namespace k = pvtrack::kernels;

// The AVX2 variants must match the scalar reference bit for bit, including
// the remainder tails, so sizes straddle the 32-lane boundaries on purpose.

namespace {

const std::vector<std::size_t> kSizes = {0, 1, 7, 31, 32, 33, 64, 100, 255, 1024, 4097};

std::vector<std::uint8_t> random_bytes(Xoshiro256& rng, std::size_t n) {
    std::vector<std::uint8_t> v(n);
    for (auto& b : v) b = static_cast<std::uint8_t>(rng.next() & 0xff);
    return v;
}

std::vector<float> random_floats(Xoshiro256& rng, std::size_t n, float lo, float hi) {
    std::vector<float> v(n);
    for (auto& f : v) f = static_cast<float>(rng.uniform(lo, hi));
    return v;
}

} // namespace

TEST_CASE("threshold_band_u8: avx2 matches scalar") {
    if (!k::avx2_available()) return;
    Xoshiro256 rng(1);
    for (const std::size_t n : kSizes) {
        const auto in = random_bytes(rng, n);
        for (const auto [lo, hi] : {std::pair<int, int>{10, 200}, {0, 255}, {127, 128}, {90, 110}}) {
            std::vector<std::uint8_t> a(n), b(n);
            k::scalar::threshold_band_u8(in.data(), a.data(), n, static_cast<std::uint8_t>(lo),
                                         static_cast<std::uint8_t>(hi));
            k::avx2::threshold_band_u8(in.data(), b.data(), n, static_cast<std::uint8_t>(lo),
                                       static_cast<std::uint8_t>(hi));
            CHECK(a == b);
        }
    }
}

TEST_CASE("binarize_gt_f32: avx2 matches scalar") {
    if (!k::avx2_available()) return;
    Xoshiro256 rng(2);
    for (const std::size_t n : kSizes) {
        auto d = random_floats(rng, n, 0.0f, 20.0f);
        if (n > 4) d[n / 2] = 5.0f;  // exact-threshold pixel stays 0 (strict compare)
        std::vector<std::uint8_t> a(n), b(n);
        k::scalar::binarize_gt_f32(d.data(), a.data(), n, 5.0f);
        k::avx2::binarize_gt_f32(d.data(), b.data(), n, 5.0f);
        CHECK(a == b);
    }
}

TEST_CASE("hsv_in_range_f32: avx2 matches scalar, both hue modes") {
    if (!k::avx2_available()) return;
    Xoshiro256 rng(3);
    for (const std::size_t n : kSizes) {
        const auto h = random_floats(rng, n, 0.0f, 360.0f);
        const auto s = random_floats(rng, n, 0.0f, 255.0f);
        const auto v = random_floats(rng, n, 0.0f, 255.0f);
        for (const bool wrap : {false, true}) {
            std::vector<std::uint8_t> a(n), b(n);
            k::scalar::hsv_in_range_f32(h.data(), s.data(), v.data(), a.data(), n, 30.0f, 330.0f,
                                        wrap, 50.0f, 200.0f, 40.0f, 220.0f);
            k::avx2::hsv_in_range_f32(h.data(), s.data(), v.data(), b.data(), n, 30.0f, 330.0f,
                                      wrap, 50.0f, 200.0f, 40.0f, 220.0f);
            CHECK(a == b);
        }
    }
}

TEST_CASE("count kernels: avx2 matches scalar") {
    if (!k::avx2_available()) return;
    Xoshiro256 rng(4);
    for (const std::size_t n : kSizes) {
        auto a = random_bytes(rng, n);
        auto b = random_bytes(rng, n);
        for (auto& x : a) x &= 1;
        for (auto& x : b) x &= 1;
        CHECK(k::scalar::overlap_count_u8(a.data(), b.data(), n) ==
              k::avx2::overlap_count_u8(a.data(), b.data(), n));
        CHECK(k::scalar::count_nonzero_u8(a.data(), n) == k::avx2::count_nonzero_u8(a.data(), n));
    }
}

TEST_CASE("dispatch honors set_backend") {
    const k::Backend original = k::active_backend();
    k::set_backend(k::Backend::Scalar);
    CHECK(k::active_backend() == k::Backend::Scalar);
    k::set_backend(k::Backend::Avx2);
    if (k::avx2_available()) {
        CHECK(k::active_backend() == k::Backend::Avx2);
    } else {
        CHECK(k::active_backend() == k::Backend::Scalar);
    }
    k::set_backend(original);
}
