#include <doctest.h>

#include <cmath>

#include "pvtrack/errors.hpp"
#include "pvtrack/rng.hpp"
#include "pvtrack/thermal.hpp"

using namespace pvtrack;

namespace {

// Independent oracle for the distance transform: scan every zero pixel.
DistanceMap brute_force_distance(const GrayImage& img) {
    DistanceMap out(img.width, img.height);
    std::vector<std::pair<int, int>> zeros;
    for (int v = 0; v < img.height; ++v) {
        for (int u = 0; u < img.width; ++u) {
            if (img.at(u, v) == 0) zeros.emplace_back(u, v);
        }
    }
    const float sentinel = static_cast<float>(img.width + img.height);
    for (int v = 0; v < img.height; ++v) {
        for (int u = 0; u < img.width; ++u) {
            if (zeros.empty()) {
                out.at(u, v) = sentinel;
                continue;
            }
            std::int64_t best = INT64_MAX;
            for (const auto& [zu, zv] : zeros) {
                const std::int64_t du = zu - u;
                const std::int64_t dv = zv - v;
                best = std::min(best, du * du + dv * dv);
            }
            out.at(u, v) = static_cast<float>(std::sqrt(static_cast<double>(best)));
        }
    }
    return out;
}

GrayImage random_mask(Xoshiro256& rng, int w, int h, double zero_prob) {
    GrayImage img(w, h);
    for (auto& px : img.data) {
        px = rng.uniform() < zero_prob ? 0 : static_cast<std::uint8_t>(1 + (rng.next() % 255));
    }
    return img;
}

} // namespace

TEST_CASE("threshold_band keeps strictly in-band pixels") {
    GrayImage img(3, 1);
    img.data = {100, 90, 110};
    const GrayImage out = threshold_band(img, 90, 110);
    CHECK(out.data[0] == 100);  // in band
    CHECK(out.data[1] == 0);    // lower bound is strict
    CHECK(out.data[2] == 0);    // upper bound is strict
}

TEST_CASE("threshold_band with the full band is the identity") {
    GrayImage img(16, 16, 128);
    CHECK(threshold_band(img, 0, 255) == img);
}

TEST_CASE("threshold_band is idempotent") {
    Xoshiro256 rng(5);
    GrayImage img = random_mask(rng, 64, 48, 0.3);
    const GrayImage once = threshold_band(img, 40, 200);
    CHECK(threshold_band(once, 40, 200) == once);
}

TEST_CASE("threshold_band rejects a reversed band") {
    GrayImage img(4, 4);
    CHECK_THROWS_AS(threshold_band(img, 110, 90), InvalidThresholds);
    CHECK_THROWS_AS(threshold_band(img, 90, 90), InvalidThresholds);
}

TEST_CASE("distance_transform on an all-zero image is all zero") {
    GrayImage img(32, 24, 0);
    const DistanceMap d = distance_transform(img);
    for (const float value : d.data) CHECK(value == 0.0f);
}

TEST_CASE("distance_transform single nonzero pixel") {
    GrayImage img(9, 9, 0);
    img.at(4, 4) = 200;
    const DistanceMap d = distance_transform(img);
    CHECK(d.at(4, 4) == 1.0f);  // nearest zero is any 4-neighbor
    CHECK(d.at(3, 4) == 0.0f);
}

TEST_CASE("distance_transform without any zero pixel hits the sentinel") {
    GrayImage img(10, 6, 7);
    const DistanceMap d = distance_transform(img);
    for (const float value : d.data) CHECK(value == 16.0f);
}

TEST_CASE("distance_transform equals the brute-force oracle exactly") {
    Xoshiro256 rng(6);
    for (int trial = 0; trial < 25; ++trial) {
        const double zero_prob = 0.02 + 0.9 * rng.uniform();
        const GrayImage img = random_mask(rng, 64, 64, zero_prob);
        const DistanceMap fast = distance_transform(img);
        const DistanceMap slow = brute_force_distance(img);
        REQUIRE(fast.data == slow.data);  // bitwise
    }
}

TEST_CASE("binarize_distance strict threshold") {
    DistanceMap d(3, 1);
    d.data = {5.0f, 4.0f, 0.0f};
    const BinaryMask b = binarize_distance(d, 4.0);
    CHECK(b.data[0] == 1);
    CHECK(b.data[1] == 0);  // equal is out
    CHECK(b.data[2] == 0);

    CHECK_THROWS_AS(binarize_distance(d, 0.0), InvalidThresholds);
}

TEST_CASE("binarize_distance is monotone in the threshold") {
    Xoshiro256 rng(7);
    DistanceMap d(64, 64);
    for (auto& value : d.data) value = static_cast<float>(rng.uniform(0.0, 20.0));
    const BinaryMask low = binarize_distance(d, 3.0);
    const BinaryMask high = binarize_distance(d, 9.0);
    for (size_t i = 0; i < d.size(); ++i) {
        if (high.data[i] == 1) CHECK(low.data[i] == 1);  // raising th never adds pixels
    }
}

TEST_CASE("extract_regions basics") {
    SUBCASE("empty mask") {
        BinaryMask mask(16, 16, 0);
        CHECK(extract_regions(mask, 1).empty());
    }
    SUBCASE("two blocks, min_area filter") {
        BinaryMask mask(40, 20, 0);
        for (int v = 2; v < 12; ++v) {
            for (int u = 2; u < 12; ++u) mask.at(u, v) = 1;
            for (int u = 25; u < 35; ++u) mask.at(u, v) = 1;
        }
        const auto regions = extract_regions(mask, 50);
        REQUIRE(regions.size() == 2);
        CHECK(regions[0].area() == 100);
        CHECK(regions[1].area() == 100);
        // deterministic order: top-left-most first
        CHECK(regions[0].min_u == 2);
        CHECK(regions[1].min_u == 25);
    }
    SUBCASE("small blob below min_area vanishes") {
        BinaryMask mask(16, 16, 0);
        mask.at(3, 3) = mask.at(4, 3) = mask.at(3, 4) = 1;
        CHECK(extract_regions(mask, 100).empty());
    }
}

TEST_CASE("extract_regions partitions the retained pixels") {
    Xoshiro256 rng(8);
    BinaryMask mask(80, 60, 0);
    for (auto& px : mask.data) px = rng.uniform() < 0.45 ? 1 : 0;
    const int min_area = 5;
    const auto regions = extract_regions(mask, min_area);

    BinaryMask seen(80, 60, 0);
    std::size_t total = 0;
    for (const Region& region : regions) {
        CHECK(region.area() >= min_area);
        total += region.pixels.size();
        for (const PixelCoord& p : region.pixels) {
            CHECK(mask.at(p.u, p.v) == 1);
            CHECK(seen.at(p.u, p.v) == 0);  // no pixel in two regions
            seen.at(p.u, p.v) = 1;
        }
    }
    // Every retained pixel belongs to a region; dropped ones are below min_area.
    const auto small = extract_regions(mask, 1);
    std::size_t all_ones = 0;
    for (const auto px : mask.data) all_ones += px;
    std::size_t dropped = 0;
    for (const Region& region : small) {
        if (region.area() < min_area) dropped += region.pixels.size();
    }
    CHECK(total + dropped == all_ones);
}

TEST_CASE("4-connectivity does not bridge diagonals") {
    BinaryMask mask(4, 4, 0);
    mask.at(0, 0) = 1;
    mask.at(1, 1) = 1;
    CHECK(extract_regions(mask, 1).size() == 2);
}
