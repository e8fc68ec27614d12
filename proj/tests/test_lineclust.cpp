#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pvtrack/errors.hpp"
#include "pvtrack/lineclust.hpp"
#include "pvtrack/rng.hpp"

using namespace pvtrack;

namespace {

Region strip(int u0, int u1, int v0, int v1) {
    Region region;
    region.min_u = u0;
    region.max_u = u1 - 1;
    region.min_v = v0;
    region.max_v = v1 - 1;
    for (int v = v0; v < v1; ++v) {
        for (int u = u0; u < u1; ++u) {
            region.pixels.push_back({static_cast<std::uint16_t>(u), static_cast<std::uint16_t>(v)});
        }
    }
    return region;
}

Region segment_along(double slope, double intercept, int u0, int u1) {
    Region region;
    for (int u = u0; u < u1; ++u) {
        const int v = static_cast<int>(std::lround(slope * u + intercept));
        region.pixels.push_back({static_cast<std::uint16_t>(u), static_cast<std::uint16_t>(v)});
    }
    return region;
}

} // namespace

TEST_CASE("fit_region_line on a one-pixel-tall strip") {
    const RegressionLine line = fit_region_line(strip(10, 50, 7, 8));
    CHECK(std::abs(line.dir_u) == doctest::Approx(1.0));
    CHECK(line.dir_v == doctest::Approx(0.0));
    CHECK(line.centroid_u == doctest::Approx((10 + 49) / 2.0));
    CHECK(line.centroid_v == doctest::Approx(7.0));
}

TEST_CASE("fit_region_line on a perfect diagonal") {
    Region region;
    for (int t = 0; t < 64; ++t) {
        region.pixels.push_back({static_cast<std::uint16_t>(t), static_cast<std::uint16_t>(t)});
    }
    const RegressionLine line = fit_region_line(region);
    CHECK(std::abs(line.dir_u) == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(line.dir_v == doctest::Approx(1.0 / std::sqrt(2.0)));  // canonical: dir_v >= 0
}

TEST_CASE("fit_region_line recovers a noisy strip slope") {
    Xoshiro256 rng(9);
    Region region;
    for (int u = 0; u < 640; ++u) {
        const double v = 0.1 * u + 50.0 + rng.gaussian();
        region.pixels.push_back(
            {static_cast<std::uint16_t>(u), static_cast<std::uint16_t>(std::lround(v))});
    }
    const RegressionLine line = fit_region_line(region);
    const double slope = line.dir_v / line.dir_u;
    CHECK(std::abs(slope - 0.1) < 0.02);
}

TEST_CASE("fit_region_line rejects degenerate input") {
    Region single;
    single.pixels.push_back({3, 3});
    CHECK_THROWS_AS(fit_region_line(single), DegenerateRegion);

    Region coincident;
    coincident.pixels.push_back({3, 3});
    coincident.pixels.push_back({3, 3});
    CHECK_THROWS_AS(fit_region_line(coincident), DegenerateRegion);
}

TEST_CASE("cluster_lines merges collinear segments") {
    std::vector<RegressionLine> lines;
    lines.push_back(fit_region_line(segment_along(0.0, 100, 0, 200)));
    lines.push_back(fit_region_line(segment_along(0.0, 100, 300, 500)));
    const auto clusters = cluster_lines(lines, 5.0 * M_PI / 180.0, 40.0);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].members.size() == 2);
}

TEST_CASE("cluster_lines keeps distant parallels apart") {
    std::vector<RegressionLine> lines;
    lines.push_back(fit_region_line(segment_along(0.0, 100, 0, 400)));
    lines.push_back(fit_region_line(segment_along(0.0, 300, 0, 400)));
    CHECK(cluster_lines(lines, 5.0 * M_PI / 180.0, 40.0).size() == 2);
}

TEST_CASE("cluster_lines groups three row segments apart from a distractor") {
    std::vector<RegressionLine> lines;
    lines.push_back(fit_region_line(segment_along(0.05, 200, 0, 200)));
    lines.push_back(fit_region_line(segment_along(0.05, 200, 220, 420)));
    lines.push_back(fit_region_line(segment_along(0.05, 200, 440, 640)));
    Region vertical;  // orthogonal distractor
    for (int v = 100; v < 300; ++v) {
        vertical.pixels.push_back({320, static_cast<std::uint16_t>(v)});
    }
    lines.push_back(fit_region_line(vertical));

    const auto clusters = cluster_lines(lines, 5.0 * M_PI / 180.0, 40.0);
    REQUIRE(clusters.size() == 2);
    CHECK(clusters[0].members.size() + clusters[1].members.size() == 4);
    const auto three = std::max(clusters[0].members.size(), clusters[1].members.size());
    CHECK(three == 3);
}

TEST_CASE("clustering is invariant to input order") {
    std::vector<RegressionLine> lines;
    lines.push_back(fit_region_line(segment_along(0.05, 200, 0, 200)));
    lines.push_back(fit_region_line(segment_along(0.05, 200, 220, 420)));
    lines.push_back(fit_region_line(segment_along(0.0, 60, 0, 400)));
    lines.push_back(fit_region_line(segment_along(0.05, 205, 440, 640)));

    const auto count_sizes = [](const std::vector<LineCluster>& clusters) {
        std::vector<size_t> sizes;
        for (const auto& c : clusters) sizes.push_back(c.members.size());
        std::sort(sizes.begin(), sizes.end());
        return sizes;
    };
    const auto baseline = count_sizes(cluster_lines(lines, 5.0 * M_PI / 180.0, 40.0));

    Xoshiro256 rng(10);
    for (int trial = 0; trial < 10; ++trial) {
        auto shuffled = lines;
        for (size_t i = shuffled.size(); i > 1; --i) {
            std::swap(shuffled[i - 1], shuffled[rng.next() % i]);
        }
        CHECK(count_sizes(cluster_lines(shuffled, 5.0 * M_PI / 180.0, 40.0)) == baseline);
    }
}

TEST_CASE("cluster count never exceeds region count and covers every region") {
    Xoshiro256 rng(11);
    std::vector<RegressionLine> lines;
    for (int i = 0; i < 12; ++i) {
        const double slope = rng.uniform(-0.3, 0.3);
        const double intercept = rng.uniform(50.0, 450.0);
        const int u0 = static_cast<int>(rng.uniform(0.0, 300.0));
        lines.push_back(fit_region_line(segment_along(slope, intercept, u0, u0 + 120)));
    }
    const auto clusters = cluster_lines(lines, 5.0 * M_PI / 180.0, 40.0);
    CHECK(clusters.size() <= lines.size());
    std::vector<int> seen(lines.size(), 0);
    for (const auto& cluster : clusters) {
        for (const size_t m : cluster.members) seen[m] += 1;
    }
    for (const int count : seen) CHECK(count == 1);
}

TEST_CASE("merged line stays closer to members than a wrong cluster's line") {
    std::vector<RegressionLine> lines;
    lines.push_back(fit_region_line(segment_along(0.02, 100, 0, 250)));
    lines.push_back(fit_region_line(segment_along(0.02, 101, 300, 600)));
    lines.push_back(fit_region_line(segment_along(0.02, 320, 0, 600)));
    const auto clusters = cluster_lines(lines, 5.0 * M_PI / 180.0, 40.0);
    REQUIRE(clusters.size() == 2);
    const auto& row = clusters[0];
    const auto& other = clusters[1];
    for (const size_t m : row.members) {
        CHECK(line_pair_distance(lines[m], row.merged) <
              line_pair_distance(lines[m], other.merged));
    }
}

TEST_CASE("clip_to_border") {
    SUBCASE("horizontal mid line") {
        const ObservedLine line = clip_to_border(fit_region_line(segment_along(0.0, 256, 100, 200)),
                                                 640, 512);
        CHECK(line.p1.u == doctest::Approx(0.0));
        CHECK(line.p1.v == doctest::Approx(256.0));
        CHECK(line.p2.u == doctest::Approx(640.0));
        CHECK(line.p2.v == doctest::Approx(256.0));
    }
    SUBCASE("diagonal through a square frame") {
        Region diag;
        for (int t = 200; t < 300; ++t) {
            diag.pixels.push_back({static_cast<std::uint16_t>(t), static_cast<std::uint16_t>(t)});
        }
        const ObservedLine line = clip_to_border(fit_region_line(diag), 512, 512);
        CHECK(line.p1.u == doctest::Approx(0.0));
        CHECK(line.p1.v == doctest::Approx(0.0));
        CHECK(line.p2.u == doctest::Approx(512.0));
        CHECK(line.p2.v == doctest::Approx(512.0));
    }
    SUBCASE("slanted line hits left and right borders") {
        const ObservedLine line =
            clip_to_border(fit_region_line(segment_along(0.2, 100, 0, 640)), 640, 512);
        CHECK(line.p1.u == doctest::Approx(0.0));
        CHECK(line.p1.v == doctest::Approx(100.0).epsilon(0.02));
        CHECK(line.p2.u == doctest::Approx(640.0));
        CHECK(line.p2.v == doctest::Approx(228.0).epsilon(0.02));
    }
    SUBCASE("line outside the rectangle") {
        RegressionLine far;
        far.centroid_u = 1000.0;
        far.centroid_v = 1000.0;
        far.dir_u = 0.0;
        far.dir_v = 1.0;
        CHECK_THROWS_AS(clip_to_border(far, 640, 512), NoIntersection);
    }
}

TEST_CASE("clip endpoints land on the border rectangle, ordered by (v, u)") {
    Xoshiro256 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        RegressionLine line;
        line.centroid_u = rng.uniform(0.0, 640.0);
        line.centroid_v = rng.uniform(0.0, 512.0);
        const double angle = rng.uniform(0.0, M_PI);
        line.dir_u = std::cos(angle);
        line.dir_v = std::sin(angle);
        const ObservedLine observed = clip_to_border(line, 640, 512);

        const auto on_border = [](const PixelPoint& p) {
            const bool on_u = std::abs(p.u - 0.0) < 1e-6 || std::abs(p.u - 640.0) < 1e-6;
            const bool on_v = std::abs(p.v - 0.0) < 1e-6 || std::abs(p.v - 512.0) < 1e-6;
            const bool inside = p.u >= -1e-6 && p.u <= 640.0 + 1e-6 && p.v >= -1e-6 &&
                                p.v <= 512.0 + 1e-6;
            return inside && (on_u || on_v);
        };
        CHECK(on_border(observed.p1));
        CHECK(on_border(observed.p2));
        CHECK((observed.p1.v < observed.p2.v ||
               (observed.p1.v == observed.p2.v && observed.p1.u <= observed.p2.u)));
        const bool distinct = std::abs(observed.p1.u - observed.p2.u) > 1e-9 ||
                              std::abs(observed.p1.v - observed.p2.v) > 1e-9;
        CHECK(distinct);
    }
}
