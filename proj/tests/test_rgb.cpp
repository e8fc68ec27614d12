#include <doctest.h>

#include <cmath>

#include "pvtrack/errors.hpp"
#include "pvtrack/rgb.hpp"
#include "pvtrack/rng.hpp"
#include "pvtrack/sim.hpp"

using namespace pvtrack;

TEST_CASE("to_hsv on reference colors") {
    SUBCASE("pure gray is unsaturated") {
        CHECK(rgb_to_hsv_pixel(128, 128, 128).s == doctest::Approx(0.0));
    }
    SUBCASE("pure blue") {
        const Hsv hsv = rgb_to_hsv_pixel(0, 0, 255);
        CHECK(hsv.h == doctest::Approx(240.0));
        CHECK(hsv.s == doctest::Approx(255.0));
        CHECK(hsv.v == doctest::Approx(255.0));
    }
    SUBCASE("orange") {
        const Hsv hsv = rgb_to_hsv_pixel(255, 128, 0);
        CHECK(std::abs(hsv.h - 30.12) < 0.5);
    }
}

TEST_CASE("hsv_to_rgb_pixel inverts to_hsv within quantization") {
    Xoshiro256 rng(13);
    for (int i = 0; i < 500; ++i) {
        const auto r = static_cast<std::uint8_t>(rng.next() % 256);
        const auto g = static_cast<std::uint8_t>(rng.next() % 256);
        const auto b = static_cast<std::uint8_t>(rng.next() % 256);
        const Hsv hsv = rgb_to_hsv_pixel(r, g, b);
        const auto back = hsv_to_rgb_pixel(hsv.h, hsv.s, hsv.v);
        CHECK(std::abs(int(back[0]) - int(r)) <= 1);
        CHECK(std::abs(int(back[1]) - int(g)) <= 1);
        CHECK(std::abs(int(back[2]) - int(b)) <= 1);
    }
}

TEST_CASE("threshold_hsv band predicates") {
    HsvPlanes planes(3, 1);
    planes.h = {220.0f, 220.0f, 5.0f};
    planes.s = {150.0f, 150.0f, 150.0f};
    planes.v = {120.0f, 120.0f, 120.0f};

    SUBCASE("bluish pixel inside the band") {
        HsvThresholds th;
        th.h_lo = 200;
        th.h_hi = 240;
        th.s_lo = 50;
        th.s_hi = 250;
        th.v_lo = 40;
        th.v_hi = 250;
        const BinaryMask mask = threshold_hsv(planes, th);
        CHECK(mask.data[0] == 1);

        th.hue_wrap = true;  // complement band excludes it
        CHECK(threshold_hsv(planes, th).data[0] == 0);
    }
    SUBCASE("reddish pixel through the wrapped band") {
        HsvThresholds th;
        th.h_lo = 30;
        th.h_hi = 330;
        th.hue_wrap = true;
        th.s_lo = 50;
        th.s_hi = 250;
        th.v_lo = 40;
        th.v_hi = 250;
        CHECK(threshold_hsv(planes, th).data[2] == 1);
    }
    SUBCASE("ordering is validated") {
        HsvThresholds th;
        th.s_lo = 200;
        th.s_hi = 100;
        CHECK_THROWS_AS(threshold_hsv(planes, th), InvalidThresholds);
    }
}

TEST_CASE("hue wrap equals the complement of the closed band, pixelwise") {
    Xoshiro256 rng(14);
    HsvPlanes planes(257, 3);
    for (size_t i = 0; i < planes.size(); ++i) {
        planes.h[i] = static_cast<float>(rng.uniform(0.0, 360.0));
        planes.s[i] = static_cast<float>(rng.uniform(0.0, 255.0));
        planes.v[i] = static_cast<float>(rng.uniform(0.0, 255.0));
    }
    HsvThresholds th;
    th.h_lo = 60;
    th.h_hi = 300;
    th.s_lo = 30;
    th.s_hi = 220;
    th.v_lo = 20;
    th.v_hi = 240;
    const BinaryMask plain = threshold_hsv(planes, th);
    th.hue_wrap = true;
    const BinaryMask wrapped = threshold_hsv(planes, th);
    for (size_t i = 0; i < planes.size(); ++i) {
        const bool sv_ok = planes.s[i] > th.s_lo && planes.s[i] < th.s_hi &&
                           planes.v[i] > th.v_lo && planes.v[i] < th.v_hi;
        const bool in_closed_band = planes.h[i] >= th.h_lo && planes.h[i] <= th.h_hi;
        CHECK(wrapped.data[i] == ((sv_ok && !in_closed_band) ? 1 : 0));
        if (sv_ok && planes.h[i] != th.h_lo && planes.h[i] != th.h_hi) {
            CHECK((plain.data[i] ^ wrapped.data[i]) == 1);  // complements
        }
    }
}

namespace {

ImageGeometry sim_geometry() {
    ImageGeometry g;
    g.ground_distance = 15.0;
    return g;
}

PlantLayout two_row_layout() {
    PlantLayout layout;
    PlantRow row;
    row.start = {0.0, 0.0};
    row.end = {60.0, 0.0};
    layout.rows.push_back(row);
    row.start = {0.0, 6.0};
    row.end = {60.0, 6.0};
    layout.rows.push_back(row);
    return layout;
}

double line_angle_deg(const ObservedLine& line) {
    return std::atan2(line.p2.v - line.p1.v, line.p2.u - line.p1.u) * 180.0 / M_PI;
}

} // namespace

TEST_CASE("detect_rgb on rendered fixtures") {
    const ImageGeometry geom = sim_geometry();
    const PlantLayout layout = two_row_layout();
    const DetectConfig cfg = DetectConfig::for_geometry(geom, 2.0, 2.0);
    const HsvThresholds th;  // defaults target the simulated panel hue

    SUBCASE("two parallel rows in view from between them") {
        const Pose2D pose{20.0, 3.0, 0.0, 15.0};
        const RgbImage frame = render_rgb(layout, pose, geom, 77);
        const RgbDetection det = detect_rgb(frame, th, cfg);
        REQUIRE(det.lines.size() == 2);
        for (const ObservedLine& line : det.lines) {
            // rows run along camera x = image -v: vertical in the frame
            CHECK(std::abs(std::abs(line_angle_deg(line)) - 90.0) < 1.2);
        }
    }
    SUBCASE("all-ground frame yields nothing") {
        const Pose2D pose{20.0, 60.0, 0.0, 15.0};
        const RgbImage frame = render_rgb(layout, pose, geom, 78);
        CHECK(detect_rgb(frame, th, cfg).lines.empty());
    }
    SUBCASE("single centered row lands within 3 px of the centerline") {
        const Pose2D pose{20.0, 0.0, 0.0, 15.0};
        const RgbImage frame = render_rgb(layout, pose, geom, 79);
        const RgbDetection det = detect_rgb(frame, th, cfg);
        REQUIRE(det.lines.size() == 1);
        const double mid_u = 0.5 * (det.lines[0].p1.u + det.lines[0].p2.u);
        CHECK(std::abs(mid_u - 320.0) < 3.0);
    }
}

TEST_CASE("detect_rgb on a mirrored frame yields the mirrored line") {
    const ImageGeometry geom = sim_geometry();
    PlantLayout layout = two_row_layout();
    layout.rows.resize(1);
    layout.rows[0].start = {0.0, -1.0};
    layout.rows[0].end = {60.0, 1.5};  // slightly slanted
    const Pose2D pose{30.0, 0.0, 0.0, 15.0};
    const RgbImage frame = render_rgb(layout, pose, geom, 80);

    RgbImage mirrored(frame.width, frame.height);
    for (int v = 0; v < frame.height; ++v) {
        for (int u = 0; u < frame.width; ++u) {
            const std::uint8_t* src = frame.px(frame.width - 1 - u, v);
            std::uint8_t* dst = mirrored.px(u, v);
            dst[0] = src[0];
            dst[1] = src[1];
            dst[2] = src[2];
        }
    }

    const DetectConfig cfg = DetectConfig::for_geometry(geom, 2.0, 2.0);
    const HsvThresholds th;
    const RgbDetection base = detect_rgb(frame, th, cfg);
    const RgbDetection flip = detect_rgb(mirrored, th, cfg);
    REQUIRE(base.clusters.size() == 1);
    REQUIRE(flip.clusters.size() == 1);

    const RegressionLine& a = base.clusters[0].merged;
    const RegressionLine& b = flip.clusters[0].merged;
    // slope in (u,v) negates, the centroid reflects about the mirror axis
    const double slope_a = a.dir_v / a.dir_u;
    const double slope_b = b.dir_v / b.dir_u;
    CHECK(slope_a == doctest::Approx(-slope_b).epsilon(1e-6));
    CHECK(a.centroid_u == doctest::Approx(frame.width - 1 - b.centroid_u).epsilon(1e-6));
    CHECK(a.centroid_v == doctest::Approx(b.centroid_v).epsilon(1e-6));
}

TEST_CASE("thermal and RGB pipelines agree on paired renders") {
    const ImageGeometry geom = sim_geometry();
    const PlantLayout layout = two_row_layout();
    const DetectConfig cfg = DetectConfig::for_geometry(geom, 2.0, 2.0);
    const Pose2D pose{25.0, 0.0, 0.0, 15.0};

    const auto thermal = detect_thermal(render_thermal(layout, pose, geom, 81),
                                        ThermalThresholds{}, cfg);
    const auto rgb = detect_rgb(render_rgb(layout, pose, geom, 81), HsvThresholds{}, cfg);
    REQUIRE(thermal.lines.size() == 1);
    REQUIRE(rgb.lines.size() == 1);

    const RegressionLine& lt = thermal.clusters[0].merged;
    const RegressionLine& lr = rgb.clusters[0].merged;
    CHECK(line_angle_between(lt, lr) < 2.0 * M_PI / 180.0);
    CHECK(line_pair_distance(lt, lr) < 5.0);
}
