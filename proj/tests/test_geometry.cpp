#include <doctest.h>

#include <cmath>

#include "pvtrack/errors.hpp"
#include "pvtrack/geometry.hpp"
#include "pvtrack/rng.hpp"

using namespace pvtrack;

namespace {

ImageGeometry paper_geometry() {
    ImageGeometry g;
    g.width = 640;
    g.height = 512;
    g.focal = -1000.0;
    g.pixel_scale = 1.0;
    g.ground_distance = 15.0;
    return g;
}

// Pose/line samples away from the tan and denominator singularities.
struct RandomCase {
    WorldLine line;
    Pose2D pose;
};

RandomCase random_case(Xoshiro256& rng) {
    for (;;) {
        RandomCase c;
        c.line.slope = rng.uniform(-2.0, 2.0);
        c.line.intercept = rng.uniform(-10.0, 10.0);
        c.pose.x = rng.uniform(-50.0, 50.0);
        c.pose.y = rng.uniform(-50.0, 50.0);
        c.pose.theta = rng.uniform(-M_PI, M_PI);
        c.pose.ground_z = 15.0;
        if (std::abs(std::cos(c.pose.theta)) < 0.1) continue;
        const double t = std::tan(c.pose.theta);
        if (std::abs(1.0 + c.line.slope * t) < 0.1) continue;
        if (std::abs(std::cos(c.pose.theta) + std::sin(c.pose.theta) * c.line.slope) < 0.1)
            continue;
        return c;
    }
}

} // namespace

TEST_CASE("pixel_to_camera maps the image center to the optical axis") {
    const ImageGeometry g = paper_geometry();
    const CameraPoint p = pixel_to_camera({320.0, 256.0}, g);
    CHECK(p.x == doctest::Approx(0.0));
    CHECK(p.y == doctest::Approx(0.0));
    CHECK(p.z == doctest::Approx(15.0));
}

TEST_CASE("pixel_to_camera hand-evaluated points") {
    const ImageGeometry g = paper_geometry();
    const CameraPoint top = pixel_to_camera({320.0, 0.0}, g);
    CHECK(top.x == doctest::Approx(3.84).epsilon(1e-12));
    CHECK(top.y == doctest::Approx(0.0));
    CHECK(top.z == doctest::Approx(15.0));

    const CameraPoint right = pixel_to_camera({640.0, 256.0}, g);
    CHECK(right.x == doctest::Approx(0.0));
    CHECK(right.y == doctest::Approx(4.8).epsilon(1e-12));
}

TEST_CASE("pixel_to_camera is affine: collinear pixels stay collinear") {
    const ImageGeometry g = paper_geometry();
    Xoshiro256 rng(7);
    for (int i = 0; i < 200; ++i) {
        const PixelPoint a{rng.uniform(0.0, 640.0), rng.uniform(0.0, 512.0)};
        const PixelPoint b{rng.uniform(0.0, 640.0), rng.uniform(0.0, 512.0)};
        const double t = rng.uniform(-1.0, 2.0);
        const PixelPoint c{a.u + t * (b.u - a.u), a.v + t * (b.v - a.v)};
        const CameraPoint ca = pixel_to_camera(a, g);
        const CameraPoint cb = pixel_to_camera(b, g);
        const CameraPoint cc = pixel_to_camera(c, g);
        const double cross = (cb.x - ca.x) * (cc.y - ca.y) - (cb.y - ca.y) * (cc.x - ca.x);
        CHECK(std::abs(cross) < 1e-9);
    }
}

TEST_CASE("pixel_to_camera scales linearly with ground distance") {
    ImageGeometry g = paper_geometry();
    const PixelPoint p{100.0, 400.0};
    const CameraPoint base = pixel_to_camera(p, g);
    for (const double s : {2.0, 0.5, 4.0}) {
        ImageGeometry scaled = g;
        scaled.ground_distance = g.ground_distance * s;
        const CameraPoint q = pixel_to_camera(p, scaled);
        CHECK(q.x == base.x * s);  // powers of two scale exactly
        CHECK(q.y == base.y * s);
    }
}

TEST_CASE("line_from_camera_points") {
    SUBCASE("horizontal offset line") {
        const CameraLine l = line_from_camera_points({0, 2, 15}, {1, 2, 15});
        CHECK(l.slope == doctest::Approx(0.0));
        CHECK(l.intercept == doctest::Approx(2.0));
    }
    SUBCASE("two-point slope") {
        const CameraLine l = line_from_camera_points({0, 0, 15}, {2, 1, 15});
        CHECK(l.slope == doctest::Approx(0.5));
        CHECK(l.intercept == doctest::Approx(0.0));
    }
    SUBCASE("degenerate delta-x is rejected") {
        CHECK_THROWS_AS(line_from_camera_points({0, 0, 15}, {1e-9, 5, 15}), NearVerticalLine);
    }
    SUBCASE("both points satisfy the implicit equation") {
        Xoshiro256 rng(11);
        for (int i = 0; i < 100; ++i) {
            const CameraPoint p1{rng.uniform(-5, 5), rng.uniform(-5, 5), 15};
            CameraPoint p2{rng.uniform(-5, 5), rng.uniform(-5, 5), 15};
            if (std::abs(p2.x - p1.x) < 1e-3) p2.x += 1.0;
            const CameraLine l = line_from_camera_points(p1, p2);
            CHECK(std::abs(p1.y - l.slope * p1.x - l.intercept) < 1e-9);
            CHECK(std::abs(p2.y - l.slope * p2.x - l.intercept) < 1e-9);
        }
    }
}

TEST_CASE("world_line_to_camera") {
    SUBCASE("identity pose") {
        const CameraLine l = world_line_to_camera({0.3, -1.5}, {0, 0, 0, 15});
        CHECK(l.slope == doctest::Approx(0.3));
        CHECK(l.intercept == doctest::Approx(-1.5));
    }
    SUBCASE("45 degree yaw cancels a unit slope") {
        const CameraLine l = world_line_to_camera({1.0, 0.0}, {0, 0, M_PI / 4, 15});
        CHECK(l.slope == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("camera sitting on the line sees zero intercept") {
        const CameraLine l = world_line_to_camera({0.0, 1.0}, {2, 1, 0, 15});
        CHECK(l.intercept == doctest::Approx(0.0));
    }
}

TEST_CASE("camera_line_to_world") {
    SUBCASE("identity pose") {
        const WorldLine m = camera_line_to_world({0.7, 2.0}, {0, 0, 0, 15});
        CHECK(m.slope == doctest::Approx(0.7));
        CHECK(m.intercept == doctest::Approx(2.0));
    }
    SUBCASE("camera offset shifts the intercept") {
        const WorldLine m = camera_line_to_world({0.0, 0.0}, {0, 1, 0, 15});
        CHECK(m.slope == doctest::Approx(0.0));
        CHECK(m.intercept == doctest::Approx(1.0));
    }
    SUBCASE("explicit roundtrip") {
        const WorldLine m{0.1, 2.0};
        const Pose2D pose{5, -3, 0.7, 15};
        const WorldLine back = camera_line_to_world(world_line_to_camera(m, pose), pose);
        CHECK(back.slope == doctest::Approx(m.slope).epsilon(1e-9));
        CHECK(back.intercept == doctest::Approx(m.intercept).epsilon(1e-9));
    }
}

TEST_CASE("camera/world line conversion roundtrips on random cases") {
    Xoshiro256 rng(42);
    for (int i = 0; i < 1000; ++i) {
        const RandomCase c = random_case(rng);
        const CameraLine o = world_line_to_camera(c.line, c.pose);
        const WorldLine back = camera_line_to_world(o, c.pose);
        CHECK(std::abs(back.slope - c.line.slope) < 1e-9);
        CHECK(std::abs(back.intercept - c.line.intercept) < 1e-9);
    }
}

TEST_CASE("normalize_angle lands in (-pi, pi]") {
    CHECK(normalize_angle(M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(-M_PI) == doctest::Approx(M_PI));
    CHECK(normalize_angle(3 * M_PI / 2) == doctest::Approx(-M_PI / 2));
    CHECK(normalize_angle(-7 * M_PI) == doctest::Approx(M_PI));
}
