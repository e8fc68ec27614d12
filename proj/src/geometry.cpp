#include "pvtrack/geometry.hpp"

#include <cmath>

#include "pvtrack/errors.hpp"

namespace pvtrack {

double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a <= -M_PI) a += 2.0 * M_PI;
    if (a > M_PI) a -= 2.0 * M_PI;
    return a;
}

CameraPoint pixel_to_camera(PixelPoint p, const ImageGeometry& g) {
    // x heads towards -v (up in the image), y towards +u, both scaled by
    // the ground distance; the image center lands on the optical axis.
    const double scale = g.pixel_scale / std::abs(g.focal) * g.ground_distance;
    return CameraPoint{
        scale * (0.5 * g.height - p.v),
        scale * (p.u - 0.5 * g.width),
        g.ground_distance,
    };
}

CameraLine line_from_camera_points(CameraPoint p1, CameraPoint p2) {
    const double dx = p2.x - p1.x;
    if (std::abs(dx) < kVerticalEps) {
        throw NearVerticalLine("line through camera points is perpendicular to flight direction");
    }
    const double a = (p2.y - p1.y) / dx;
    return CameraLine{a, p1.y - a * p1.x};
}

CameraLine world_line_to_camera(WorldLine m, const Pose2D& pose) {
    const double t = std::tan(pose.theta);
    const double den1 = 1.0 + m.slope * t;
    const double den2 = std::cos(pose.theta) + std::sin(pose.theta) * m.slope;
    if (std::abs(den1) < kSingularEps || std::abs(den2) < kSingularEps) {
        throw SingularObservation("world line is parallel to the camera y-axis");
    }
    return CameraLine{
        (m.slope - t) / den1,
        (pose.x * m.slope + m.intercept - pose.y) / den2,
    };
}

WorldLine camera_line_to_world(CameraLine o, const Pose2D& pose) {
    const double t = std::tan(pose.theta);
    const double den1 = 1.0 - o.slope * t;
    if (std::abs(den1) < kSingularEps) {
        throw SingularObservation("camera line is singular under the inverse rotation");
    }
    const double a = (o.slope + t) / den1;
    const double den2 = std::cos(pose.theta) + std::sin(pose.theta) * a;
    if (std::abs(den2) < kSingularEps) {
        throw SingularObservation("camera line is singular under the inverse rotation");
    }
    return WorldLine{a, o.intercept * den2 + pose.y - pose.x * a};
}

WorldPoint camera_to_world_point(double xc, double yc, const Pose2D& pose) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    return WorldPoint{
        pose.x + c * xc - s * yc,
        pose.y + s * xc + c * yc,
    };
}

} // namespace pvtrack
