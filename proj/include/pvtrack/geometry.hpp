#pragma once

#include <cmath>

namespace pvtrack {

// Coordinate frames:
//   I - image frame, pixel coordinates (u right, v down, origin top-left)
//   C - camera frame, metric, x to the vehicle front, y right, z down;
//       gimbal keeps the xy-plane parallel to the ground
//   W - world frame, metric
// Lines are slope/intercept pairs y = a*x + b in their own frame; the two
// frames get distinct types so they cannot be mixed without a conversion.

struct PixelPoint {
    double u = 0.0;
    double v = 0.0;
};

struct CameraPoint {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
};

struct CameraLine {
    double slope = 0.0;      // a^C
    double intercept = 0.0;  // b^C, meters
};

struct WorldLine {
    double slope = 0.0;      // a^W
    double intercept = 0.0;  // b^W, meters
};

/// Planar vehicle/camera pose plus height above ground.
struct Pose2D {
    double x = 0.0;         // meters, world
    double y = 0.0;         // meters, world
    double theta = 0.0;     // yaw, radians, normalized to (-pi, pi]
    double ground_z = 0.0;  // height above ground, > 0
};

/// Camera intrinsics reduced to what a nadir view over flat ground needs.
struct ImageGeometry {
    int width = 640;              // U, pixels
    int height = 512;             // V, pixels
    double focal = -1000.0;       // f, negative by convention, nonzero
    double pixel_scale = 1.0;     // k, meters per pixel at the focal plane
    double ground_distance = 15.0;  // z_g, meters, > 0

    bool valid() const {
        return width > 0 && height > 0 && focal != 0.0 && pixel_scale > 0.0 &&
               ground_distance > 0.0;
    }

    /// Meters per pixel on the ground plane.
    double meters_per_pixel() const {
        return pixel_scale / std::abs(focal) * ground_distance;
    }
};

double normalize_angle(double a);

/// Minimum |x2 - x1| in frame C before a two-point line is treated as
/// perpendicular to the flight direction and rejected.
inline constexpr double kVerticalEps = 1e-6;

/// Denominator magnitude below which a line maps onto a singular
/// observation (parallel to the camera y-axis after rotation).
inline constexpr double kSingularEps = 1e-12;

CameraPoint pixel_to_camera(PixelPoint p, const ImageGeometry& g);

CameraLine line_from_camera_points(CameraPoint p1, CameraPoint p2);

CameraLine world_line_to_camera(WorldLine m, const Pose2D& pose);

WorldLine camera_line_to_world(CameraLine o, const Pose2D& pose);

/// World coordinates of a camera-frame ground point (rendering helper,
/// the exact inverse of the planar part of the transforms above).
WorldPoint camera_to_world_point(double xc, double yc, const Pose2D& pose);

} // namespace pvtrack
