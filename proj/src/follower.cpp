#include "pvtrack/follower.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pvtrack {

double VelocityCommand::norm() const { return std::hypot(vx, vy); }

double cross_track_error(CameraLine line) {
    return -line.intercept / std::sqrt(line.slope * line.slope + 1.0);
}

namespace {

struct Basis {
    double along_x, along_y;  // unit, points toward +x
    double perp_x, perp_y;    // along rotated +90 degrees
};

Basis line_basis(CameraLine line) {
    const double inv_norm = 1.0 / std::sqrt(line.slope * line.slope + 1.0);
    const double ax = inv_norm;           // (1, a) normalized; total for all a
    const double ay = line.slope * inv_norm;
    return Basis{ax, ay, -ay, ax};
}

} // namespace

CameraPoint carrot_target(CameraLine line, double error, const CarrotConfig& cfg,
                          double ground_z) {
    const Basis basis = line_basis(line);
    // -error along the perpendicular reaches the foot of the line when the
    // lookahead is zero.
    return CameraPoint{
        cfg.lookahead * basis.along_x - error * basis.perp_x,
        cfg.lookahead * basis.along_y - error * basis.perp_y,
        ground_z,
    };
}

VelocityCommand follow_step(CameraLine line, const CarrotConfig& cfg, double dt,
                            PidState& pid) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");

    const double e = cross_track_error(line);
    const CameraPoint target = carrot_target(line, e, cfg);

    // Displacement from the vehicle (camera origin) to the carrot is the
    // quantity the PID drives to zero.
    const double ex = target.x;
    const double ey = target.y;

    pid.integral_x = std::clamp(pid.integral_x + ex * dt, -cfg.integral_limit, cfg.integral_limit);
    pid.integral_y = std::clamp(pid.integral_y + ey * dt, -cfg.integral_limit, cfg.integral_limit);
    const double dx = pid.has_prev ? (ex - pid.prev_x) / dt : 0.0;
    const double dy = pid.has_prev ? (ey - pid.prev_y) / dt : 0.0;
    pid.prev_x = ex;
    pid.prev_y = ey;
    pid.has_prev = true;

    double ux = cfg.kp * ex + cfg.ki * pid.integral_x + cfg.kd * dx;
    double uy = cfg.kp * ey + cfg.ki * pid.integral_y + cfg.kd * dy;

    // Saturate the along-track component at cruise speed; the cross-track
    // part stays proportional so the error keeps being regulated.
    const Basis basis = line_basis(line);
    double along = ux * basis.along_x + uy * basis.along_y;
    const double perp = ux * basis.perp_x + uy * basis.perp_y;
    along = std::clamp(along, -cfg.cruise_speed, cfg.cruise_speed);
    ux = along * basis.along_x + perp * basis.perp_x;
    uy = along * basis.along_y + perp * basis.perp_y;

    const double norm = std::hypot(ux, uy);
    if (norm > cfg.max_speed) {
        const double scale = cfg.max_speed / norm;
        ux *= scale;
        uy *= scale;
    }
    return VelocityCommand{ux, uy};
}

} // namespace pvtrack
