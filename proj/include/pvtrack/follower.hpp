#pragma once

#include "pvtrack/geometry.hpp"

namespace pvtrack {

struct CarrotConfig {
    double lookahead = 3.0;      // meters ahead on the line
    double kp = 0.8;
    double ki = 0.02;
    double kd = 0.1;
    double cruise_speed = 0.6;   // m/s along-track target
    double max_speed = 1.2;      // m/s hard clamp on the command norm
    double integral_limit = 1.0; // anti-windup clamp, m*s
};

/// Planar velocity command in the camera frame; altitude and yaw are
/// handled elsewhere.
struct VelocityCommand {
    double vx = 0.0;
    double vy = 0.0;

    double norm() const;
};

struct PidState {
    double integral_x = 0.0;
    double integral_y = 0.0;
    double prev_x = 0.0;
    double prev_y = 0.0;
    bool has_prev = false;
};

/// Signed distance error from the camera origin to the reference line,
/// e = -b / sqrt(a^2 + 1); the sign tells which side of the line we are on.
double cross_track_error(CameraLine line);

/// Virtual target: lookahead along the line direction plus a step that
/// cancels the cross-track error. The along-track direction is (1, a)
/// normalized with positive x so the carrot always leads forward.
CameraPoint carrot_target(CameraLine line, double error, const CarrotConfig& cfg,
                          double ground_z = 0.0);

/// One PID step on the displacement to the carrot. The along-track component
/// is limited to cruise speed, the full command norm to max speed.
VelocityCommand follow_step(CameraLine line, const CarrotConfig& cfg, double dt,
                            PidState& pid);

} // namespace pvtrack
