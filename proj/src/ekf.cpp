#include "pvtrack/ekf.hpp"

#include <cmath>

#include "pvtrack/errors.hpp"

namespace pvtrack {

Mat2 Mat2::inverse() const {
    const double d = det();
    if (std::abs(d) < 1e-300 || !std::isfinite(d)) {
        throw SingularObservation("2x2 matrix is not invertible");
    }
    const double inv = 1.0 / d;
    return {m11 * inv, -m01 * inv, -m10 * inv, m00 * inv};
}

void Mat2::sym_eigenvalues(double& lo, double& hi) const {
    const double mean = 0.5 * (m00 + m11);
    const double off = 0.5 * (m01 + m10);
    const double r = std::sqrt(0.25 * (m00 - m11) * (m00 - m11) + off * off);
    lo = mean - r;
    hi = mean + r;
}

void NoiseConfig::validate() const {
    const auto check_spd = [](const Mat2& m, const char* name) {
        if (std::abs(m.m01 - m.m10) > 1e-12) {
            throw ConfigError(std::string(name) + " must be symmetric");
        }
        double lo, hi;
        m.sym_eigenvalues(lo, hi);
        if (lo <= 0.0) throw ConfigError(std::string(name) + " must be positive definite");
    };
    check_spd(r_thermal, "R (thermal)");
    check_spd(r_rgb, "R (rgb)");
    if (std::abs(process.m01 - process.m10) > 1e-12) {
        throw ConfigError("Q must be symmetric");
    }
    double lo, hi;
    process.sym_eigenvalues(lo, hi);
    if (lo < 0.0) throw ConfigError("Q must be positive semidefinite");
    if (hi > 1e-5) throw ConfigError("Q is meant to be a tiny regularizer (entries <= 1e-5)");
    if (gate_threshold <= 0.0) throw ConfigError("gate threshold must be > 0");
}

namespace {

/// Symmetrize and clamp numerical dust so the covariance stays PSD.
Mat2 make_psd(Mat2 p) {
    const double off = 0.5 * (p.m01 + p.m10);
    p.m01 = p.m10 = off;
    double lo, hi;
    p.sym_eigenvalues(lo, hi);
    if (lo < 0.0) {
        p.m00 -= lo;
        p.m11 -= lo;
    }
    return p;
}

} // namespace

MidlineState init_from_waypoints(WorldPoint start, WorldPoint end, Mat2 prior) {
    const double dx = end.x - start.x;
    if (std::abs(dx) < kVerticalEps) {
        throw NearVerticalLine("waypoint pair spans a vertical line in the world frame");
    }
    const double a = (end.y - start.y) / dx;
    return MidlineState{WorldLine{a, start.y - a * start.x}, prior};
}

MidlineState predict(const MidlineState& s, const NoiseConfig& noise) {
    return MidlineState{s.line, make_psd(s.covariance + noise.process)};
}

Mat2 jacobian_h(const MidlineState& s, const Pose2D& pose) {
    const double a = s.line.slope;
    const double b = s.line.intercept;
    const double t = std::tan(pose.theta);
    const double c = std::cos(pose.theta);
    const double sn = std::sin(pose.theta);
    const double den1 = 1.0 + a * t;
    const double den2 = c + sn * a;
    if (std::abs(den1) < kSingularEps || std::abs(den2) < kSingularEps) {
        throw SingularObservation("observation model is singular at this state/pose");
    }
    return Mat2{
        (1.0 + t * t) / (den1 * den1),
        0.0,
        (pose.x * den2 - sn * (pose.x * a + b - pose.y)) / (den2 * den2),
        1.0 / den2,
    };
}

GateResult gate(const MidlineState& s, const Observation& o, const Pose2D& pose,
                const NoiseConfig& noise) {
    const CameraLine expected = world_line_to_camera(s.line, pose);
    const Vec2 innovation{o.line.slope - expected.slope, o.line.intercept - expected.intercept};
    const Mat2 h = jacobian_h(s, pose);
    const Mat2 innov_cov = h * s.covariance * h.transpose() + noise.measurement(o.sensor);
    const Vec2 scaled = innov_cov.inverse() * innovation;
    const double m2 = innovation.a * scaled.a + innovation.b * scaled.b;
    return GateResult{m2 <= noise.gate_threshold, innovation, m2};
}

MidlineState update(const MidlineState& s, const Observation& o, const Pose2D& pose,
                    const NoiseConfig& noise) {
    const CameraLine expected = world_line_to_camera(s.line, pose);
    const Vec2 innovation{o.line.slope - expected.slope, o.line.intercept - expected.intercept};
    const Mat2 h = jacobian_h(s, pose);
    const Mat2 innov_cov = h * s.covariance * h.transpose() + noise.measurement(o.sensor);
    const Mat2 gain = s.covariance * h.transpose() * innov_cov.inverse();
    const Vec2 delta = gain * innovation;

    MidlineState next;
    next.line.slope = s.line.slope + delta.a;
    next.line.intercept = s.line.intercept + delta.b;
    next.covariance = make_psd((Mat2::identity() - gain * h) * s.covariance);
    return next;
}

GateResult MidlineTracker::feed(const Observation& o, const Pose2D& pose) {
    // The prediction is committed only with an accepted observation, so a
    // rejected one leaves the state bitwise unchanged.
    const MidlineState predicted = predict(state_, noise_);
    const GateResult result = gate(predicted, o, pose, noise_);
    if (result.accepted) {
        state_ = update(predicted, o, pose, noise_);
    }
    return result;
}

} // namespace pvtrack
