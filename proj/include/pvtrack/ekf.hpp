#pragma once

#include <cstdint>

#include "pvtrack/geometry.hpp"

namespace pvtrack {

struct Vec2 {
    double a = 0.0;
    double b = 0.0;
};

/// Tiny symmetric-friendly 2x2 matrix; enough linear algebra for the filter.
struct Mat2 {
    double m00 = 0.0, m01 = 0.0, m10 = 0.0, m11 = 0.0;

    static Mat2 diag(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }
    static Mat2 identity() { return diag(1.0, 1.0); }

    double det() const { return m00 * m11 - m01 * m10; }
    double trace() const { return m00 + m11; }
    Mat2 transpose() const { return {m00, m10, m01, m11}; }
    Mat2 inverse() const;  // throws SingularObservation when not invertible

    Mat2 operator+(const Mat2& o) const { return {m00 + o.m00, m01 + o.m01, m10 + o.m10, m11 + o.m11}; }
    Mat2 operator-(const Mat2& o) const { return {m00 - o.m00, m01 - o.m01, m10 - o.m10, m11 - o.m11}; }
    Mat2 operator*(const Mat2& o) const {
        return {m00 * o.m00 + m01 * o.m10, m00 * o.m01 + m01 * o.m11,
                m10 * o.m00 + m11 * o.m10, m10 * o.m01 + m11 * o.m11};
    }
    Vec2 operator*(const Vec2& v) const { return {m00 * v.a + m01 * v.b, m10 * v.a + m11 * v.b}; }

    /// Eigenvalues of the symmetric part, ascending.
    void sym_eigenvalues(double& lo, double& hi) const;
};

enum class Sensor : std::uint8_t { Thermal, Rgb };

/// Estimated PV-row midline in the world frame with its 2x2 covariance.
struct MidlineState {
    WorldLine line;
    Mat2 covariance;
};

struct Observation {
    CameraLine line;
    Sensor sensor = Sensor::Thermal;
    double timestamp = 0.0;
};

struct NoiseConfig {
    Mat2 process = Mat2::diag(1e-8, 1e-8);        // Q per prediction step
    Mat2 r_thermal = Mat2::diag(4e-4, 1e-2);
    Mat2 r_rgb = Mat2::diag(9e-4, 2e-2);
    double gate_threshold = 9.21;                 // chi-square (2 dof) at 99%

    const Mat2& measurement(Sensor s) const { return s == Sensor::Thermal ? r_thermal : r_rgb; }
    void validate() const;
};

/// Covariance assigned to a waypoint-derived initial state; waypoints can be
/// meters off, so the prior is wide.
inline constexpr double kPriorSlopeVar = 0.25;
inline constexpr double kPriorInterceptVar = 4.0;

MidlineState init_from_waypoints(WorldPoint start, WorldPoint end,
                                 Mat2 prior = Mat2::diag(kPriorSlopeVar, kPriorInterceptVar));

/// Prediction step: the midline is static in the world frame, so the mean is
/// unchanged and only Q accumulates.
MidlineState predict(const MidlineState& s, const NoiseConfig& noise);

/// Analytic Jacobian of the world-to-camera line map at (state, pose).
Mat2 jacobian_h(const MidlineState& s, const Pose2D& pose);

struct GateResult {
    bool accepted = false;
    Vec2 innovation;
    double mahalanobis_sq = 0.0;
};

GateResult gate(const MidlineState& s, const Observation& o, const Pose2D& pose,
                const NoiseConfig& noise);

/// EKF correction; call only with observations the gate accepted.
MidlineState update(const MidlineState& s, const Observation& o, const Pose2D& pose,
                    const NoiseConfig& noise);

/// Single-owner filter wrapper used by the mission loop: predicts, gates and
/// conditionally updates per observation.
class MidlineTracker {
public:
    explicit MidlineTracker(NoiseConfig noise = {}) : noise_(noise) { noise_.validate(); }

    void reinit(WorldPoint start, WorldPoint end) { state_ = init_from_waypoints(start, end); }

    GateResult feed(const Observation& o, const Pose2D& pose);

    const MidlineState& state() const { return state_; }
    const NoiseConfig& noise() const { return noise_; }
    double covariance_trace() const { return state_.covariance.trace(); }

private:
    MidlineState state_;
    NoiseConfig noise_;
};

} // namespace pvtrack
