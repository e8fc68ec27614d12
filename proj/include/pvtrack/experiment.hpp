#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pvtrack/costs.hpp"
#include "pvtrack/ekf.hpp"
#include "pvtrack/follower.hpp"
#include "pvtrack/mission.hpp"
#include "pvtrack/sim.hpp"

namespace pvtrack {

enum class CameraMode : std::uint8_t { Thermal, Rgb, Both };

const char* camera_mode_name(CameraMode m);

struct EkfSettings {
    double process = 1e-8;
    double r_thermal_a = 4e-4, r_thermal_b = 1e-2;
    double r_rgb_a = 9e-4, r_rgb_b = 2e-2;
    double gate = 9.21;

    NoiseConfig to_noise() const;
};

struct WaypointError {
    double dx = 0.0;
    double dy = 0.0;
    double dtheta = 0.0;       // radians
    double jitter_sigma = 0.0;
};

struct ExperimentConfig {
    CameraMode camera = CameraMode::Both;
    std::uint64_t seed = 1;

    PlantLayout layout;
    Mission mission;  // empty -> boustrophedon over the layout rows
    ImageGeometry geometry;

    GpsModel gps;
    ThresholdSet thresholds;
    CarrotConfig follower;
    MissionRules rules;
    EkfSettings ekf;
    DynamicsLimits dynamics;
    double tau = 0.5;

    std::optional<WaypointError> waypoint_error;
    double time_limit = 900.0;        // simulated seconds
    double min_speed_fraction = 0.9;  // of cruise, for the metrics window

    static ExperimentConfig defaults();
};

/// Boustrophedon start/end pairs over the layout rows, in order.
Mission boustrophedon_mission(const PlantLayout& layout);

/// One control-rate sample of everything the metrics and plots need.
struct TraceStep {
    double t = 0.0;
    Phase phase = Phase::Hold;
    int row = 0;
    double true_x = 0.0, true_y = 0.0, true_yaw = 0.0;
    double gps_x = 0.0, gps_y = 0.0, gps_yaw = 0.0;
    double speed = 0.0;
    double est_a = 0.0, est_b = 0.0;
    double p_aa = 0.0, p_ab = 0.0, p_bb = 0.0;
    double row_a = 0.0, row_b = 0.0;  // true midline of the current row
    double ctrl_e = 0.0;              // distance to the estimated line (NaN outside tracking)
    double nav_xi = 0.0;              // distance to the true midline segment
    double cmd_vx = 0.0, cmd_vy = 0.0;  // camera frame
    bool in_window = false;
};

struct TraceObservation {
    double t = 0.0;
    Sensor sensor = Sensor::Thermal;
    double a = 0.0, b = 0.0;  // camera frame
    bool accepted = false;
    double mahalanobis_sq = 0.0;
};

struct RowMetrics {
    int row = -1;  // -1 = overall
    double mu_e = 0.0;     // mean |e| over the window
    double sigma_e = 0.0;  // std of |e| over the window
    double rmse = 0.0;     // sqrt(mean xi^2) over the window
    int samples = 0;
};

struct RunMetrics {
    RowMetrics overall;
    std::vector<RowMetrics> per_row;
    bool completed = false;
    int rows_completed = 0;
    double wall_seconds = 0.0;
    double sim_seconds = 0.0;
};

struct RunResult {
    RunMetrics metrics;
    std::vector<TraceStep> steps;
    std::vector<TraceObservation> observations;
    std::vector<MissionEvent> events;
};

/// Deterministic closed-loop run: simulator frames at 3 fps (thermal) and
/// 5 fps (RGB), control at 5 Hz, all on one fixed 15 Hz grid.
RunResult run_experiment(const ExperimentConfig& cfg);

/// Control-error and navigation metrics over the tracking windows (TrackRow
/// phase at cruise speed). Throws EmptyWindow when no sample qualifies.
RunMetrics compute_metrics(const std::vector<TraceStep>& steps);

// Versioned CSV trace and metrics files.
void write_trace_csv(const std::string& path, const RunResult& result);
std::vector<TraceStep> read_trace_csv(const std::string& path);
void write_metrics_csv(const std::string& path, const RunMetrics& metrics);

} // namespace pvtrack
