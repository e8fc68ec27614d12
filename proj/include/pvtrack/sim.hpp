#pragma once

#include <cstdint>
#include <vector>

#include "pvtrack/follower.hpp"
#include "pvtrack/geometry.hpp"
#include "pvtrack/mission.hpp"
#include "pvtrack/raster.hpp"
#include "pvtrack/rng.hpp"

namespace pvtrack {

// Desk-scale stand-in for a field rig: renders paired thermal/RGB nadir
// frames of a parameterized plant, integrates simple vehicle dynamics and
// produces biased GPS readings. Everything is a pure function of its seed.

struct PlantRow {
    WorldPoint start;
    WorldPoint end;
    double panel_width = 2.0;    // meters across the row
    double panel_length = 2.0;   // meters per module along the row
    double junction_gap = 0.06;  // meters between modules
    int thermal_lo = 150;        // per-row thermal intensity band
    int thermal_hi = 190;
};

struct GroundModel {
    double thermal_mean = 90.0;
    double thermal_amplitude = 25.0;  // low-frequency field, +- around the mean
    double speckle_sigma = 4.0;       // per-pixel, thermal
    double cell_m = 4.0;              // low-frequency lattice pitch
    // HSV field ranges for the ground (brownish/green)
    double hue_lo = 25.0, hue_hi = 140.0;
    double sat_lo = 40.0, sat_hi = 110.0;
    double val_lo = 60.0, val_hi = 150.0;
};

struct PanelColorModel {
    double hue_lo = 205.0, hue_hi = 235.0;  // bluish modules
    double sat_lo = 130.0, sat_hi = 210.0;
    double val_lo = 90.0, val_hi = 180.0;
    double value_speckle_sigma = 3.0;  // per-pixel, on V
};

struct GlareModel {
    bool enabled = false;
    double coverage = 0.2;  // fraction of the frame under glare ellipses
};

struct PlantLayout {
    std::vector<PlantRow> rows;
    GroundModel ground;
    PanelColorModel panel;
    GlareModel glare;
    std::uint64_t scene_seed = 1;

    WorldPoint centroid() const;
    /// Orthogonal distance from a point to row i's midline segment.
    double midline_distance(int row, WorldPoint p) const;
    /// Slope/intercept of row i's midline; throws NearVerticalLine when the
    /// row runs vertically in the world frame.
    WorldLine midline(int row) const;
    double row_heading(int row) const;
};

/// Four 60 m rows, 6 m apart, running along +x.
PlantLayout default_layout();

GrayImage render_thermal(const PlantLayout& layout, const Pose2D& pose,
                         const ImageGeometry& geom, std::uint64_t seed);

RgbImage render_rgb(const PlantLayout& layout, const Pose2D& pose,
                    const ImageGeometry& geom, std::uint64_t seed);

/// Noise-free ground-truth mask of row pixels; excluding junction gaps gives
/// the thermal footprint, including them the RGB one.
BinaryMask render_row_mask(const PlantLayout& layout, const Pose2D& pose,
                           const ImageGeometry& geom, bool include_junctions);

// ---------------------------------------------------------------------------
// Vehicle dynamics
// ---------------------------------------------------------------------------

struct UavState {
    Pose2D pose;            // true pose
    double vx = 0.0;        // world-frame velocity
    double vy = 0.0;
    double tau = 0.5;       // first-order velocity time constant, seconds

    double speed() const;
};

struct DynamicsLimits {
    double max_speed = 2.0;      // m/s
    double max_yaw_rate = 0.5;   // rad/s
};

/// First-order velocity response toward the commanded world-frame velocity,
/// yaw servoed toward the desired heading at a bounded rate.
UavState step_dynamics(const UavState& s, VelocityCommand cmd_world, double desired_heading,
                       double dt, const DynamicsLimits& limits = {});

// ---------------------------------------------------------------------------
// GPS
// ---------------------------------------------------------------------------

struct GpsModel {
    double bias_x = 0.8;
    double bias_y = -0.6;
    double walk_sigma = 0.01;   // meters per sqrt(second)
    double white_sigma = 0.02;  // meters
    std::uint64_t seed = 1;
};

/// Stateful reading generator: constant bias + seeded random walk + white
/// noise, reproducible for a given seed and call sequence.
class GpsSim {
public:
    explicit GpsSim(const GpsModel& model);

    Pose2D read(const Pose2D& truth, double t);
    const GpsModel& model() const { return model_; }

private:
    GpsModel model_;
    double walk_x_ = 0.0;
    double walk_y_ = 0.0;
    double last_t_ = 0.0;
    bool started_ = false;
    Xoshiro256 rng_;
};

// ---------------------------------------------------------------------------
// Waypoint errors
// ---------------------------------------------------------------------------

/// Rigid rototranslation (rotation about the waypoint centroid, then a
/// translation) plus independent per-coordinate jitter.
Mission inject_waypoint_error(const Mission& mission, double dx, double dy, double dtheta,
                              double jitter_sigma, std::uint64_t seed);

} // namespace pvtrack
