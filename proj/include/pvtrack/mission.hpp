#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pvtrack/ekf.hpp"
#include "pvtrack/geometry.hpp"

namespace pvtrack {

enum class WaypointLabel : std::uint8_t { PvStart, PvEnd };

struct Waypoint {
    WorldPoint position;
    WaypointLabel label = WaypointLabel::PvStart;
};

/// Alternating PvStart/PvEnd pairs; pair i delimits row i.
struct Mission {
    std::vector<Waypoint> waypoints;

    int row_count() const { return static_cast<int>(waypoints.size() / 2); }
    const Waypoint& start_of(int row) const { return waypoints[2 * static_cast<size_t>(row)]; }
    const Waypoint& end_of(int row) const { return waypoints[2 * static_cast<size_t>(row) + 1]; }
};

/// Throws MalformedMission unless the sequence is an even count >= 2 of
/// strictly alternating labels starting with PvStart, each pair at least
/// min_separation apart.
void validate_mission(const Mission& mission, double min_separation = 1.0);

enum class Phase : std::uint8_t { Hold, TrackRow, Transit, Done };

const char* phase_name(Phase p);

struct MissionRules {
    double hold_trace_threshold = 0.5;  // trace(P) below which tracking starts
    double arrival_radius = 1.0;        // meters, transit arrival test
    double hold_timeout = 30.0;         // seconds before a row is abandoned
    int abort_after_rejections = 120;   // consecutive gate rejections mid-row
};

struct MissionState {
    Phase phase = Phase::Hold;
    int row = 0;
    double traveled = 0.0;          // meters along the row, GPS-projected
    double row_length = 0.0;        // |start - end| of the current pair
    Pose2D track_entry_gps;         // GPS pose when tracking started
    WorldPoint transit_target;      // GPS-frame target while in transit
    double phase_entry_time = 0.0;
    int consecutive_rejections = 0;
    bool pending_reinit = true;     // emit an EKF re-init on the next step
};

struct MissionEvent {
    double time = 0.0;
    std::string kind;  // "phase", "row_aborted"
    int row = 0;
    Phase phase = Phase::Hold;
};

/// What the control loop should do this cycle.
struct Directive {
    enum class Mode : std::uint8_t { Hover, FollowLine, GotoPoint } mode = Mode::Hover;
    WorldPoint target;                // GPS-frame, GotoPoint only
    double desired_heading = 0.0;     // radians, world frame
    bool use_observations = false;    // feed camera observations to the EKF
    std::optional<std::pair<WorldPoint, WorldPoint>> reinit;  // waypoint pair
};

MissionState make_initial_state(const Mission& mission, double start_time = 0.0);

/// Advance the two-phase state machine from the current GPS pose and filter
/// covariance. Transit targets are expressed relative to the GPS pose at the
/// row end, so a constant GPS bias cancels out of the row-to-row jump.
Directive mission_step(MissionState& state, const Mission& mission, const Pose2D& gps,
                       double covariance_trace, double time, const MissionRules& rules,
                       std::vector<MissionEvent>* events = nullptr);

/// Report a gate outcome for abort bookkeeping during TrackRow.
void mission_observe(MissionState& state, bool accepted);

} // namespace pvtrack
