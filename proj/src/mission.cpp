#include "pvtrack/mission.hpp"

#include <cmath>

#include "pvtrack/errors.hpp"

namespace pvtrack {

const char* phase_name(Phase p) {
    switch (p) {
        case Phase::Hold: return "hold";
        case Phase::TrackRow: return "track";
        case Phase::Transit: return "transit";
        case Phase::Done: return "done";
    }
    return "?";
}

void validate_mission(const Mission& mission, double min_separation) {
    const auto& wps = mission.waypoints;
    if (wps.size() < 2) throw MalformedMission("mission needs at least one start/end pair");
    if (wps.size() % 2 != 0) throw MalformedMission("mission must have an even waypoint count");
    for (size_t i = 0; i < wps.size(); ++i) {
        const WaypointLabel expected = (i % 2 == 0) ? WaypointLabel::PvStart : WaypointLabel::PvEnd;
        if (wps[i].label != expected) {
            throw MalformedMission("labels must alternate start, end, start, end, ...");
        }
    }
    for (size_t i = 0; i + 1 < wps.size(); i += 2) {
        const double dx = wps[i + 1].position.x - wps[i].position.x;
        const double dy = wps[i + 1].position.y - wps[i].position.y;
        if (std::hypot(dx, dy) < min_separation) {
            throw MalformedMission("start/end pair closer than the minimum row length");
        }
    }
}

namespace {

double heading_of(WorldPoint from, WorldPoint to) {
    return std::atan2(to.y - from.y, to.x - from.x);
}

void emit(std::vector<MissionEvent>* events, double time, const char* kind, int row, Phase phase) {
    if (events) events->push_back(MissionEvent{time, kind, row, phase});
}

} // namespace

MissionState make_initial_state(const Mission& mission, double start_time) {
    validate_mission(mission);
    MissionState state;
    state.phase = Phase::Hold;
    state.row = 0;
    state.phase_entry_time = start_time;
    state.pending_reinit = true;
    return state;
}

void mission_observe(MissionState& state, bool accepted) {
    if (state.phase != Phase::TrackRow) return;
    state.consecutive_rejections = accepted ? 0 : state.consecutive_rejections + 1;
}

Directive mission_step(MissionState& state, const Mission& mission, const Pose2D& gps,
                       double covariance_trace, double time, const MissionRules& rules,
                       std::vector<MissionEvent>* events) {
    Directive directive;

    const auto enter_hold = [&](int row) {
        state.phase = Phase::Hold;
        state.row = row;
        state.phase_entry_time = time;
        state.pending_reinit = true;
        emit(events, time, "phase", row, Phase::Hold);
    };

    // Leave the finished row: transit to the next start, or finish. The
    // transit target is this GPS pose plus the waypoint-relative offset, so
    // the jump only relies on locally coherent GPS and waypoint errors.
    const auto leave_row = [&] {
        if (state.row + 1 >= mission.row_count()) {
            state.phase = Phase::Done;
            state.phase_entry_time = time;
            emit(events, time, "phase", state.row, Phase::Done);
            return;
        }
        const WorldPoint from = mission.end_of(state.row).position;
        const WorldPoint to = mission.start_of(state.row + 1).position;
        state.transit_target = WorldPoint{gps.x + (to.x - from.x), gps.y + (to.y - from.y)};
        state.phase = Phase::Transit;
        state.row += 1;
        state.phase_entry_time = time;
        emit(events, time, "phase", state.row, Phase::Transit);
    };

    if (state.pending_reinit && state.phase == Phase::Hold) {
        state.pending_reinit = false;
        directive.reinit = std::make_pair(mission.start_of(state.row).position,
                                          mission.end_of(state.row).position);
    }

    switch (state.phase) {
        case Phase::Hold: {
            directive.mode = Directive::Mode::Hover;
            directive.use_observations = true;
            directive.desired_heading = heading_of(mission.start_of(state.row).position,
                                                   mission.end_of(state.row).position);
            if (covariance_trace < rules.hold_trace_threshold) {
                state.phase = Phase::TrackRow;
                state.phase_entry_time = time;
                state.track_entry_gps = gps;
                state.traveled = 0.0;
                state.consecutive_rejections = 0;
                const WorldPoint a = mission.start_of(state.row).position;
                const WorldPoint b = mission.end_of(state.row).position;
                state.row_length = std::hypot(b.x - a.x, b.y - a.y);
                emit(events, time, "phase", state.row, Phase::TrackRow);
            } else if (time - state.phase_entry_time > rules.hold_timeout) {
                emit(events, time, "row_aborted", state.row, Phase::Hold);
                leave_row();
            }
            break;
        }
        case Phase::TrackRow: {
            directive.mode = Directive::Mode::FollowLine;
            directive.use_observations = true;
            directive.desired_heading = heading_of(mission.start_of(state.row).position,
                                                   mission.end_of(state.row).position);
            const WorldPoint a = mission.start_of(state.row).position;
            const WorldPoint b = mission.end_of(state.row).position;
            const double ux = (b.x - a.x) / state.row_length;
            const double uy = (b.y - a.y) / state.row_length;
            const double along = (gps.x - state.track_entry_gps.x) * ux +
                                 (gps.y - state.track_entry_gps.y) * uy;
            state.traveled = std::max(state.traveled, along);
            if (state.traveled >= state.row_length) {
                leave_row();
            } else if (state.consecutive_rejections >= rules.abort_after_rejections) {
                emit(events, time, "row_aborted", state.row, Phase::TrackRow);
                leave_row();
            }
            break;
        }
        case Phase::Transit: {
            directive.mode = Directive::Mode::GotoPoint;
            directive.target = state.transit_target;
            directive.use_observations = false;
            directive.desired_heading =
                heading_of(WorldPoint{gps.x, gps.y}, state.transit_target);
            const double dist = std::hypot(state.transit_target.x - gps.x,
                                           state.transit_target.y - gps.y);
            if (dist <= rules.arrival_radius) {
                enter_hold(state.row);
                directive.mode = Directive::Mode::Hover;
                directive.use_observations = true;
                if (state.pending_reinit) {
                    state.pending_reinit = false;
                    directive.reinit = std::make_pair(mission.start_of(state.row).position,
                                                      mission.end_of(state.row).position);
                }
            }
            break;
        }
        case Phase::Done:
            directive.mode = Directive::Mode::Hover;
            directive.use_observations = false;
            break;
    }
    return directive;
}

} // namespace pvtrack
