#include "pvtrack/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "pvtrack/errors.hpp"
#include "pvtrack/rgb.hpp"
#include "pvtrack/rng.hpp"
#include "pvtrack/thermal.hpp"

namespace pvtrack {

const char* camera_mode_name(CameraMode m) {
    switch (m) {
        case CameraMode::Thermal: return "thermal";
        case CameraMode::Rgb: return "rgb";
        case CameraMode::Both: return "both";
    }
    return "?";
}

NoiseConfig EkfSettings::to_noise() const {
    NoiseConfig noise;
    noise.process = Mat2::diag(process, process);
    noise.r_thermal = Mat2::diag(r_thermal_a, r_thermal_b);
    noise.r_rgb = Mat2::diag(r_rgb_a, r_rgb_b);
    noise.gate_threshold = gate;
    noise.validate();
    return noise;
}

ExperimentConfig ExperimentConfig::defaults() {
    ExperimentConfig cfg;
    cfg.layout = default_layout();
    cfg.mission = boustrophedon_mission(cfg.layout);
    return cfg;
}

Mission boustrophedon_mission(const PlantLayout& layout) {
    Mission mission;
    for (size_t i = 0; i < layout.rows.size(); ++i) {
        const PlantRow& row = layout.rows[i];
        const bool forward = i % 2 == 0;
        mission.waypoints.push_back({forward ? row.start : row.end, WaypointLabel::PvStart});
        mission.waypoints.push_back({forward ? row.end : row.start, WaypointLabel::PvEnd});
    }
    return mission;
}

namespace {

// Base tick of the scheduler; 5 Hz control, 5 fps RGB and 3 fps thermal all
// divide it, so every event lands exactly on the grid.
constexpr int kBaseHz = 15;
constexpr int kControlEvery = 3;  // 5 Hz
constexpr int kRgbEvery = 3;      // 5 fps
constexpr int kThermalEvery = 5;  // 3 fps
constexpr double kGotoGain = 0.8;

struct FrameFeed {
    int accepted = 0;
    int rejected = 0;
};

double aligned_line_heading(const WorldLine& line, double reference_heading) {
    double heading = std::atan2(line.slope, 1.0);
    // The line direction is only defined modulo pi; pick the half that
    // matches the direction of travel.
    if (std::cos(heading - reference_heading) < 0.0) {
        heading = normalize_angle(heading + M_PI);
    }
    return heading;
}

} // namespace

RunResult run_experiment(const ExperimentConfig& cfg) {
    const auto wall_start = std::chrono::steady_clock::now();

    Mission mission = cfg.mission.waypoints.empty() ? boustrophedon_mission(cfg.layout)
                                                    : cfg.mission;
    if (cfg.waypoint_error) {
        const WaypointError& err = *cfg.waypoint_error;
        mission = inject_waypoint_error(mission, err.dx, err.dy, err.dtheta, err.jitter_sigma,
                                        derive_stream(cfg.seed, "waypoint-error"));
    }
    validate_mission(mission);
    if (mission.row_count() > static_cast<int>(cfg.layout.rows.size())) {
        throw ConfigError("mission has more rows than the plant layout");
    }

    ImageGeometry geom = cfg.geometry;
    GpsModel gps_model = cfg.gps;
    gps_model.seed = derive_stream(cfg.seed, "gps");
    GpsSim gps(gps_model);

    // The operator flies to the first start by GPS, so the true position
    // starts offset by the (unknown to the vehicle) GPS bias.
    UavState uav;
    uav.tau = cfg.tau;
    uav.pose.x = mission.start_of(0).position.x - gps_model.bias_x;
    uav.pose.y = mission.start_of(0).position.y - gps_model.bias_y;
    uav.pose.theta = std::atan2(
        mission.end_of(0).position.y - mission.start_of(0).position.y,
        mission.end_of(0).position.x - mission.start_of(0).position.x);
    uav.pose.ground_z = geom.ground_distance;

    MidlineTracker tracker(cfg.ekf.to_noise());
    MissionState mstate = make_initial_state(mission);
    PidState pid;
    DetectConfig detect = cfg.layout.rows.empty()
                              ? DetectConfig{}
                              : DetectConfig::for_geometry(geom, cfg.layout.rows[0].panel_width,
                                                           cfg.layout.rows[0].panel_length);

    const std::uint64_t thermal_stream = derive_stream(cfg.seed, "render-thermal");
    const std::uint64_t rgb_stream = derive_stream(cfg.seed, "render-rgb");

    RunResult result;
    Directive directive;  // Hover, no observations, until the first control tick
    VelocityCommand cmd_world;
    VelocityCommand cmd_camera;
    double desired_heading = uav.pose.theta;
    Phase prev_phase = Phase::Hold;
    std::uint64_t thermal_frame = 0;
    std::uint64_t rgb_frame = 0;

    const double dt_base = 1.0 / kBaseHz;
    const double dt_control = dt_base * kControlEvery;
    const auto max_ticks = static_cast<std::uint64_t>(cfg.time_limit * kBaseHz);

    const auto feed_lines = [&](const std::vector<ObservedLine>& lines, Sensor sensor,
                                const Pose2D& gps_pose, double t) {
        for (const ObservedLine& line : lines) {
            CameraLine camera_line;
            try {
                camera_line = line_from_camera_points(pixel_to_camera(line.p1, geom),
                                                      pixel_to_camera(line.p2, geom));
            } catch (const NearVerticalLine&) {
                continue;  // perpendicular to the flight direction, spurious
            }
            const Observation obs{camera_line, sensor, t};
            GateResult gr;
            try {
                gr = tracker.feed(obs, gps_pose);
            } catch (const SingularObservation&) {
                continue;
            }
            mission_observe(mstate, gr.accepted);
            result.observations.push_back(TraceObservation{
                t, sensor, camera_line.slope, camera_line.intercept, gr.accepted,
                gr.mahalanobis_sq});
        }
    };

    for (std::uint64_t tick = 0; tick <= max_ticks; ++tick) {
        const double t = static_cast<double>(tick) * dt_base;
        Pose2D gps_pose = gps.read(uav.pose, t);
        gps_pose.ground_z = geom.ground_distance;

        const bool control_tick = tick % kControlEvery == 0;
        if (control_tick) {
            directive = mission_step(mstate, mission, gps_pose, tracker.covariance_trace(), t,
                                     cfg.rules, &result.events);
            if (directive.reinit) {
                tracker.reinit(directive.reinit->first, directive.reinit->second);
            }
            if (mstate.phase != prev_phase) {
                pid = PidState{};  // fresh integrator per phase
                prev_phase = mstate.phase;
            }
        }

        if (directive.use_observations) {
            if (tick % kThermalEvery == 0 &&
                (cfg.camera == CameraMode::Thermal || cfg.camera == CameraMode::Both)) {
                const GrayImage frame = render_thermal(cfg.layout, uav.pose, geom,
                                                       hash_mix(thermal_stream, thermal_frame++));
                feed_lines(detect_thermal(frame, cfg.thresholds.thermal, detect).lines,
                           Sensor::Thermal, gps_pose, t);
            }
            if (tick % kRgbEvery == 0 &&
                (cfg.camera == CameraMode::Rgb || cfg.camera == CameraMode::Both)) {
                const RgbImage frame = render_rgb(cfg.layout, uav.pose, geom,
                                                  hash_mix(rgb_stream, rgb_frame++));
                feed_lines(detect_rgb(frame, cfg.thresholds.hsv, detect).lines, Sensor::Rgb,
                           gps_pose, t);
            }
        }

        if (control_tick) {
            double ctrl_e = std::numeric_limits<double>::quiet_NaN();
            cmd_world = VelocityCommand{};
            cmd_camera = VelocityCommand{};
            desired_heading = directive.desired_heading;

            switch (directive.mode) {
                case Directive::Mode::Hover:
                    break;
                case Directive::Mode::FollowLine: {
                    try {
                        const CameraLine line_c =
                            world_line_to_camera(tracker.state().line, gps_pose);
                        ctrl_e = cross_track_error(line_c);
                        cmd_camera = follow_step(line_c, cfg.follower, dt_control, pid);
                        const double c = std::cos(uav.pose.theta);
                        const double s = std::sin(uav.pose.theta);
                        cmd_world = VelocityCommand{c * cmd_camera.vx - s * cmd_camera.vy,
                                                    s * cmd_camera.vx + c * cmd_camera.vy};
                        desired_heading = aligned_line_heading(tracker.state().line,
                                                               directive.desired_heading);
                    } catch (const SingularObservation&) {
                        // Estimate maps degenerately at this yaw; hold and let
                        // the yaw servo bring the line back into range.
                    }
                    break;
                }
                case Directive::Mode::GotoPoint: {
                    const double ex = directive.target.x - gps_pose.x;
                    const double ey = directive.target.y - gps_pose.y;
                    const double dist = std::hypot(ex, ey);
                    if (dist > 1e-9) {
                        const double v = std::min(cfg.follower.cruise_speed, kGotoGain * dist);
                        cmd_world = VelocityCommand{v * ex / dist, v * ey / dist};
                        const double c = std::cos(uav.pose.theta);
                        const double s = std::sin(uav.pose.theta);
                        cmd_camera = VelocityCommand{c * cmd_world.vx + s * cmd_world.vy,
                                                     -s * cmd_world.vx + c * cmd_world.vy};
                    }
                    break;
                }
            }

            const int metric_row = std::min(mstate.row, mission.row_count() - 1);
            TraceStep step;
            step.t = t;
            step.phase = mstate.phase;
            step.row = mstate.row;
            step.true_x = uav.pose.x;
            step.true_y = uav.pose.y;
            step.true_yaw = uav.pose.theta;
            step.gps_x = gps_pose.x;
            step.gps_y = gps_pose.y;
            step.gps_yaw = gps_pose.theta;
            step.speed = uav.speed();
            step.est_a = tracker.state().line.slope;
            step.est_b = tracker.state().line.intercept;
            step.p_aa = tracker.state().covariance.m00;
            step.p_ab = tracker.state().covariance.m01;
            step.p_bb = tracker.state().covariance.m11;
            const WorldLine true_line = cfg.layout.midline(metric_row);
            step.row_a = true_line.slope;
            step.row_b = true_line.intercept;
            step.ctrl_e = ctrl_e;
            step.nav_xi = cfg.layout.midline_distance(metric_row,
                                                      WorldPoint{uav.pose.x, uav.pose.y});
            step.cmd_vx = cmd_camera.vx;
            step.cmd_vy = cmd_camera.vy;
            step.in_window = mstate.phase == Phase::TrackRow &&
                             step.speed >= cfg.min_speed_fraction * cfg.follower.cruise_speed;
            result.steps.push_back(step);

            if (mstate.phase == Phase::Done) break;
        }

        uav = step_dynamics(uav, cmd_world, desired_heading, dt_base, cfg.dynamics);
    }

    try {
        result.metrics = compute_metrics(result.steps);
    } catch (const EmptyWindow&) {
        // A run that never tracked still returns its trace; the metrics stay
        // empty (samples = 0) so downstream checks fail loudly, not silently.
        result.metrics = RunMetrics{};
        result.metrics.overall.mu_e = std::numeric_limits<double>::quiet_NaN();
        result.metrics.overall.sigma_e = std::numeric_limits<double>::quiet_NaN();
        result.metrics.overall.rmse = std::numeric_limits<double>::quiet_NaN();
    }
    result.metrics.completed = !result.steps.empty() && result.steps.back().phase == Phase::Done;
    int rows_done = 0;
    for (const MissionEvent& event : result.events) {
        if (event.kind == "phase" && (event.phase == Phase::Transit || event.phase == Phase::Done)) {
            ++rows_done;
        }
        if (event.kind == "row_aborted") --rows_done;
    }
    result.metrics.rows_completed = std::max(0, rows_done);
    result.metrics.sim_seconds = result.steps.empty() ? 0.0 : result.steps.back().t;
    result.metrics.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
    return result;
}

RunMetrics compute_metrics(const std::vector<TraceStep>& steps) {
    struct Accumulator {
        double sum_abs_e = 0.0, sum_sq_e = 0.0;
        double sum_sq_xi = 0.0;
        int n = 0;

        RowMetrics finish(int row) const {
            RowMetrics m;
            m.row = row;
            m.samples = n;
            if (n > 0) {
                m.mu_e = sum_abs_e / n;
                const double var = sum_sq_e / n - m.mu_e * m.mu_e;
                m.sigma_e = std::sqrt(std::max(0.0, var));
                m.rmse = std::sqrt(sum_sq_xi / n);
            }
            return m;
        }
    };

    Accumulator overall;
    std::map<int, Accumulator> per_row;
    for (const TraceStep& step : steps) {
        if (!step.in_window || std::isnan(step.ctrl_e)) continue;
        const double abs_e = std::abs(step.ctrl_e);
        for (Accumulator* acc : {&overall, &per_row[step.row]}) {
            acc->sum_abs_e += abs_e;
            acc->sum_sq_e += abs_e * abs_e;
            acc->sum_sq_xi += step.nav_xi * step.nav_xi;
            acc->n += 1;
        }
    }
    if (overall.n == 0) {
        throw EmptyWindow("no tracking samples at cruise speed in the trace");
    }

    RunMetrics metrics;
    metrics.overall = overall.finish(-1);
    for (const auto& [row, acc] : per_row) {
        metrics.per_row.push_back(acc.finish(row));
    }
    return metrics;
}

namespace {

std::string fmt_double(double value) {
    if (std::isnan(value)) return "";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double parse_double(const std::string& field) {
    if (field.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::strtod(field.c_str(), nullptr);
}

Phase phase_from_name(const std::string& name) {
    if (name == "hold") return Phase::Hold;
    if (name == "track") return Phase::TrackRow;
    if (name == "transit") return Phase::Transit;
    if (name == "done") return Phase::Done;
    throw IoError("unknown phase in trace: " + name);
}

} // namespace

void write_trace_csv(const std::string& path, const RunResult& result) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "# pvnav-trace v1\n";
    out << "kind,t,phase,row,true_x,true_y,true_yaw,gps_x,gps_y,gps_yaw,speed,"
           "est_a,est_b,p_aa,p_ab,p_bb,row_a,row_b,ctrl_e,nav_xi,cmd_vx,cmd_vy,in_window,"
           "sensor,obs_a,obs_b,obs_accepted,mahalanobis_sq\n";

    size_t obs_idx = 0;
    const auto write_obs = [&](const TraceObservation& obs) {
        out << "obs," << fmt_double(obs.t);
        for (int i = 2; i <= 22; ++i) out << ',';  // step-only columns stay empty
        out << ',' << (obs.sensor == Sensor::Thermal ? "thermal" : "rgb") << ','
            << fmt_double(obs.a) << ',' << fmt_double(obs.b) << ','
            << (obs.accepted ? 1 : 0) << ',' << fmt_double(obs.mahalanobis_sq) << '\n';
    };
    for (const TraceStep& step : result.steps) {
        while (obs_idx < result.observations.size() &&
               result.observations[obs_idx].t <= step.t) {
            write_obs(result.observations[obs_idx++]);
        }
        out << "step," << fmt_double(step.t) << ',' << phase_name(step.phase) << ','
            << step.row << ',' << fmt_double(step.true_x) << ',' << fmt_double(step.true_y)
            << ',' << fmt_double(step.true_yaw) << ',' << fmt_double(step.gps_x) << ','
            << fmt_double(step.gps_y) << ',' << fmt_double(step.gps_yaw) << ','
            << fmt_double(step.speed) << ',' << fmt_double(step.est_a) << ','
            << fmt_double(step.est_b) << ',' << fmt_double(step.p_aa) << ','
            << fmt_double(step.p_ab) << ',' << fmt_double(step.p_bb) << ','
            << fmt_double(step.row_a) << ',' << fmt_double(step.row_b) << ','
            << fmt_double(step.ctrl_e) << ',' << fmt_double(step.nav_xi) << ','
            << fmt_double(step.cmd_vx) << ',' << fmt_double(step.cmd_vy) << ','
            << (step.in_window ? 1 : 0) << ",,,,,\n";
    }
    while (obs_idx < result.observations.size()) {
        write_obs(result.observations[obs_idx++]);
    }
    if (!out) throw IoError(path + ": write failed");
}

std::vector<TraceStep> read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("# pvnav-trace v1", 0) != 0) {
        throw IoError(path + ": missing pvnav-trace v1 header");
    }
    std::getline(in, line);  // column header

    std::vector<TraceStep> steps;
    std::vector<std::string> fields;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        fields.clear();
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        fields.resize(28);
        if (fields[0] != "step") continue;

        TraceStep step;
        step.t = parse_double(fields[1]);
        step.phase = phase_from_name(fields[2]);
        step.row = static_cast<int>(std::strtol(fields[3].c_str(), nullptr, 10));
        step.true_x = parse_double(fields[4]);
        step.true_y = parse_double(fields[5]);
        step.true_yaw = parse_double(fields[6]);
        step.gps_x = parse_double(fields[7]);
        step.gps_y = parse_double(fields[8]);
        step.gps_yaw = parse_double(fields[9]);
        step.speed = parse_double(fields[10]);
        step.est_a = parse_double(fields[11]);
        step.est_b = parse_double(fields[12]);
        step.p_aa = parse_double(fields[13]);
        step.p_ab = parse_double(fields[14]);
        step.p_bb = parse_double(fields[15]);
        step.row_a = parse_double(fields[16]);
        step.row_b = parse_double(fields[17]);
        step.ctrl_e = parse_double(fields[18]);
        step.nav_xi = parse_double(fields[19]);
        step.cmd_vx = parse_double(fields[20]);
        step.cmd_vy = parse_double(fields[21]);
        step.in_window = fields[22] == "1";
        steps.push_back(step);
    }
    return steps;
}

void write_metrics_csv(const std::string& path, const RunMetrics& metrics) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "# pvnav-metrics v1\n";
    out << "scope,row,mu_e,sigma_e,rmse,samples\n";
    const auto write_row = [&](const char* scope, const RowMetrics& m) {
        out << scope << ',';
        if (m.row >= 0) out << m.row;
        out << ',' << fmt_double(m.mu_e) << ',' << fmt_double(m.sigma_e) << ','
            << fmt_double(m.rmse) << ',' << m.samples << '\n';
    };
    write_row("overall", metrics.overall);
    for (const RowMetrics& m : metrics.per_row) write_row("row", m);
    if (!out) throw IoError(path + ": write failed");
}

} // namespace pvtrack
