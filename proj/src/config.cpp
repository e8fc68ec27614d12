#include "pvtrack/config.hpp"

#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "pvtrack/errors.hpp"

namespace pvtrack {

namespace {

using nlohmann::json;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return j;
}

void write_json(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError(path + ": write failed");
}

void expect_schema(const json& j, const std::string& schema, const std::string& context) {
    if (j.value("schema", "") != schema) {
        throw ConfigError(context + ": expected schema \"" + schema + "\"");
    }
}

json layout_to_json(const PlantLayout& layout) {
    json rows = json::array();
    for (const PlantRow& row : layout.rows) {
        rows.push_back({{"start", {row.start.x, row.start.y}},
                        {"end", {row.end.x, row.end.y}},
                        {"panel_width", row.panel_width},
                        {"panel_length", row.panel_length},
                        {"junction_gap", row.junction_gap},
                        {"thermal_band", {row.thermal_lo, row.thermal_hi}}});
    }
    const GroundModel& g = layout.ground;
    const PanelColorModel& p = layout.panel;
    return json{{"schema", "pvnav-layout-v1"},
                {"scene_seed", layout.scene_seed},
                {"rows", rows},
                {"ground",
                 {{"thermal_mean", g.thermal_mean},
                  {"thermal_amplitude", g.thermal_amplitude},
                  {"speckle_sigma", g.speckle_sigma},
                  {"cell_m", g.cell_m},
                  {"hue", {g.hue_lo, g.hue_hi}},
                  {"sat", {g.sat_lo, g.sat_hi}},
                  {"val", {g.val_lo, g.val_hi}}}},
                {"panel_color",
                 {{"hue", {p.hue_lo, p.hue_hi}},
                  {"sat", {p.sat_lo, p.sat_hi}},
                  {"val", {p.val_lo, p.val_hi}},
                  {"value_speckle_sigma", p.value_speckle_sigma}}},
                {"glare", {{"enabled", layout.glare.enabled}, {"coverage", layout.glare.coverage}}}};
}

PlantLayout layout_from_json(const json& j, const std::string& context) {
    expect_schema(j, "pvnav-layout-v1", context);
    PlantLayout layout;
    layout.scene_seed = j.value("scene_seed", std::uint64_t{1});
    for (const json& jr : j.at("rows")) {
        PlantRow row;
        row.start = {jr.at("start")[0].get<double>(), jr.at("start")[1].get<double>()};
        row.end = {jr.at("end")[0].get<double>(), jr.at("end")[1].get<double>()};
        row.panel_width = jr.value("panel_width", row.panel_width);
        row.panel_length = jr.value("panel_length", row.panel_length);
        row.junction_gap = jr.value("junction_gap", row.junction_gap);
        if (jr.contains("thermal_band")) {
            row.thermal_lo = jr["thermal_band"][0].get<int>();
            row.thermal_hi = jr["thermal_band"][1].get<int>();
        }
        layout.rows.push_back(row);
    }
    if (j.contains("ground")) {
        const json& jg = j["ground"];
        GroundModel& g = layout.ground;
        g.thermal_mean = jg.value("thermal_mean", g.thermal_mean);
        g.thermal_amplitude = jg.value("thermal_amplitude", g.thermal_amplitude);
        g.speckle_sigma = jg.value("speckle_sigma", g.speckle_sigma);
        g.cell_m = jg.value("cell_m", g.cell_m);
        if (jg.contains("hue")) { g.hue_lo = jg["hue"][0]; g.hue_hi = jg["hue"][1]; }
        if (jg.contains("sat")) { g.sat_lo = jg["sat"][0]; g.sat_hi = jg["sat"][1]; }
        if (jg.contains("val")) { g.val_lo = jg["val"][0]; g.val_hi = jg["val"][1]; }
    }
    if (j.contains("panel_color")) {
        const json& jp = j["panel_color"];
        PanelColorModel& p = layout.panel;
        if (jp.contains("hue")) { p.hue_lo = jp["hue"][0]; p.hue_hi = jp["hue"][1]; }
        if (jp.contains("sat")) { p.sat_lo = jp["sat"][0]; p.sat_hi = jp["sat"][1]; }
        if (jp.contains("val")) { p.val_lo = jp["val"][0]; p.val_hi = jp["val"][1]; }
        p.value_speckle_sigma = jp.value("value_speckle_sigma", p.value_speckle_sigma);
    }
    if (j.contains("glare")) {
        layout.glare.enabled = j["glare"].value("enabled", false);
        layout.glare.coverage = j["glare"].value("coverage", 0.2);
    }
    return layout;
}

json mission_to_json(const Mission& mission) {
    json wps = json::array();
    for (const Waypoint& wp : mission.waypoints) {
        wps.push_back({{"x", wp.position.x},
                       {"y", wp.position.y},
                       {"label", wp.label == WaypointLabel::PvStart ? "pv_start" : "pv_end"}});
    }
    return json{{"schema", "pvnav-mission-v1"}, {"waypoints", wps}};
}

Mission mission_from_json(const json& j, const std::string& context) {
    expect_schema(j, "pvnav-mission-v1", context);
    Mission mission;
    for (const json& jw : j.at("waypoints")) {
        Waypoint wp;
        wp.position = {jw.at("x").get<double>(), jw.at("y").get<double>()};
        const std::string label = jw.at("label").get<std::string>();
        if (label == "pv_start") {
            wp.label = WaypointLabel::PvStart;
        } else if (label == "pv_end") {
            wp.label = WaypointLabel::PvEnd;
        } else {
            throw ConfigError(context + ": waypoint label must be pv_start or pv_end");
        }
        mission.waypoints.push_back(wp);
    }
    return mission;
}

json thresholds_to_json(const ThresholdSet& th) {
    return json{{"schema", "pvnav-thresholds-v1"},
                {"thermal",
                 {{"low", th.thermal.low},
                  {"high", th.thermal.high},
                  {"distance_px", th.thermal.distance_px}}},
                {"hsv",
                 {{"hue", {th.hsv.h_lo, th.hsv.h_hi}},
                  {"sat", {th.hsv.s_lo, th.hsv.s_hi}},
                  {"val", {th.hsv.v_lo, th.hsv.v_hi}},
                  {"hue_wrap", th.hsv.hue_wrap}}}};
}

ThresholdSet thresholds_from_json(const json& j, const std::string& context) {
    expect_schema(j, "pvnav-thresholds-v1", context);
    ThresholdSet th;
    const json& jt = j.at("thermal");
    th.thermal.low = jt.at("low").get<int>();
    th.thermal.high = jt.at("high").get<int>();
    th.thermal.distance_px = jt.at("distance_px").get<double>();
    const json& jh = j.at("hsv");
    th.hsv.h_lo = jh.at("hue")[0];
    th.hsv.h_hi = jh.at("hue")[1];
    th.hsv.s_lo = jh.at("sat")[0];
    th.hsv.s_hi = jh.at("sat")[1];
    th.hsv.v_lo = jh.at("val")[0];
    th.hsv.v_hi = jh.at("val")[1];
    th.hsv.hue_wrap = jh.value("hue_wrap", false);
    th.validate();
    return th;
}

} // namespace

PlantLayout load_layout(const std::string& path) {
    return layout_from_json(read_json(path), path);
}

void save_layout(const PlantLayout& layout, const std::string& path) {
    write_json(layout_to_json(layout), path);
}

Mission load_mission(const std::string& path) {
    return mission_from_json(read_json(path), path);
}

void save_mission(const Mission& mission, const std::string& path) {
    write_json(mission_to_json(mission), path);
}

ThresholdSet load_thresholds(const std::string& path) {
    return thresholds_from_json(read_json(path), path);
}

void save_thresholds(const ThresholdSet& thresholds, const std::string& path) {
    write_json(thresholds_to_json(thresholds), path);
}

void save_tune_result(const TuneResult& result, const std::string& path) {
    json j = thresholds_to_json(result.thresholds);
    j["cost"] = {{"final", result.final_cost.total},
                 {"initial", result.initial_cost},
                 {"thermal_regions", result.final_cost.thermal_regions()},
                 {"rgb_regions", result.final_cost.rgb_regions()}};
    j["timing"] = {{"hsv_seconds", result.hsv_seconds},
                   {"thermal_seconds", result.thermal_seconds},
                   {"total_seconds", result.total_seconds},
                   {"evaluations", result.evaluations}};
    write_json(j, path);
}

ThresholdBounds load_bounds(const std::string& path) {
    const json j = read_json(path);
    expect_schema(j, "pvnav-bounds-v1", path);
    ThresholdBounds bounds;
    const json& lo = j.at("lower");
    const json& hi = j.at("upper");
    if (lo.size() != 9 || hi.size() != 9) {
        throw ConfigError(path + ": lower/upper must have 9 entries (th1..th9)");
    }
    for (int i = 0; i < 9; ++i) {
        bounds.lower[static_cast<size_t>(i)] = lo[static_cast<size_t>(i)].get<double>();
        bounds.upper[static_cast<size_t>(i)] = hi[static_cast<size_t>(i)].get<double>();
    }
    return bounds;
}

namespace {

CameraMode camera_from_string(const std::string& name, const std::string& context) {
    if (name == "thermal") return CameraMode::Thermal;
    if (name == "rgb") return CameraMode::Rgb;
    if (name == "both") return CameraMode::Both;
    throw ConfigError(context + ": camera must be thermal, rgb or both");
}

} // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
    const json j = read_json(path);
    expect_schema(j, "pvnav-experiment-v1", path);
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    const auto resolve = [&](const std::string& ref) {
        const std::filesystem::path p(ref);
        return (p.is_absolute() ? p : base / p).string();
    };

    ExperimentConfig cfg = ExperimentConfig::defaults();
    cfg.camera = camera_from_string(j.value("camera", "both"), path);
    cfg.seed = j.value("seed", std::uint64_t{1});

    if (j.contains("layout")) {
        cfg.layout = j["layout"].is_string()
                         ? load_layout(resolve(j["layout"].get<std::string>()))
                         : layout_from_json(j["layout"], path);
    }
    if (j.contains("mission") && !(j["mission"].is_string() && j["mission"] == "auto")) {
        cfg.mission = j["mission"].is_string()
                          ? load_mission(resolve(j["mission"].get<std::string>()))
                          : mission_from_json(j["mission"], path);
    } else {
        cfg.mission = boustrophedon_mission(cfg.layout);
    }

    if (j.contains("geometry")) {
        const json& jg = j["geometry"];
        cfg.geometry.width = jg.value("width", cfg.geometry.width);
        cfg.geometry.height = jg.value("height", cfg.geometry.height);
        cfg.geometry.focal = jg.value("focal", cfg.geometry.focal);
        cfg.geometry.pixel_scale = jg.value("pixel_scale", cfg.geometry.pixel_scale);
        cfg.geometry.ground_distance = jg.value("ground_distance", cfg.geometry.ground_distance);
        if (!cfg.geometry.valid()) throw ConfigError(path + ": invalid geometry");
    }
    if (j.contains("gps")) {
        const json& jg = j["gps"];
        if (jg.contains("bias")) {
            cfg.gps.bias_x = jg["bias"][0];
            cfg.gps.bias_y = jg["bias"][1];
        }
        cfg.gps.walk_sigma = jg.value("walk_sigma", cfg.gps.walk_sigma);
        cfg.gps.white_sigma = jg.value("white_sigma", cfg.gps.white_sigma);
    }
    if (j.contains("thresholds")) {
        cfg.thresholds = j["thresholds"].is_string()
                             ? load_thresholds(resolve(j["thresholds"].get<std::string>()))
                             : thresholds_from_json(j["thresholds"], path);
    }
    if (j.contains("follower")) {
        const json& jf = j["follower"];
        cfg.follower.lookahead = jf.value("lookahead", cfg.follower.lookahead);
        cfg.follower.kp = jf.value("kp", cfg.follower.kp);
        cfg.follower.ki = jf.value("ki", cfg.follower.ki);
        cfg.follower.kd = jf.value("kd", cfg.follower.kd);
        cfg.follower.cruise_speed = jf.value("cruise_speed", cfg.follower.cruise_speed);
        cfg.follower.max_speed = jf.value("max_speed", cfg.follower.max_speed);
        cfg.follower.integral_limit = jf.value("integral_limit", cfg.follower.integral_limit);
    }
    if (j.contains("ekf")) {
        const json& je = j["ekf"];
        cfg.ekf.process = je.value("q", cfg.ekf.process);
        if (je.contains("r_thermal")) {
            cfg.ekf.r_thermal_a = je["r_thermal"][0];
            cfg.ekf.r_thermal_b = je["r_thermal"][1];
        }
        if (je.contains("r_rgb")) {
            cfg.ekf.r_rgb_a = je["r_rgb"][0];
            cfg.ekf.r_rgb_b = je["r_rgb"][1];
        }
        cfg.ekf.gate = je.value("gate", cfg.ekf.gate);
    }
    if (j.contains("mission_rules")) {
        const json& jm = j["mission_rules"];
        cfg.rules.hold_trace_threshold = jm.value("hold_trace_threshold", cfg.rules.hold_trace_threshold);
        cfg.rules.arrival_radius = jm.value("arrival_radius", cfg.rules.arrival_radius);
        cfg.rules.hold_timeout = jm.value("hold_timeout", cfg.rules.hold_timeout);
        cfg.rules.abort_after_rejections =
            jm.value("abort_after_rejections", cfg.rules.abort_after_rejections);
    }
    if (j.contains("dynamics")) {
        const json& jd = j["dynamics"];
        cfg.tau = jd.value("tau", cfg.tau);
        cfg.dynamics.max_speed = jd.value("max_speed", cfg.dynamics.max_speed);
        cfg.dynamics.max_yaw_rate = jd.value("max_yaw_rate", cfg.dynamics.max_yaw_rate);
    }
    if (j.contains("waypoint_error")) {
        const json& jw = j["waypoint_error"];
        WaypointError err;
        err.dx = jw.value("dx", 0.0);
        err.dy = jw.value("dy", 0.0);
        err.dtheta = jw.contains("dtheta_deg") ? jw["dtheta_deg"].get<double>() * M_PI / 180.0
                                               : jw.value("dtheta", 0.0);
        err.jitter_sigma = jw.value("jitter_sigma", 0.0);
        cfg.waypoint_error = err;
    }
    cfg.time_limit = j.value("time_limit", cfg.time_limit);
    cfg.min_speed_fraction = j.value("min_speed_fraction", cfg.min_speed_fraction);
    return cfg;
}

void save_experiment_config(const ExperimentConfig& cfg, const std::string& path) {
    json j{{"schema", "pvnav-experiment-v1"},
           {"camera", camera_mode_name(cfg.camera)},
           {"seed", cfg.seed},
           {"layout", layout_to_json(cfg.layout)},
           {"mission", mission_to_json(cfg.mission)},
           {"geometry",
            {{"width", cfg.geometry.width},
             {"height", cfg.geometry.height},
             {"focal", cfg.geometry.focal},
             {"pixel_scale", cfg.geometry.pixel_scale},
             {"ground_distance", cfg.geometry.ground_distance}}},
           {"gps",
            {{"bias", {cfg.gps.bias_x, cfg.gps.bias_y}},
             {"walk_sigma", cfg.gps.walk_sigma},
             {"white_sigma", cfg.gps.white_sigma}}},
           {"thresholds", thresholds_to_json(cfg.thresholds)},
           {"follower",
            {{"lookahead", cfg.follower.lookahead},
             {"kp", cfg.follower.kp},
             {"ki", cfg.follower.ki},
             {"kd", cfg.follower.kd},
             {"cruise_speed", cfg.follower.cruise_speed},
             {"max_speed", cfg.follower.max_speed},
             {"integral_limit", cfg.follower.integral_limit}}},
           {"ekf",
            {{"q", cfg.ekf.process},
             {"r_thermal", {cfg.ekf.r_thermal_a, cfg.ekf.r_thermal_b}},
             {"r_rgb", {cfg.ekf.r_rgb_a, cfg.ekf.r_rgb_b}},
             {"gate", cfg.ekf.gate}}},
           {"mission_rules",
            {{"hold_trace_threshold", cfg.rules.hold_trace_threshold},
             {"arrival_radius", cfg.rules.arrival_radius},
             {"hold_timeout", cfg.rules.hold_timeout},
             {"abort_after_rejections", cfg.rules.abort_after_rejections}}},
           {"dynamics",
            {{"tau", cfg.tau},
             {"max_speed", cfg.dynamics.max_speed},
             {"max_yaw_rate", cfg.dynamics.max_yaw_rate}}},
           {"time_limit", cfg.time_limit},
           {"min_speed_fraction", cfg.min_speed_fraction}};
    if (cfg.waypoint_error) {
        j["waypoint_error"] = {{"dx", cfg.waypoint_error->dx},
                               {"dy", cfg.waypoint_error->dy},
                               {"dtheta", cfg.waypoint_error->dtheta},
                               {"jitter_sigma", cfg.waypoint_error->jitter_sigma}};
    }
    write_json(j, path);
}

} // namespace pvtrack
