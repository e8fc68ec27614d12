// pvnav: run simulated inspection experiments, tune segmentation thresholds
// and recompute metrics from recorded traces.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pvtrack/config.hpp"
#include "pvtrack/errors.hpp"
#include "pvtrack/pnm.hpp"

namespace {

int log_level() {
    const char* env = std::getenv("PVNAV_LOG");
    if (!env) return 1;
    const std::string v(env);
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

void fail(const std::string& kind, const std::string& detail) {
    const nlohmann::json err{{"error", kind}, {"detail", detail}};
    std::fprintf(stderr, "%s\n", err.dump().c_str());
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const pvtrack::ExperimentConfig cfg = pvtrack::load_experiment_config(config_path);
    std::filesystem::create_directories(out_dir);

    const pvtrack::RunResult result = pvtrack::run_experiment(cfg);
    pvtrack::write_trace_csv(out_dir + "/trace.csv", result);
    pvtrack::write_metrics_csv(out_dir + "/metrics.csv", result.metrics);

    if (log_level() >= 1) {
        std::printf("camera=%s seed=%llu rows_completed=%d completed=%s\n",
                    pvtrack::camera_mode_name(cfg.camera),
                    static_cast<unsigned long long>(cfg.seed),
                    result.metrics.rows_completed,
                    result.metrics.completed ? "yes" : "no");
        std::printf("mu_e=%.4f m  sigma_e=%.4f m  rmse=%.4f m  samples=%d\n",
                    result.metrics.overall.mu_e, result.metrics.overall.sigma_e,
                    result.metrics.overall.rmse, result.metrics.overall.samples);
        std::printf("sim=%.1f s  wall=%.1f s  trace=%s/trace.csv\n",
                    result.metrics.sim_seconds, result.metrics.wall_seconds, out_dir.c_str());
    }
    if (log_level() >= 2) {
        for (const pvtrack::MissionEvent& ev : result.events) {
            std::printf("  t=%7.2f row=%d %s %s\n", ev.time, ev.row, ev.kind.c_str(),
                        pvtrack::phase_name(ev.phase));
        }
    }
    return result.metrics.completed ? 0 : 3;
}

int cmd_tune(const std::string& thermal_path, const std::string& rgb_path,
             const std::string& out_path, const std::string& init_path,
             const std::string& bounds_path, const std::string& method,
             double ground_distance, double panel_width, double panel_length) {
    const pvtrack::GrayImage thermal = pvtrack::read_pgm(thermal_path);
    const pvtrack::RgbImage rgb = pvtrack::read_ppm(rgb_path);
    if (thermal.width != rgb.width || thermal.height != rgb.height) {
        throw pvtrack::ShapeMismatch("thermal and RGB images must be registered to one raster");
    }

    pvtrack::ImageGeometry geom;
    geom.width = thermal.width;
    geom.height = thermal.height;
    geom.ground_distance = ground_distance;
    const pvtrack::CostContext ctx =
        pvtrack::CostContext::for_geometry(geom, panel_width, panel_length);

    pvtrack::TuneOptions options;
    if (method == "quasi-newton") {
        options.method = pvtrack::TuneMethod::QuasiNewton;
    } else if (method != "coordinate") {
        throw pvtrack::ConfigError("method must be coordinate or quasi-newton");
    }
    if (!bounds_path.empty()) options.bounds = pvtrack::load_bounds(bounds_path);

    pvtrack::ThresholdSet init;
    if (!init_path.empty()) init = pvtrack::load_thresholds(init_path);

    const pvtrack::TuneResult result =
        pvtrack::optimize_thresholds(thermal, rgb, init, ctx, options);
    pvtrack::save_tune_result(result, out_path);

    if (log_level() >= 1) {
        std::printf("cost %.4f -> %.4f  (thermal regions %d, rgb regions %d)\n",
                    result.initial_cost, result.final_cost.total,
                    result.final_cost.thermal_regions(), result.final_cost.rgb_regions());
        std::printf("t_hsv=%.1f s  t_thermal=%.1f s  t_tot=%.1f s  evals=%d\n",
                    result.hsv_seconds, result.thermal_seconds, result.total_seconds,
                    result.evaluations);
    }
    return 0;
}

int cmd_metrics(const std::string& trace_path, const std::string& out_path) {
    const auto steps = pvtrack::read_trace_csv(trace_path);
    const pvtrack::RunMetrics metrics = pvtrack::compute_metrics(steps);
    if (!out_path.empty()) {
        pvtrack::write_metrics_csv(out_path, metrics);
    }
    std::printf("scope,row,mu_e,sigma_e,rmse,samples\n");
    std::printf("overall,,%.6f,%.6f,%.6f,%d\n", metrics.overall.mu_e, metrics.overall.sigma_e,
                metrics.overall.rmse, metrics.overall.samples);
    for (const pvtrack::RowMetrics& row : metrics.per_row) {
        std::printf("row,%d,%.6f,%.6f,%.6f,%d\n", row.row, row.mu_e, row.sigma_e, row.rmse,
                    row.samples);
    }
    return 0;
}

int cmd_render(const std::string& layout_path, double x, double y, double yaw_deg,
               double height, std::uint64_t seed, const std::string& thermal_out,
               const std::string& rgb_out) {
    const pvtrack::PlantLayout layout =
        layout_path.empty() ? pvtrack::default_layout() : pvtrack::load_layout(layout_path);
    pvtrack::ImageGeometry geom;
    geom.ground_distance = height;
    pvtrack::Pose2D pose{x, y, yaw_deg * M_PI / 180.0, height};

    if (!thermal_out.empty()) {
        pvtrack::write_pgm(pvtrack::render_thermal(layout, pose, geom, seed), thermal_out);
    }
    if (!rgb_out.empty()) {
        pvtrack::write_ppm(pvtrack::render_rgb(layout, pose, geom, seed), rgb_out);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"PV row tracking simulator and threshold tuner"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    CLI::App* run = app.add_subcommand("run", "run a configured experiment");
    run->add_option("--config", config_path, "experiment config (pvnav-experiment-v1)")
        ->required();
    run->add_option("--out", out_dir, "output directory for trace.csv and metrics.csv");

    std::string thermal_path, rgb_path, tune_out = "thresholds.json";
    std::string init_path, bounds_path, method = "coordinate";
    double ground_distance = 15.0, panel_width = 2.0, panel_length = 2.0;
    CLI::App* tune = app.add_subcommand("tune", "tune the nine segmentation thresholds");
    tune->add_option("--thermal", thermal_path, "thermal frame (PGM)")->required();
    tune->add_option("--rgb", rgb_path, "RGB frame (PPM)")->required();
    tune->add_option("--out", tune_out, "output thresholds file");
    tune->add_option("--init", init_path, "initial thresholds (pvnav-thresholds-v1)");
    tune->add_option("--bounds", bounds_path, "per-variable bounds (pvnav-bounds-v1)");
    tune->add_option("--method", method, "coordinate (default) or quasi-newton");
    tune->add_option("--height", ground_distance, "camera height above ground, m");
    tune->add_option("--panel-width", panel_width, "module width, m");
    tune->add_option("--panel-length", panel_length, "module length, m");

    std::string trace_path, metrics_out;
    CLI::App* metrics = app.add_subcommand("metrics", "recompute metrics from a trace");
    metrics->add_option("--trace", trace_path, "trace.csv from a run")->required();
    metrics->add_option("--out", metrics_out, "optional metrics.csv output");

    std::string layout_path, render_thermal_out, render_rgb_out;
    double rx = 5.0, ry = 0.0, ryaw = 0.0, rheight = 15.0;
    std::uint64_t rseed = 1;
    CLI::App* render = app.add_subcommand("render", "dump simulator frames as PGM/PPM");
    render->add_option("--layout", layout_path, "plant layout (pvnav-layout-v1); default plant if omitted");
    render->add_option("--x", rx, "camera x, m");
    render->add_option("--y", ry, "camera y, m");
    render->add_option("--yaw", ryaw, "camera yaw, degrees");
    render->add_option("--height", rheight, "camera height, m");
    render->add_option("--seed", rseed, "frame seed");
    render->add_option("--thermal-out", render_thermal_out, "PGM output path");
    render->add_option("--rgb-out", render_rgb_out, "PPM output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir);
        if (tune->parsed()) {
            return cmd_tune(thermal_path, rgb_path, tune_out, init_path, bounds_path, method,
                            ground_distance, panel_width, panel_length);
        }
        if (metrics->parsed()) return cmd_metrics(trace_path, metrics_out);
        if (render->parsed()) {
            return cmd_render(layout_path, rx, ry, ryaw, rheight, rseed, render_thermal_out,
                              render_rgb_out);
        }
    } catch (const pvtrack::IoError& e) {
        fail("io", e.what());
        return 2;
    } catch (const pvtrack::ConfigError& e) {
        fail("config", e.what());
        return 2;
    } catch (const std::exception& e) {
        fail("runtime", e.what());
        return 1;
    }
    return 0;
}
