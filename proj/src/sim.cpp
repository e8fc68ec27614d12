#include "pvtrack/sim.hpp"

#include <algorithm>
#include <cmath>

#include "pvtrack/rgb.hpp"

namespace pvtrack {

namespace {

struct RowFrame {
    double ax, ay;   // segment start
    double ux, uy;   // unit along
    double nx, ny;   // unit normal
    double len;
    double half_width;
    double cell_len;  // panel_length + junction_gap
};

RowFrame row_frame(const PlantRow& row) {
    const double dx = row.end.x - row.start.x;
    const double dy = row.end.y - row.start.y;
    const double len = std::hypot(dx, dy);
    const double ux = dx / len;
    const double uy = dy / len;
    return RowFrame{row.start.x, row.start.y, ux,  uy, -uy, ux, len,
                    0.5 * row.panel_width,    row.panel_length + row.junction_gap};
}

// Where a world point falls relative to one row.
struct RowHit {
    bool on_strip = false;   // within the row rectangle (panel or junction)
    bool on_panel = false;
    int cell = 0;            // module index along the row
};

RowHit classify(const RowFrame& f, const PlantRow& row, double wx, double wy) {
    RowHit hit;
    const double rx = wx - f.ax;
    const double ry = wy - f.ay;
    const double t = rx * f.ux + ry * f.uy;
    if (t < 0.0 || t > f.len) return hit;
    const double s = rx * f.nx + ry * f.ny;
    if (std::abs(s) > f.half_width) return hit;
    hit.on_strip = true;
    hit.cell = static_cast<int>(t / f.cell_len);
    const double offset = t - hit.cell * f.cell_len;
    hit.on_panel = offset <= row.panel_length;
    return hit;
}

double lerp(double a, double b, double t) { return a + (b - a) * t; }

// Bilinear value noise in [0,1) over a world-aligned lattice; coherent
// across frames because it only depends on the scene seed.
double value_noise(std::uint64_t seed, double x, double y, double cell) {
    const double gx = x / cell;
    const double gy = y / cell;
    const double fx0 = std::floor(gx);
    const double fy0 = std::floor(gy);
    const auto ix = static_cast<std::int64_t>(fx0);
    const auto iy = static_cast<std::int64_t>(fy0);
    const double tx = gx - fx0;
    const double ty = gy - fy0;
    const auto corner = [&](std::int64_t cx, std::int64_t cy) {
        return u64_to_unit(hash_mix(seed, static_cast<std::uint64_t>(cx),
                                    static_cast<std::uint64_t>(cy)));
    };
    const double v00 = corner(ix, iy);
    const double v10 = corner(ix + 1, iy);
    const double v01 = corner(ix, iy + 1);
    const double v11 = corner(ix + 1, iy + 1);
    return lerp(lerp(v00, v10, tx), lerp(v01, v11, tx), ty);
}

// Affine pixel -> world map for one frame (nadir camera, yaw only).
struct PixelToWorld {
    double base_x, base_y;
    double du_x, du_y;
    double dv_x, dv_y;

    WorldPoint operator()(int u, int v) const {
        return WorldPoint{base_x + u * du_x + v * dv_x, base_y + u * du_y + v * dv_y};
    }
};

PixelToWorld make_pixel_map(const Pose2D& pose, const ImageGeometry& geom) {
    const double mpp = geom.meters_per_pixel();
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    // camera coords of pixel (u,v): x = mpp*(V/2 - v), y = mpp*(u - U/2)
    const double x0 = mpp * (0.5 * geom.height);
    const double y0 = mpp * (-0.5 * geom.width);
    PixelToWorld map;
    map.base_x = pose.x + c * x0 - s * y0;
    map.base_y = pose.y + s * x0 + c * y0;
    map.du_x = -s * mpp;
    map.du_y = c * mpp;
    map.dv_x = -c * mpp;
    map.dv_y = -s * mpp;
    return map;
}

std::uint8_t clamp_byte(double value) {
    return static_cast<std::uint8_t>(std::clamp(value, 0.0, 255.0));
}

constexpr std::uint64_t kGroundThermalTag = 0x7468676eull;  // lattice streams
constexpr std::uint64_t kGroundHueTag = 0x68756567ull;
constexpr std::uint64_t kGroundSatTag = 0x73617467ull;
constexpr std::uint64_t kGroundValTag = 0x76616c67ull;
constexpr std::uint64_t kPanelThermalTag = 0x70616e74ull;
constexpr std::uint64_t kPanelColorTag = 0x70616e63ull;

struct GlareEllipse {
    double cu, cv, ru, rv, cos_phi, sin_phi;
};

std::vector<GlareEllipse> make_glare(const GlareModel& model, const ImageGeometry& geom,
                                     std::uint64_t frame_seed) {
    std::vector<GlareEllipse> out;
    if (!model.enabled || model.coverage <= 0.0) return out;
    Xoshiro256 rng(hash_mix(frame_seed, 0x676c6172ull));
    const double target = model.coverage * geom.width * geom.height;
    double area = 0.0;
    while (area < target && out.size() < 16) {
        GlareEllipse e;
        e.cu = rng.uniform(0.0, geom.width);
        e.cv = rng.uniform(0.0, geom.height);
        e.ru = rng.uniform(60.0, 140.0);
        e.rv = rng.uniform(30.0, 70.0);
        const double phi = rng.uniform(0.0, M_PI);
        e.cos_phi = std::cos(phi);
        e.sin_phi = std::sin(phi);
        area += M_PI * e.ru * e.rv;
        out.push_back(e);
    }
    return out;
}

bool in_glare(const std::vector<GlareEllipse>& glare, double u, double v) {
    for (const GlareEllipse& e : glare) {
        const double du = u - e.cu;
        const double dv = v - e.cv;
        const double lu = (du * e.cos_phi + dv * e.sin_phi) / e.ru;
        const double lv = (-du * e.sin_phi + dv * e.cos_phi) / e.rv;
        if (lu * lu + lv * lv <= 1.0) return true;
    }
    return false;
}

} // namespace

WorldPoint PlantLayout::centroid() const {
    double sx = 0.0, sy = 0.0;
    for (const PlantRow& row : rows) {
        sx += 0.5 * (row.start.x + row.end.x);
        sy += 0.5 * (row.start.y + row.end.y);
    }
    const double n = rows.empty() ? 1.0 : static_cast<double>(rows.size());
    return WorldPoint{sx / n, sy / n};
}

double PlantLayout::midline_distance(int row, WorldPoint p) const {
    const RowFrame f = row_frame(rows[static_cast<size_t>(row)]);
    const double rx = p.x - f.ax;
    const double ry = p.y - f.ay;
    const double t = std::clamp(rx * f.ux + ry * f.uy, 0.0, f.len);
    const double cx = f.ax + t * f.ux;
    const double cy = f.ay + t * f.uy;
    return std::hypot(p.x - cx, p.y - cy);
}

WorldLine PlantLayout::midline(int row) const {
    const PlantRow& r = rows[static_cast<size_t>(row)];
    return init_from_waypoints(r.start, r.end).line;
}

double PlantLayout::row_heading(int row) const {
    const PlantRow& r = rows[static_cast<size_t>(row)];
    return std::atan2(r.end.y - r.start.y, r.end.x - r.start.x);
}

PlantLayout default_layout() {
    PlantLayout layout;
    for (int i = 0; i < 4; ++i) {
        PlantRow row;
        row.start = WorldPoint{0.0, 6.0 * i};
        row.end = WorldPoint{60.0, 6.0 * i};
        layout.rows.push_back(row);
    }
    return layout;
}

GrayImage render_thermal(const PlantLayout& layout, const Pose2D& pose,
                         const ImageGeometry& geom, std::uint64_t seed) {
    GrayImage img(geom.width, geom.height);
    const PixelToWorld to_world = make_pixel_map(pose, geom);

    std::vector<RowFrame> frames;
    frames.reserve(layout.rows.size());
    for (const PlantRow& row : layout.rows) frames.push_back(row_frame(row));

    const GroundModel& ground = layout.ground;
    const std::uint64_t ground_seed = hash_mix(layout.scene_seed, kGroundThermalTag);

    size_t idx = 0;
    for (int v = 0; v < geom.height; ++v) {
        for (int u = 0; u < geom.width; ++u, ++idx) {
            const WorldPoint w = to_world(u, v);
            double value = 0.0;
            bool on_panel = false;
            for (size_t r = 0; r < frames.size(); ++r) {
                const RowHit hit = classify(frames[r], layout.rows[r], w.x, w.y);
                if (hit.on_strip && hit.on_panel) {
                    const PlantRow& row = layout.rows[r];
                    const double unit = u64_to_unit(hash_mix(
                        hash_mix(layout.scene_seed, kPanelThermalTag, r),
                        static_cast<std::uint64_t>(hit.cell)));
                    value = row.thermal_lo + unit * (row.thermal_hi - row.thermal_lo);
                    on_panel = true;
                    break;
                }
                if (hit.on_strip) break;  // junction gap reads as ground
            }
            if (!on_panel) {
                const double field = value_noise(ground_seed, w.x, w.y, ground.cell_m);
                value = ground.thermal_mean + (2.0 * field - 1.0) * ground.thermal_amplitude;
            }
            value += ground.speckle_sigma * hash_gaussian(hash_mix(seed, idx));
            img.data[idx] = clamp_byte(value);
        }
    }
    return img;
}

RgbImage render_rgb(const PlantLayout& layout, const Pose2D& pose,
                    const ImageGeometry& geom, std::uint64_t seed) {
    RgbImage img(geom.width, geom.height);
    const PixelToWorld to_world = make_pixel_map(pose, geom);

    std::vector<RowFrame> frames;
    frames.reserve(layout.rows.size());
    for (const PlantRow& row : layout.rows) frames.push_back(row_frame(row));

    const GroundModel& ground = layout.ground;
    const PanelColorModel& panel = layout.panel;
    const std::uint64_t hue_seed = hash_mix(layout.scene_seed, kGroundHueTag);
    const std::uint64_t sat_seed = hash_mix(layout.scene_seed, kGroundSatTag);
    const std::uint64_t val_seed = hash_mix(layout.scene_seed, kGroundValTag);
    const std::vector<GlareEllipse> glare = make_glare(layout.glare, geom, seed);

    size_t idx = 0;
    for (int v = 0; v < geom.height; ++v) {
        for (int u = 0; u < geom.width; ++u, ++idx) {
            const WorldPoint w = to_world(u, v);
            double h = 0.0, s = 0.0, val = 0.0;
            bool on_strip = false;
            for (size_t r = 0; r < frames.size(); ++r) {
                const RowHit hit = classify(frames[r], layout.rows[r], w.x, w.y);
                if (!hit.on_strip) continue;
                // Junction gaps share the module color: in RGB the row reads
                // as one long strip.
                const std::uint64_t cell_seed = hash_mix(
                    hash_mix(layout.scene_seed, kPanelColorTag, r),
                    static_cast<std::uint64_t>(hit.cell));
                h = panel.hue_lo + u64_to_unit(cell_seed) * (panel.hue_hi - panel.hue_lo);
                s = panel.sat_lo + u64_to_unit(splitmix64(cell_seed)) * (panel.sat_hi - panel.sat_lo);
                val = panel.val_lo +
                      u64_to_unit(splitmix64(splitmix64(cell_seed))) * (panel.val_hi - panel.val_lo);
                on_strip = true;
                break;
            }
            if (!on_strip) {
                h = ground.hue_lo + value_noise(hue_seed, w.x, w.y, ground.cell_m) *
                                        (ground.hue_hi - ground.hue_lo);
                s = ground.sat_lo + value_noise(sat_seed, w.x, w.y, ground.cell_m) *
                                        (ground.sat_hi - ground.sat_lo);
                val = ground.val_lo + value_noise(val_seed, w.x, w.y, ground.cell_m) *
                                          (ground.val_hi - ground.val_lo);
            }
            val += panel.value_speckle_sigma * hash_gaussian(hash_mix(seed, idx));
            if (!glare.empty() && in_glare(glare, u, v)) {
                s *= 0.15;  // glare washes the hue out and brightens
                val = std::min(255.0, val * 1.6 + 70.0);
            }
            const auto rgb = hsv_to_rgb_pixel(static_cast<float>(h), static_cast<float>(s),
                                              static_cast<float>(std::clamp(val, 0.0, 255.0)));
            img.data[idx * 3 + 0] = rgb[0];
            img.data[idx * 3 + 1] = rgb[1];
            img.data[idx * 3 + 2] = rgb[2];
        }
    }
    return img;
}

BinaryMask render_row_mask(const PlantLayout& layout, const Pose2D& pose,
                           const ImageGeometry& geom, bool include_junctions) {
    BinaryMask mask(geom.width, geom.height);
    const PixelToWorld to_world = make_pixel_map(pose, geom);
    std::vector<RowFrame> frames;
    frames.reserve(layout.rows.size());
    for (const PlantRow& row : layout.rows) frames.push_back(row_frame(row));

    size_t idx = 0;
    for (int v = 0; v < geom.height; ++v) {
        for (int u = 0; u < geom.width; ++u, ++idx) {
            const WorldPoint w = to_world(u, v);
            for (size_t r = 0; r < frames.size(); ++r) {
                const RowHit hit = classify(frames[r], layout.rows[r], w.x, w.y);
                if (hit.on_strip && (include_junctions || hit.on_panel)) {
                    mask.data[idx] = 1;
                    break;
                }
            }
        }
    }
    return mask;
}

double UavState::speed() const { return std::hypot(vx, vy); }

UavState step_dynamics(const UavState& s, VelocityCommand cmd_world, double desired_heading,
                       double dt, const DynamicsLimits& limits) {
    if (dt <= 0.0) throw std::invalid_argument("dt must be > 0");
    UavState next = s;

    const double alpha = std::min(dt / s.tau, 1.0);
    next.vx += (cmd_world.vx - next.vx) * alpha;
    next.vy += (cmd_world.vy - next.vy) * alpha;
    const double speed = std::hypot(next.vx, next.vy);
    if (speed > limits.max_speed) {
        const double scale = limits.max_speed / speed;
        next.vx *= scale;
        next.vy *= scale;
    }
    next.pose.x += next.vx * dt;
    next.pose.y += next.vy * dt;

    const double yaw_err = normalize_angle(desired_heading - next.pose.theta);
    const double max_step = limits.max_yaw_rate * dt;
    next.pose.theta = normalize_angle(next.pose.theta + std::clamp(yaw_err, -max_step, max_step));
    return next;
}

GpsSim::GpsSim(const GpsModel& model)
    : model_(model), rng_(derive_stream(model.seed, "gps")) {}

Pose2D GpsSim::read(const Pose2D& truth, double t) {
    if (!started_) {
        started_ = true;
        last_t_ = t;
    } else if (t > last_t_) {
        const double dt = t - last_t_;
        const double step = model_.walk_sigma * std::sqrt(dt);
        walk_x_ += step * rng_.gaussian();
        walk_y_ += step * rng_.gaussian();
        last_t_ = t;
    }
    Pose2D reading = truth;
    reading.x += model_.bias_x + walk_x_ + model_.white_sigma * rng_.gaussian();
    reading.y += model_.bias_y + walk_y_ + model_.white_sigma * rng_.gaussian();
    return reading;
}

Mission inject_waypoint_error(const Mission& mission, double dx, double dy, double dtheta,
                              double jitter_sigma, std::uint64_t seed) {
    Mission out = mission;
    if (out.waypoints.empty()) return out;

    double cx = 0.0, cy = 0.0;
    for (const Waypoint& wp : out.waypoints) {
        cx += wp.position.x;
        cy += wp.position.y;
    }
    cx /= static_cast<double>(out.waypoints.size());
    cy /= static_cast<double>(out.waypoints.size());

    const double c = std::cos(dtheta);
    const double s = std::sin(dtheta);
    Xoshiro256 rng(derive_stream(seed, "wp-jitter"));
    for (Waypoint& wp : out.waypoints) {
        const double rx = wp.position.x - cx;
        const double ry = wp.position.y - cy;
        wp.position.x = cx + c * rx - s * ry + dx + jitter_sigma * rng.gaussian();
        wp.position.y = cy + s * rx + c * ry + dy + jitter_sigma * rng.gaussian();
    }
    return out;
}

} // namespace pvtrack
