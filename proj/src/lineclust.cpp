#include "pvtrack/lineclust.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pvtrack/errors.hpp"

namespace pvtrack {

namespace {

struct FitCore {
    double cu, cv;      // centroid
    double du, dv;      // principal axis, unit, canonical
    double nu, nv;      // unit normal (perpendicular of the axis)
};

// Principal axis of the 2x2 scatter matrix, largest eigenvalue.
FitCore fit_from_sums(double n, double su, double sv, double suu, double svv, double suv) {
    const double cu = su / n;
    const double cv = sv / n;
    const double muu = suu / n - cu * cu;
    const double mvv = svv / n - cv * cv;
    const double muv = suv / n - cu * cv;
    if (muu + mvv < 1e-12) {
        throw DegenerateRegion("pixels have no spread, no line direction");
    }
    const double angle = 0.5 * std::atan2(2.0 * muv, muu - mvv);
    double du = std::cos(angle);
    double dv = std::sin(angle);
    // Canonical direction: upper half-plane, +u when horizontal.
    if (dv < 0.0 || (dv == 0.0 && du < 0.0)) {
        du = -du;
        dv = -dv;
    }
    return FitCore{cu, cv, du, dv, -dv, du};
}

RegressionLine finish_fit(double n, double su, double sv, double suu, double svv, double suv,
                          const std::vector<PixelCoord>& pixels) {
    const FitCore core = fit_from_sums(n, su, sv, suu, svv, suv);
    RegressionLine line;
    line.centroid_u = core.cu;
    line.centroid_v = core.cv;
    line.dir_u = core.du;
    line.dir_v = core.dv;
    line.n = n;
    line.sum_u = su;
    line.sum_v = sv;
    line.sum_uu = suu;
    line.sum_vv = svv;
    line.sum_uv = suv;
    bool first = true;
    for (const PixelCoord& p : pixels) {
        const double ru = p.u - core.cu;
        const double rv = p.v - core.cv;
        const double t = ru * core.du + rv * core.dv;
        const double s = ru * core.nu + rv * core.nv;
        if (first) {
            line.t_min = line.t_max = t;
            line.s_min = line.s_max = s;
            first = false;
        } else {
            line.t_min = std::min(line.t_min, t);
            line.t_max = std::max(line.t_max, t);
            line.s_min = std::min(line.s_min, s);
            line.s_max = std::max(line.s_max, s);
        }
    }
    return line;
}

// Signed distance of a point to the infinite line (positive on the normal side).
double signed_distance(const RegressionLine& line, double u, double v) {
    const double nu = -line.dir_v;
    const double nv = line.dir_u;
    return (u - line.centroid_u) * nu + (v - line.centroid_v) * nv;
}

// Mean |f(t)| of the affine function f over [t0, t1] in closed form.
double mean_abs_affine(double f0, double f1, double t0, double t1) {
    const double len = t1 - t0;
    if (len <= 0.0) return std::abs(f0);
    if (f0 * f1 >= 0.0) return 0.5 * (std::abs(f0) + std::abs(f1));
    const double slope = (f1 - f0) / len;
    return 0.5 * (f0 * f0 + f1 * f1) / (std::abs(slope) * len);
}

// Mean orthogonal distance from a's segment to b's infinite line.
double segment_to_line(const RegressionLine& a, const RegressionLine& b) {
    const double u0 = a.centroid_u + a.t_min * a.dir_u;
    const double v0 = a.centroid_v + a.t_min * a.dir_v;
    const double u1 = a.centroid_u + a.t_max * a.dir_u;
    const double v1 = a.centroid_v + a.t_max * a.dir_v;
    return mean_abs_affine(signed_distance(b, u0, v0), signed_distance(b, u1, v1),
                           a.t_min, a.t_max);
}

struct UnionFind {
    std::vector<std::size_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

} // namespace

RegressionLine fit_pixels_line(const std::vector<PixelCoord>& pixels) {
    if (pixels.size() < 2) {
        throw DegenerateRegion("line fit needs at least 2 pixels");
    }
    double su = 0, sv = 0, suu = 0, svv = 0, suv = 0;
    for (const PixelCoord& p : pixels) {
        const double u = p.u;
        const double v = p.v;
        su += u;
        sv += v;
        suu += u * u;
        svv += v * v;
        suv += u * v;
    }
    return finish_fit(static_cast<double>(pixels.size()), su, sv, suu, svv, suv, pixels);
}

RegressionLine fit_region_line(const Region& region) { return fit_pixels_line(region.pixels); }

double line_angle_between(const RegressionLine& a, const RegressionLine& b) {
    const double dot = std::abs(a.dir_u * b.dir_u + a.dir_v * b.dir_v);
    return std::acos(std::clamp(dot, 0.0, 1.0));
}

double line_pair_distance(const RegressionLine& a, const RegressionLine& b) {
    return 0.5 * (segment_to_line(a, b) + segment_to_line(b, a));
}

std::vector<LineCluster> cluster_lines(const std::vector<RegressionLine>& lines,
                                       double angle_tol, double dist_tol) {
    if (angle_tol <= 0.0 || dist_tol <= 0.0) {
        throw std::invalid_argument("cluster tolerances must be > 0");
    }
    const std::size_t n = lines.size();
    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (line_angle_between(lines[i], lines[j]) <= angle_tol &&
                line_pair_distance(lines[i], lines[j]) <= dist_tol) {
                uf.unite(i, j);
            }
        }
    }

    // Group members by root, keeping first-seen root order for determinism.
    std::vector<LineCluster> clusters;
    std::vector<std::ptrdiff_t> slot(n, -1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t root = uf.find(i);
        if (slot[root] < 0) {
            slot[root] = static_cast<std::ptrdiff_t>(clusters.size());
            clusters.emplace_back();
        }
        clusters[static_cast<std::size_t>(slot[root])].members.push_back(i);
    }

    for (LineCluster& cluster : clusters) {
        if (cluster.members.size() == 1) {
            cluster.merged = lines[cluster.members.front()];
            continue;
        }
        // Refit on the union of member pixels via the pooled moment sums.
        double n_sum = 0, su = 0, sv = 0, suu = 0, svv = 0, suv = 0;
        for (std::size_t idx : cluster.members) {
            const RegressionLine& m = lines[idx];
            n_sum += m.n;
            su += m.sum_u;
            sv += m.sum_v;
            suu += m.sum_uu;
            svv += m.sum_vv;
            suv += m.sum_uv;
        }
        const FitCore core = fit_from_sums(n_sum, su, sv, suu, svv, suv);
        RegressionLine merged;
        merged.centroid_u = core.cu;
        merged.centroid_v = core.cv;
        merged.dir_u = core.du;
        merged.dir_v = core.dv;
        merged.n = n_sum;
        merged.sum_u = su;
        merged.sum_v = sv;
        merged.sum_uu = suu;
        merged.sum_vv = svv;
        merged.sum_uv = suv;
        // Extent from the members' segment endpoints projected on the new axis.
        bool first = true;
        for (std::size_t idx : cluster.members) {
            const RegressionLine& m = lines[idx];
            for (const double t : {m.t_min, m.t_max}) {
                const double u = m.centroid_u + t * m.dir_u;
                const double v = m.centroid_v + t * m.dir_v;
                const double ru = u - core.cu;
                const double rv = v - core.cv;
                const double proj_t = ru * core.du + rv * core.dv;
                const double proj_s = ru * core.nu + rv * core.nv;
                if (first) {
                    merged.t_min = merged.t_max = proj_t;
                    merged.s_min = merged.s_max = proj_s;
                    first = false;
                } else {
                    merged.t_min = std::min(merged.t_min, proj_t);
                    merged.t_max = std::max(merged.t_max, proj_t);
                    merged.s_min = std::min(merged.s_min, proj_s);
                    merged.s_max = std::max(merged.s_max, proj_s);
                }
            }
        }
        cluster.merged = merged;
    }
    return clusters;
}

ObservedLine clip_to_border(const RegressionLine& line, int width, int height) {
    const double U = width;
    const double V = height;
    constexpr double eps = 1e-9;

    std::vector<PixelPoint> hits;
    const auto add_hit = [&](double u, double v) {
        for (const PixelPoint& p : hits) {
            if (std::abs(p.u - u) < 1e-7 && std::abs(p.v - v) < 1e-7) return;
        }
        hits.push_back({u, v});
    };

    // Intersections with u = 0 and u = U.
    if (std::abs(line.dir_u) > eps) {
        for (const double border_u : {0.0, U}) {
            const double t = (border_u - line.centroid_u) / line.dir_u;
            const double v = line.centroid_v + t * line.dir_v;
            if (v >= -eps && v <= V + eps) add_hit(border_u, std::clamp(v, 0.0, V));
        }
    }
    // Intersections with v = 0 and v = V.
    if (std::abs(line.dir_v) > eps) {
        for (const double border_v : {0.0, V}) {
            const double t = (border_v - line.centroid_v) / line.dir_v;
            const double u = line.centroid_u + t * line.dir_u;
            if (u >= -eps && u <= U + eps) add_hit(std::clamp(u, 0.0, U), border_v);
        }
    }

    if (hits.size() < 2) {
        throw NoIntersection("line does not cross the image rectangle");
    }
    std::sort(hits.begin(), hits.end(), [](const PixelPoint& a, const PixelPoint& b) {
        return a.v != b.v ? a.v < b.v : a.u < b.u;
    });
    return ObservedLine{hits.front(), hits.back()};
}

DetectConfig DetectConfig::for_geometry(const ImageGeometry& g, double panel_width_m,
                                        double panel_length_m) {
    const double mpp = g.meters_per_pixel();
    const double width_px = panel_width_m / mpp;
    const double length_px = panel_length_m / mpp;
    DetectConfig cfg;
    cfg.dist_tol = 0.5 * width_px;
    cfg.min_area = std::max(1, static_cast<int>(0.25 * width_px * length_px));
    return cfg;
}

std::vector<LineCluster> cluster_regions(const std::vector<Region>& regions,
                                         const DetectConfig& cfg) {
    std::vector<RegressionLine> lines;
    lines.reserve(regions.size());
    for (const Region& region : regions) {
        lines.push_back(fit_region_line(region));
    }
    return cluster_lines(lines, cfg.angle_tol, cfg.dist_tol);
}

std::vector<ObservedLine> clip_clusters(const std::vector<LineCluster>& clusters,
                                        int width, int height) {
    std::vector<ObservedLine> lines;
    lines.reserve(clusters.size());
    for (const LineCluster& cluster : clusters) {
        try {
            lines.push_back(clip_to_border(cluster.merged, width, height));
        } catch (const NoIntersection&) {
            // A cluster fitted from in-image pixels always crosses the border;
            // guard anyway so one bad fit cannot abort a frame.
        }
    }
    return lines;
}

} // namespace pvtrack
