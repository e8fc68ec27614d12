#pragma once

#include <cstddef>
#include <vector>

#include "pvtrack/geometry.hpp"
#include "pvtrack/regions.hpp"

namespace pvtrack {

/// Orthogonal regression line through a pixel set. Carries the raw moment
/// sums so cluster merges can refit on the union of member pixels, plus the
/// pixel extent along both principal axes.
struct RegressionLine {
    double centroid_u = 0.0;
    double centroid_v = 0.0;
    double dir_u = 0.0;  // unit, canonicalized: dir_v >= 0, dir_u > 0 if dir_v == 0
    double dir_v = 0.0;
    // raw sums over member pixels
    double n = 0.0;
    double sum_u = 0.0, sum_v = 0.0;
    double sum_uu = 0.0, sum_vv = 0.0, sum_uv = 0.0;
    // extent of member pixels projected on dir (t) and its normal (s),
    // relative to the centroid
    double t_min = 0.0, t_max = 0.0;
    double s_min = 0.0, s_max = 0.0;
};

struct LineCluster {
    std::vector<std::size_t> members;  // indices into the input line list
    RegressionLine merged;
};

/// Detected line clipped to the image border rectangle [0,U] x [0,V],
/// endpoints ordered by ascending v then u.
struct ObservedLine {
    PixelPoint p1;
    PixelPoint p2;
};

/// Total-least-squares fit (principal axis through the centroid).
/// Throws DegenerateRegion for fewer than 2 pixels or zero spread.
RegressionLine fit_region_line(const Region& region);

/// Same fit over an explicit pixel list (shape analysis reuses it).
RegressionLine fit_pixels_line(const std::vector<PixelCoord>& pixels);

/// Angle between two lines, in [0, pi/2] (directions compared modulo pi).
double line_angle_between(const RegressionLine& a, const RegressionLine& b);

/// Mean orthogonal distance between the two line segments: the segment of
/// each line spanned by its member pixels is averaged against the other
/// infinite line, and the two directions are averaged.
double line_pair_distance(const RegressionLine& a, const RegressionLine& b);

/// Transitive closure of the pairwise predicate (angle <= angle_tol AND
/// mean segment distance <= dist_tol); each cluster's line is refit on the
/// union of member pixels.
std::vector<LineCluster> cluster_lines(const std::vector<RegressionLine>& lines,
                                       double angle_tol, double dist_tol);

/// Intersection of the infinite line with the image border rectangle.
/// Throws NoIntersection when the line misses the rectangle.
ObservedLine clip_to_border(const RegressionLine& line, int width, int height);

struct DetectConfig {
    double angle_tol = 5.0 * M_PI / 180.0;
    double dist_tol = 66.0;  // pixels; default 0.5 * panel width at z_g
    int min_area = 4000;     // pixels; default 0.25 * expected panel area

    static DetectConfig for_geometry(const ImageGeometry& g, double panel_width_m,
                                     double panel_length_m);
};

/// Shared back half of both segmentation pipelines: fit a line per region,
/// cluster, and clip the merged lines to the image border.
std::vector<LineCluster> cluster_regions(const std::vector<Region>& regions,
                                         const DetectConfig& cfg);
std::vector<ObservedLine> clip_clusters(const std::vector<LineCluster>& clusters,
                                        int width, int height);

} // namespace pvtrack
