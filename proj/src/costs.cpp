#include "pvtrack/costs.hpp"

#include <algorithm>
#include <cmath>

#include "pvtrack/errors.hpp"
#include "pvtrack/lineclust.hpp"

namespace pvtrack {

void ThresholdSet::validate() const {
    if (thermal.low < 0 || thermal.high > 255 || thermal.low >= thermal.high) {
        throw InvalidThresholds("thermal band must satisfy 0 <= low < high <= 255");
    }
    if (thermal.distance_px <= 0.0) {
        throw InvalidThresholds("distance threshold must be > 0");
    }
    hsv.validate();
}

ThresholdBounds ThresholdBounds::defaults() {
    ThresholdBounds b;
    b.lower = {0.0, 1.0, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    b.upper = {254.0, 255.0, 60.0, 360.0, 255.0, 255.0, 360.0, 255.0, 255.0};
    return b;
}

std::array<double, 9> thresholds_to_array(const ThresholdSet& th) {
    return {static_cast<double>(th.thermal.low),
            static_cast<double>(th.thermal.high),
            th.thermal.distance_px,
            th.hsv.h_lo,
            th.hsv.s_lo,
            th.hsv.v_lo,
            th.hsv.h_hi,
            th.hsv.s_hi,
            th.hsv.v_hi};
}

ThresholdSet thresholds_from_array(const std::array<double, 9>& x, bool hue_wrap) {
    ThresholdSet th;
    // The thermal band applies to a byte image, so it is evaluated at
    // rounded values; the distance and HSV thresholds stay continuous.
    th.thermal.low = static_cast<int>(std::lround(x[0]));
    th.thermal.high = static_cast<int>(std::lround(x[1]));
    th.thermal.distance_px = x[2];
    th.hsv.h_lo = x[3];
    th.hsv.s_lo = x[4];
    th.hsv.v_lo = x[5];
    th.hsv.h_hi = x[6];
    th.hsv.s_hi = x[7];
    th.hsv.v_hi = x[8];
    th.hsv.hue_wrap = hue_wrap;
    return th;
}

CostContext CostContext::for_geometry(const ImageGeometry& g, double panel_width_m,
                                      double panel_length_m) {
    CostContext ctx;
    ctx.geom = g;
    ctx.panel_width_m = panel_width_m;
    ctx.panel_length_m = panel_length_m;
    ctx.detect = DetectConfig::for_geometry(g, panel_width_m, panel_length_m);
    return ctx;
}

double CostContext::expected_area_thermal() const {
    const double mpp = geom.meters_per_pixel();
    return (panel_width_m / mpp) * (panel_length_m / mpp);
}

double CostContext::expected_area_rgb() const {
    const double mpp = geom.meters_per_pixel();
    const double width_px = panel_width_m / mpp;
    // Chord length of the frame along the expected heading, through the center.
    const double c = std::abs(std::cos(heading_image));
    const double s = std::abs(std::sin(heading_image));
    double chord = std::hypot(geom.width, geom.height);
    if (c > 1e-9) chord = std::min(chord, geom.width / c);
    if (s > 1e-9) chord = std::min(chord, geom.height / s);
    return width_px * chord;
}

ShapeTerms shape_terms(const Region& region, double expected_area, double heading) {
    if (expected_area <= 0.0) throw std::invalid_argument("expected_area must be > 0");
    ShapeTerms terms;
    const double area = region.area();
    terms.area_match = std::exp(-(area / expected_area - 1.0) * (area / expected_area - 1.0));
    if (region.area() < 2) {
        return terms;  // no axis: rectangularity and alignment stay 0
    }
    RegressionLine axis;
    try {
        axis = fit_region_line(region);
    } catch (const DegenerateRegion&) {
        return terms;
    }
    const double obb = (axis.t_max - axis.t_min + 1.0) * (axis.s_max - axis.s_min + 1.0);
    terms.rectangularity = std::min(1.0, area / obb);
    const double dot = axis.dir_u * std::cos(heading) + axis.dir_v * std::sin(heading);
    terms.alignment = dot * dot;
    return terms;
}

double shape_cost(const Region& region, double expected_area, double heading) {
    return shape_terms(region, expected_area, heading).score();
}

double correlation_term(const Region& region, const BinaryMask& other) {
    if (region.pixels.empty()) return 0.0;
    if (region.max_u >= other.width || region.max_v >= other.height) {
        throw ShapeMismatch("region does not fit the paired mask");
    }
    std::size_t overlap = 0;
    for (const PixelCoord& p : region.pixels) {
        overlap += other.at(p.u, p.v) != 0 ? 1 : 0;
    }
    return static_cast<double>(overlap) / static_cast<double>(region.pixels.size());
}

CostBreakdown segmentation_cost(const GrayImage& thermal, const RgbImage& rgb,
                                const ThresholdSet& th, const CostContext& ctx) {
    return segmentation_cost(thermal, to_hsv(rgb), th, ctx);
}

CostBreakdown segmentation_cost(const GrayImage& thermal, const HsvPlanes& hsv,
                                const ThresholdSet& th, const CostContext& ctx) {
    th.validate();

    const GrayImage banded = threshold_band(thermal, th.thermal.low, th.thermal.high);
    const BinaryMask thermal_mask = binarize_distance(distance_transform(banded),
                                                      th.thermal.distance_px);
    const std::vector<Region> thermal_regions = extract_regions(thermal_mask, ctx.detect.min_area);

    const BinaryMask rgb_mask = threshold_hsv(hsv, th.hsv);
    const std::vector<Region> rgb_regions = extract_regions(rgb_mask, ctx.detect.min_area);

    CostBreakdown cost;
    const double heading = ctx.heading_image;
    for (const Region& region : thermal_regions) {
        cost.thermal_shape.push_back(shape_cost(region, ctx.expected_area_thermal(), heading));
        cost.thermal_corr.push_back(correlation_term(region, rgb_mask));
        cost.total -= cost.thermal_shape.back() + cost.thermal_corr.back();
    }
    for (const Region& region : rgb_regions) {
        cost.rgb_shape.push_back(shape_cost(region, ctx.expected_area_rgb(), heading));
        cost.rgb_corr.push_back(correlation_term(region, thermal_mask));
        cost.total -= cost.rgb_shape.back() + cost.rgb_corr.back();
    }
    return cost;
}

} // namespace pvtrack
