#pragma once

#include <array>
#include <vector>

#include "pvtrack/geometry.hpp"
#include "pvtrack/raster.hpp"
#include "pvtrack/regions.hpp"
#include "pvtrack/rgb.hpp"
#include "pvtrack/thermal.hpp"

namespace pvtrack {

/// The nine tunable segmentation thresholds.
struct ThresholdSet {
    ThermalThresholds thermal;  // intensity band + distance threshold
    HsvThresholds hsv;

    void validate() const;
};

/// Per-variable box bounds in canonical order: thermal low, thermal high,
/// distance, hue low, sat low, val low, hue high, sat high, val high.
struct ThresholdBounds {
    std::array<double, 9> lower{};
    std::array<double, 9> upper{};

    static ThresholdBounds defaults();
};

std::array<double, 9> thresholds_to_array(const ThresholdSet& th);
ThresholdSet thresholds_from_array(const std::array<double, 9>& x, bool hue_wrap);

/// Everything the segmentation-quality cost needs besides the images.
struct CostContext {
    ImageGeometry geom;
    double panel_width_m = 2.0;
    double panel_length_m = 2.0;
    double heading_image = M_PI / 2.0;  // expected row direction in the image plane
    DetectConfig detect;

    static CostContext for_geometry(const ImageGeometry& g, double panel_width_m,
                                    double panel_length_m);

    /// Modules split at junctions in thermal frames: one module footprint.
    double expected_area_thermal() const;
    /// RGB rows read as one strip crossing the frame.
    double expected_area_rgb() const;
};

struct ShapeTerms {
    double rectangularity = 0.0;  // area over oriented-bounding-box area
    double alignment = 0.0;       // cos^2 of axis-vs-heading angle
    double area_match = 0.0;      // exp(-(area/expected - 1)^2)

    double score() const { return (rectangularity + alignment + area_match) / 3.0; }
};

ShapeTerms shape_terms(const Region& region, double expected_area, double heading);

/// In [0, 1]; 1 when the region looks like a module: rectangular, oriented
/// along the motion direction, with the expected footprint.
double shape_cost(const Region& region, double expected_area, double heading);

/// Fraction of the region's pixels that are set in the other sensor's mask.
double correlation_term(const Region& region, const BinaryMask& other);

struct CostBreakdown {
    double total = 0.0;
    std::vector<double> thermal_shape;
    std::vector<double> thermal_corr;
    std::vector<double> rgb_shape;
    std::vector<double> rgb_corr;

    int thermal_regions() const { return static_cast<int>(thermal_shape.size()); }
    int rgb_regions() const { return static_cast<int>(rgb_shape.size()); }
};

/// Joint quality of both segmentations under one threshold set; more and
/// better regions drive the total more negative, an empty segmentation
/// scores 0 (the worst value).
CostBreakdown segmentation_cost(const GrayImage& thermal, const RgbImage& rgb,
                                const ThresholdSet& th, const CostContext& ctx);

/// Same cost over a pre-converted HSV image (the tuner evaluates the cost
/// many times per frame and keeps the conversion cached).
CostBreakdown segmentation_cost(const GrayImage& thermal, const HsvPlanes& hsv,
                                const ThresholdSet& th, const CostContext& ctx);

} // namespace pvtrack
