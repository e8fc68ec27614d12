#pragma once

#include <vector>

#include "pvtrack/lineclust.hpp"
#include "pvtrack/raster.hpp"
#include "pvtrack/regions.hpp"

namespace pvtrack {

/// Keeps pixels whose intensity lies strictly inside (lo, hi), zeroes the rest.
GrayImage threshold_band(const GrayImage& img, int lo, int hi);

/// Exact Euclidean distance of every pixel to the nearest zero-valued pixel.
/// An image without any zero pixel maps to the finite sentinel width+height.
DistanceMap distance_transform(const GrayImage& img);

/// b = 1 iff d > th (strict).
BinaryMask binarize_distance(const DistanceMap& d, double th);

struct ThermalThresholds {
    int low = 140;
    int high = 210;
    double distance_px = 8.0;
};

struct ThermalDetection {
    std::vector<ObservedLine> lines;
    std::vector<LineCluster> clusters;
    std::vector<Region> regions;
    BinaryMask mask;  // binarized distance map
};

/// Full thermal pipeline: band threshold, distance transform, binarize,
/// connected regions, line fit + clustering, border clip.
ThermalDetection detect_thermal(const GrayImage& img, const ThermalThresholds& th,
                                const DetectConfig& cfg);

} // namespace pvtrack
