#include "pvtrack/thermal.hpp"

#include "pvtrack/errors.hpp"
#include "pvtrack/kernels.hpp"

namespace pvtrack {

GrayImage threshold_band(const GrayImage& img, int lo, int hi) {
    if (lo < 0 || hi > 255 || lo >= hi) {
        throw InvalidThresholds("threshold band requires 0 <= lo < hi <= 255");
    }
    GrayImage out(img.width, img.height);
    kernels::threshold_band_u8(img.data.data(), out.data.data(), img.size(),
                               static_cast<std::uint8_t>(lo), static_cast<std::uint8_t>(hi));
    return out;
}

BinaryMask binarize_distance(const DistanceMap& d, double th) {
    if (th <= 0.0) throw InvalidThresholds("distance threshold must be > 0");
    BinaryMask out(d.width, d.height);
    kernels::binarize_gt_f32(d.data.data(), out.data.data(), d.size(), static_cast<float>(th));
    return out;
}

ThermalDetection detect_thermal(const GrayImage& img, const ThermalThresholds& th,
                                const DetectConfig& cfg) {
    ThermalDetection result;
    const GrayImage banded = threshold_band(img, th.low, th.high);
    const DistanceMap dist = distance_transform(banded);
    result.mask = binarize_distance(dist, th.distance_px);
    result.regions = extract_regions(result.mask, cfg.min_area);
    result.clusters = cluster_regions(result.regions, cfg);
    result.lines = clip_clusters(result.clusters, img.width, img.height);
    return result;
}

} // namespace pvtrack
