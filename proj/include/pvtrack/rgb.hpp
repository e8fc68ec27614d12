#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "pvtrack/lineclust.hpp"
#include "pvtrack/raster.hpp"
#include "pvtrack/regions.hpp"

namespace pvtrack {

/// HSV band thresholds. Hue is handled in degrees [0, 360) everywhere,
/// independent of any byte encoding a raster format may use. With hue_wrap
/// the selected hue set is the complement of [h_lo, h_hi], for reddish
/// targets whose hue straddles 0/360.
struct HsvThresholds {
    double h_lo = 195.0, s_lo = 100.0, v_lo = 60.0;   // th4, th5, th6
    double h_hi = 250.0, s_hi = 245.0, v_hi = 235.0;  // th7, th8, th9
    bool hue_wrap = false;

    void validate() const;
};

struct Hsv {
    float h;  // degrees [0, 360)
    float s;  // [0, 255]
    float v;  // [0, 255]
};

Hsv rgb_to_hsv_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b);
std::array<std::uint8_t, 3> hsv_to_rgb_pixel(float h, float s, float v);

HsvPlanes to_hsv(const RgbImage& img);

BinaryMask threshold_hsv(const HsvPlanes& hsv, const HsvThresholds& th);

struct RgbDetection {
    std::vector<ObservedLine> lines;
    std::vector<LineCluster> clusters;
    std::vector<Region> regions;
    BinaryMask mask;
};

/// Color pipeline: HSV conversion and band mask, then the same region /
/// line-cluster / border-clip chain as the thermal pipeline.
RgbDetection detect_rgb(const RgbImage& img, const HsvThresholds& th, const DetectConfig& cfg);

/// Mask + regions from already-converted planes (the threshold tuner keeps
/// the conversion cached across cost evaluations).
RgbDetection detect_rgb_planes(const HsvPlanes& hsv, const HsvThresholds& th,
                               const DetectConfig& cfg);

} // namespace pvtrack
