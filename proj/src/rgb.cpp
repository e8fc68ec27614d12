#include "pvtrack/rgb.hpp"

#include <algorithm>
#include <cmath>

#include "pvtrack/errors.hpp"
#include "pvtrack/kernels.hpp"

namespace pvtrack {

void HsvThresholds::validate() const {
    if (!(h_lo <= h_hi) || !(s_lo <= s_hi) || !(v_lo <= v_hi)) {
        throw InvalidThresholds("HSV lower thresholds must not exceed the upper ones");
    }
}

Hsv rgb_to_hsv_pixel(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const float rf = r, gf = g, bf = b;
    const float maxc = std::max({rf, gf, bf});
    const float minc = std::min({rf, gf, bf});
    const float delta = maxc - minc;

    float h = 0.0f;
    if (delta > 0.0f) {
        if (maxc == rf) {
            h = 60.0f * ((gf - bf) / delta);
        } else if (maxc == gf) {
            h = 60.0f * (2.0f + (bf - rf) / delta);
        } else {
            h = 60.0f * (4.0f + (rf - gf) / delta);
        }
        if (h < 0.0f) h += 360.0f;
    }
    const float s = maxc > 0.0f ? 255.0f * delta / maxc : 0.0f;
    return Hsv{h, s, maxc};
}

std::array<std::uint8_t, 3> hsv_to_rgb_pixel(float h, float s, float v) {
    h = std::fmod(h, 360.0f);
    if (h < 0.0f) h += 360.0f;
    const float sf = std::clamp(s / 255.0f, 0.0f, 1.0f);
    const float vf = std::clamp(v, 0.0f, 255.0f);
    const float c = vf * sf;
    const float hp = h / 60.0f;
    const float x = c * (1.0f - std::abs(std::fmod(hp, 2.0f) - 1.0f));
    float r = 0, g = 0, b = 0;
    switch (static_cast<int>(hp)) {
        case 0: r = c; g = x; break;
        case 1: r = x; g = c; break;
        case 2: g = c; b = x; break;
        case 3: g = x; b = c; break;
        case 4: r = x; b = c; break;
        default: r = c; b = x; break;
    }
    const float m = vf - c;
    const auto to_byte = [](float value) {
        return static_cast<std::uint8_t>(std::clamp(value + 0.5f, 0.0f, 255.0f));
    };
    return {to_byte(r + m), to_byte(g + m), to_byte(b + m)};
}

HsvPlanes to_hsv(const RgbImage& img) {
    HsvPlanes planes(img.width, img.height);
    const std::uint8_t* src = img.data.data();
    for (size_t i = 0; i < planes.size(); ++i, src += 3) {
        const Hsv hsv = rgb_to_hsv_pixel(src[0], src[1], src[2]);
        planes.h[i] = hsv.h;
        planes.s[i] = hsv.s;
        planes.v[i] = hsv.v;
    }
    return planes;
}

BinaryMask threshold_hsv(const HsvPlanes& hsv, const HsvThresholds& th) {
    th.validate();
    BinaryMask out(hsv.width, hsv.height);
    kernels::hsv_in_range_f32(hsv.h.data(), hsv.s.data(), hsv.v.data(), out.data.data(),
                              hsv.size(), static_cast<float>(th.h_lo),
                              static_cast<float>(th.h_hi), th.hue_wrap,
                              static_cast<float>(th.s_lo), static_cast<float>(th.s_hi),
                              static_cast<float>(th.v_lo), static_cast<float>(th.v_hi));
    return out;
}

RgbDetection detect_rgb_planes(const HsvPlanes& hsv, const HsvThresholds& th,
                               const DetectConfig& cfg) {
    RgbDetection result;
    result.mask = threshold_hsv(hsv, th);
    result.regions = extract_regions(result.mask, cfg.min_area);
    result.clusters = cluster_regions(result.regions, cfg);
    result.lines = clip_clusters(result.clusters, hsv.width, hsv.height);
    return result;
}

RgbDetection detect_rgb(const RgbImage& img, const HsvThresholds& th, const DetectConfig& cfg) {
    return detect_rgb_planes(to_hsv(img), th, cfg);
}

} // namespace pvtrack
