#pragma once

#include <cassert>
#include <cstdint>
#include <vector>

namespace pvtrack {

/// Row-major single-channel raster.
template <typename T>
struct Grid {
    int width = 0;
    int height = 0;
    std::vector<T> data;

    Grid() = default;
    Grid(int w, int h, T fill = T{}) : width(w), height(h), data(static_cast<size_t>(w) * h, fill) {}

    T& at(int u, int v) {
        assert(u >= 0 && u < width && v >= 0 && v < height);
        return data[static_cast<size_t>(v) * width + u];
    }
    const T& at(int u, int v) const {
        assert(u >= 0 && u < width && v >= 0 && v < height);
        return data[static_cast<size_t>(v) * width + u];
    }

    size_t size() const { return data.size(); }

    bool same_shape(const Grid& other) const {
        return width == other.width && height == other.height;
    }

    bool operator==(const Grid& other) const {
        return width == other.width && height == other.height && data == other.data;
    }
};

using GrayImage = Grid<std::uint8_t>;   // thermal intensity, 0..255
using BinaryMask = Grid<std::uint8_t>;  // values 0/1
using DistanceMap = Grid<float>;        // Euclidean distance in pixels

/// Interleaved 8-bit RGB raster.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;  // r,g,b per pixel

    RgbImage() = default;
    RgbImage(int w, int h) : width(w), height(h), data(static_cast<size_t>(w) * h * 3, 0) {}

    std::uint8_t* px(int u, int v) { return &data[(static_cast<size_t>(v) * width + u) * 3]; }
    const std::uint8_t* px(int u, int v) const {
        return &data[(static_cast<size_t>(v) * width + u) * 3];
    }

    bool operator==(const RgbImage& other) const {
        return width == other.width && height == other.height && data == other.data;
    }
};

/// Planar float HSV: H in degrees [0,360), S and V in [0,255].
struct HsvPlanes {
    int width = 0;
    int height = 0;
    std::vector<float> h, s, v;

    HsvPlanes() = default;
    HsvPlanes(int w, int hgt)
        : width(w), height(hgt),
          h(static_cast<size_t>(w) * hgt), s(h.size()), v(h.size()) {}

    size_t size() const { return h.size(); }
};

} // namespace pvtrack
