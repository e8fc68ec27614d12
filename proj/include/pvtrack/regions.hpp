#pragma once

#include <cstdint>
#include <vector>

#include "pvtrack/raster.hpp"

namespace pvtrack {

struct PixelCoord {
    std::uint16_t u = 0;
    std::uint16_t v = 0;
};

/// One 4-connected component of mask pixels.
struct Region {
    std::vector<PixelCoord> pixels;  // sorted row-major
    int min_u = 0, min_v = 0, max_u = 0, max_v = 0;

    int area() const { return static_cast<int>(pixels.size()); }
};

/// 4-connected components of 1-pixels with area >= min_area, ordered by
/// their first pixel in row-major scan order (top-left-most first).
std::vector<Region> extract_regions(const BinaryMask& mask, int min_area);

} // namespace pvtrack
