#include "pvtrack/regions.hpp"

#include <algorithm>
#include <stdexcept>

namespace pvtrack {

std::vector<Region> extract_regions(const BinaryMask& mask, int min_area) {
    if (min_area < 1) throw std::invalid_argument("min_area must be >= 1");
    const int w = mask.width;
    const int h = mask.height;
    if (w > 0xffff || h > 0xffff) throw std::invalid_argument("mask too large for region coords");

    std::vector<Region> regions;
    std::vector<std::uint8_t> visited(mask.size(), 0);
    std::vector<std::uint32_t> stack;

    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const std::uint32_t start = static_cast<std::uint32_t>(v) * w + u;
            if (mask.data[start] == 0 || visited[start]) continue;

            Region region;
            region.min_u = region.max_u = u;
            region.min_v = region.max_v = v;
            visited[start] = 1;
            stack.assign(1, start);
            while (!stack.empty()) {
                const std::uint32_t idx = stack.back();
                stack.pop_back();
                const int pu = static_cast<int>(idx % w);
                const int pv = static_cast<int>(idx / w);
                region.pixels.push_back({static_cast<std::uint16_t>(pu), static_cast<std::uint16_t>(pv)});
                region.min_u = std::min(region.min_u, pu);
                region.max_u = std::max(region.max_u, pu);
                region.min_v = std::min(region.min_v, pv);
                region.max_v = std::max(region.max_v, pv);

                const auto try_push = [&](int nu, int nv) {
                    if (nu < 0 || nu >= w || nv < 0 || nv >= h) return;
                    const std::uint32_t nidx = static_cast<std::uint32_t>(nv) * w + nu;
                    if (mask.data[nidx] == 0 || visited[nidx]) return;
                    visited[nidx] = 1;
                    stack.push_back(nidx);
                };
                try_push(pu - 1, pv);
                try_push(pu + 1, pv);
                try_push(pu, pv - 1);
                try_push(pu, pv + 1);
            }

            if (region.area() >= min_area) {
                // Canonical pixel order regardless of traversal order.
                std::sort(region.pixels.begin(), region.pixels.end(),
                          [](PixelCoord a, PixelCoord b) {
                              return a.v != b.v ? a.v < b.v : a.u < b.u;
                          });
                regions.push_back(std::move(region));
            }
        }
    }
    return regions;
}

} // namespace pvtrack
