#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "pvtrack/thermal.hpp"

namespace pvtrack {

namespace {

constexpr std::int64_t kFar = std::int64_t{1} << 40;

// 1-D squared distance transform: out[q] = min_p (q - p)^2 + f[p],
// computed as the lower envelope of parabolas (Felzenszwalb & Huttenlocher).
// Parabola crossings are rationals with denominator 2(q - p), far coarser
// than double rounding, so integer inputs give exact integer outputs.
void squared_dt_1d(const std::int64_t* f, int n, std::int64_t* out, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -std::numeric_limits<double>::infinity();
    z[1] = std::numeric_limits<double>::infinity();
    for (int q = 1; q < n; ++q) {
        double s;
        for (;;) {
            const int p = v[k];
            s = (static_cast<double>(f[q] - f[p]) + static_cast<double>(q) * q -
                 static_cast<double>(p) * p) /
                (2.0 * (q - p));
            if (s > z[k]) break;
            --k;
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = std::numeric_limits<double>::infinity();
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const std::int64_t dq = q - v[k];
        out[q] = dq * dq + f[v[k]];
    }
}

} // namespace

DistanceMap distance_transform(const GrayImage& img) {
    const int w = img.width;
    const int h = img.height;
    DistanceMap out(w, h);
    if (w == 0 || h == 0) return out;

    // Column pass: squared distance to the nearest zero pixel within each
    // column (two linear sweeps), kFar where the column has none.
    std::vector<std::int64_t> g(static_cast<size_t>(w) * h);
    for (int u = 0; u < w; ++u) {
        std::int64_t d = kFar;
        for (int v = 0; v < h; ++v) {
            d = (img.at(u, v) == 0) ? 0 : (d >= kFar ? kFar : d + 1);
            g[static_cast<size_t>(v) * w + u] = d;
        }
        d = kFar;
        for (int v = h - 1; v >= 0; --v) {
            d = (img.at(u, v) == 0) ? 0 : (d >= kFar ? kFar : d + 1);
            auto& cell = g[static_cast<size_t>(v) * w + u];
            cell = std::min(cell, d);
        }
    }
    for (auto& cell : g) {
        if (cell < kFar) cell *= cell;
    }

    // Row pass over the column results.
    std::vector<std::int64_t> row_in(w), row_out(w);
    std::vector<int> v_buf(w);
    std::vector<double> z_buf(w + 1);
    const float sentinel = static_cast<float>(w + h);
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) row_in[u] = g[static_cast<size_t>(v) * w + u];
        squared_dt_1d(row_in.data(), w, row_out.data(), v_buf.data(), z_buf.data());
        for (int u = 0; u < w; ++u) {
            const std::int64_t d2 = row_out[u];
            out.at(u, v) = d2 >= kFar ? sentinel
                                      : static_cast<float>(std::sqrt(static_cast<double>(d2)));
        }
    }
    return out;
}

} // namespace pvtrack
