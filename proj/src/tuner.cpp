#include "pvtrack/tuner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>

#include "pvtrack/errors.hpp"

namespace pvtrack {

namespace {

using Vars = std::array<double, 9>;

// Stop refining a variable once its step is below its resolution: one
// intensity level, one degree, a quarter pixel of distance.
constexpr Vars kStepTolerance = {1.0, 1.0, 0.25, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};

constexpr std::array<int, 6> kHsvVars = {3, 4, 5, 6, 7, 8};
constexpr std::array<int, 3> kThermalVars = {0, 1, 2};

bool feasible(const Vars& x) {
    // Keep low < high after rounding for the thermal band, and the HSV
    // ordering invariant.
    return x[0] <= x[1] - 1.0 && x[2] > 0.0 && x[3] <= x[6] && x[4] <= x[7] && x[5] <= x[8];
}

double clamp_var(double value, double lo, double hi) { return std::clamp(value, lo, hi); }

struct Evaluator {
    const GrayImage& thermal;
    HsvPlanes hsv;
    const CostContext& ctx;
    bool hue_wrap;
    int evaluations = 0;

    double rgb_stage(const Vars& x) {
        ++evaluations;
        const ThresholdSet th = thresholds_from_array(x, hue_wrap);
        const BinaryMask mask = threshold_hsv(hsv, th.hsv);
        double cost = 0.0;
        for (const Region& region : extract_regions(mask, ctx.detect.min_area)) {
            cost -= shape_cost(region, ctx.expected_area_rgb(), ctx.heading_image);
        }
        return cost;
    }

    double thermal_stage(const Vars& x, const BinaryMask& rgb_mask) {
        ++evaluations;
        const ThresholdSet th = thresholds_from_array(x, hue_wrap);
        const GrayImage banded = threshold_band(thermal, th.thermal.low, th.thermal.high);
        const BinaryMask mask =
            binarize_distance(distance_transform(banded), th.thermal.distance_px);
        double cost = 0.0;
        for (const Region& region : extract_regions(mask, ctx.detect.min_area)) {
            cost -= shape_cost(region, ctx.expected_area_thermal(), ctx.heading_image) +
                    correlation_term(region, rgb_mask);
        }
        return cost;
    }

    CostBreakdown full(const ThresholdSet& th) {
        ++evaluations;
        return segmentation_cost(thermal, hsv, th, ctx);
    }
};

using StageCost = std::function<double(const Vars&)>;

template <size_t N>
void coordinate_descent(Vars& x, double& fx, const std::array<int, N>& vars,
                        const StageCost& cost, const ThresholdBounds& bounds,
                        int max_evaluations, int& used) {
    Vars step{};
    for (int i : vars) step[i] = (bounds.upper[i] - bounds.lower[i]) / 8.0;

    while (used < max_evaluations) {
        bool improved = false;
        for (int i : vars) {
            for (const double sign : {1.0, -1.0}) {
                if (used >= max_evaluations) break;
                Vars candidate = x;
                candidate[i] = clamp_var(x[i] + sign * step[i], bounds.lower[i], bounds.upper[i]);
                if (candidate[i] == x[i] || !feasible(candidate)) continue;
                ++used;
                const double fc = cost(candidate);
                if (fc < fx - 1e-12) {
                    x = candidate;
                    fx = fc;
                    improved = true;
                }
            }
        }
        if (!improved) {
            bool any_left = false;
            for (int i : vars) {
                step[i] *= 0.5;
                if (step[i] >= kStepTolerance[i]) any_left = true;
            }
            if (!any_left) break;
        }
    }
}

// Finite-difference quasi-Newton (BFGS on the active variables) with bound
// projection. The cost is piecewise constant in the thresholds, so the
// differences are taken at resolution scale and a failed line search falls
// back to shrinking steps, mirroring the coordinate path.
template <size_t N>
void quasi_newton(Vars& x, double& fx, const std::array<int, N>& vars, const StageCost& cost,
                  const ThresholdBounds& bounds, int max_evaluations, int& used) {
    constexpr size_t n = N;
    std::array<double, N * N> hinv{};
    std::array<double, N> scale{};
    for (size_t a = 0; a < n; ++a) {
        scale[a] = (bounds.upper[vars[a]] - bounds.lower[vars[a]]) / 64.0;
        hinv[a * n + a] = 1.0;
    }

    const auto project = [&](Vars v) {
        for (int i : vars) v[i] = clamp_var(v[i], bounds.lower[i], bounds.upper[i]);
        return v;
    };
    const auto gradient = [&](const Vars& at, std::array<double, N>& g) {
        for (size_t a = 0; a < n; ++a) {
            const int i = vars[a];
            const double h = std::max(kStepTolerance[i], scale[a]);
            Vars plus = at, minus = at;
            plus[i] = clamp_var(at[i] + h, bounds.lower[i], bounds.upper[i]);
            minus[i] = clamp_var(at[i] - h, bounds.lower[i], bounds.upper[i]);
            const double span = plus[i] - minus[i];
            if (span <= 0.0 || !feasible(plus) || !feasible(minus)) {
                g[a] = 0.0;
                continue;
            }
            used += 2;
            g[a] = (cost(plus) - cost(minus)) / span;
        }
    };

    std::array<double, N> g{};
    gradient(x, g);
    for (int iter = 0; iter < 60 && used < max_evaluations; ++iter) {
        std::array<double, N> dir{};
        double dir_norm = 0.0;
        for (size_t a = 0; a < n; ++a) {
            double acc = 0.0;
            for (size_t b = 0; b < n; ++b) acc += hinv[a * n + b] * g[b];
            dir[a] = -acc;
            dir_norm = std::max(dir_norm, std::abs(dir[a]));
        }
        if (dir_norm < 1e-15) break;

        bool stepped = false;
        Vars next = x;
        double f_next = fx;
        for (double t = 1.0; t >= 1.0 / 64.0 && used < max_evaluations; t *= 0.5) {
            Vars candidate = x;
            for (size_t a = 0; a < n; ++a) {
                const int i = vars[a];
                candidate[i] += t * dir[a] * scale[a] * 8.0 / std::max(dir_norm, 1e-12);
            }
            candidate = project(candidate);
            if (!feasible(candidate)) continue;
            ++used;
            const double fc = cost(candidate);
            if (fc < fx - 1e-12) {
                next = candidate;
                f_next = fc;
                stepped = true;
                break;
            }
        }
        if (!stepped) {
            for (auto& s : scale) s *= 0.5;
            bool any_left = false;
            for (size_t a = 0; a < n; ++a) {
                if (scale[a] >= kStepTolerance[vars[a]] / 4.0) any_left = true;
            }
            if (!any_left) break;
            continue;
        }

        std::array<double, N> g_next{};
        gradient(next, g_next);
        // Damped BFGS update on the inverse Hessian.
        std::array<double, N> s{}, y{};
        double sy = 0.0;
        for (size_t a = 0; a < n; ++a) {
            s[a] = next[vars[a]] - x[vars[a]];
            y[a] = g_next[a] - g[a];
            sy += s[a] * y[a];
        }
        if (sy > 1e-12) {
            std::array<double, N> hy{};
            double yhy = 0.0;
            for (size_t a = 0; a < n; ++a) {
                double acc = 0.0;
                for (size_t b = 0; b < n; ++b) acc += hinv[a * n + b] * y[b];
                hy[a] = acc;
                yhy += y[a] * acc;
            }
            for (size_t a = 0; a < n; ++a) {
                for (size_t b = 0; b < n; ++b) {
                    hinv[a * n + b] += ((sy + yhy) * s[a] * s[b]) / (sy * sy) -
                                       (hy[a] * s[b] + s[a] * hy[b]) / sy;
                }
            }
        }
        x = next;
        fx = f_next;
        g = g_next;
    }
}

template <size_t N>
void run_stage(TuneMethod method, Vars& x, double& fx, const std::array<int, N>& vars,
               const StageCost& cost, const ThresholdBounds& bounds, int max_evaluations,
               int& used) {
    if (method == TuneMethod::QuasiNewton) {
        quasi_newton(x, fx, vars, cost, bounds, max_evaluations, used);
    } else {
        coordinate_descent(x, fx, vars, cost, bounds, max_evaluations, used);
    }
}

// A zero-cost start means the stage sees no regions at all and has no local
// signal to follow; the widest feasible bands are the one deterministic
// point guaranteed to segment the most.
template <size_t N>
void seed_if_flat(Vars& x, double& fx, const std::array<int, N>& vars, const Vars& widest,
                  const StageCost& cost, int& used) {
    if (fx < 0.0) return;
    Vars candidate = x;
    for (int i : vars) candidate[i] = widest[i];
    if (!feasible(candidate)) return;
    ++used;
    const double fc = cost(candidate);
    if (fc < fx) {
        x = candidate;
        fx = fc;
    }
}

} // namespace

TuneResult optimize_thresholds(const GrayImage& thermal, const RgbImage& rgb,
                               const ThresholdSet& init, const CostContext& ctx,
                               const TuneOptions& options) {
    init.validate();
    const Vars x0 = thresholds_to_array(init);
    for (int i = 0; i < 9; ++i) {
        if (x0[i] < options.bounds.lower[i] - 1e-9 || x0[i] > options.bounds.upper[i] + 1e-9) {
            throw InvalidThresholds("initial thresholds violate the bounds");
        }
    }

    using Clock = std::chrono::steady_clock;
    const auto t_start = Clock::now();
    const auto seconds_since = [](Clock::time_point from) {
        return std::chrono::duration<double>(Clock::now() - from).count();
    };

    Evaluator eval{thermal, to_hsv(rgb), ctx, init.hsv.hue_wrap};
    Vars x = x0;
    int used = 0;

    Vars widest = x0;
    for (int i = 0; i < 3; ++i) widest[i] = options.bounds.lower[i];
    widest[1] = options.bounds.upper[1];
    for (int i = 3; i < 6; ++i) widest[i] = options.bounds.lower[i];
    for (int i = 6; i < 9; ++i) widest[i] = options.bounds.upper[i];

    // Stage 1: HSV thresholds on the RGB shape terms only.
    const auto t_hsv = Clock::now();
    const StageCost rgb_cost = [&](const Vars& v) { return eval.rgb_stage(v); };
    double f_rgb = eval.rgb_stage(x);
    ++used;
    seed_if_flat(x, f_rgb, kHsvVars, widest, rgb_cost, used);
    run_stage(options.method, x, f_rgb, kHsvVars, rgb_cost, options.bounds,
              options.max_evaluations, used);
    const double hsv_seconds = seconds_since(t_hsv);

    // Stage 2: thermal thresholds against the frozen RGB mask.
    const auto t_thermal = Clock::now();
    const BinaryMask rgb_mask =
        threshold_hsv(eval.hsv, thresholds_from_array(x, init.hsv.hue_wrap).hsv);
    const StageCost thermal_cost = [&](const Vars& v) { return eval.thermal_stage(v, rgb_mask); };
    double f_thermal = eval.thermal_stage(x, rgb_mask);
    ++used;
    seed_if_flat(x, f_thermal, kThermalVars, widest, thermal_cost, used);
    run_stage(options.method, x, f_thermal, kThermalVars, thermal_cost, options.bounds,
              options.max_evaluations, used);
    const double thermal_seconds = seconds_since(t_thermal);

    // The stages optimize sub-costs; never return anything worse than the
    // init under the full cost.
    const CostBreakdown initial_full = eval.full(init);
    ThresholdSet tuned = thresholds_from_array(x, init.hsv.hue_wrap);
    CostBreakdown final_full = eval.full(tuned);
    if (final_full.total > initial_full.total) {
        tuned = init;
        final_full = initial_full;
    }
    if (final_full.thermal_regions() == 0 && final_full.rgb_regions() == 0) {
        throw NoRegionsDetected("threshold tuning found no usable regions in either image");
    }

    TuneResult result;
    result.thresholds = tuned;
    result.final_cost = std::move(final_full);
    result.initial_cost = initial_full.total;
    result.hsv_seconds = hsv_seconds;
    result.thermal_seconds = thermal_seconds;
    result.total_seconds = seconds_since(t_start);
    result.evaluations = eval.evaluations;
    return result;
}

} // namespace pvtrack
