#pragma once

#include "pvtrack/costs.hpp"

namespace pvtrack {

enum class TuneMethod {
    CoordinateDescent,  // derivative-free, deterministic; the default
    QuasiNewton,        // finite-difference projected quasi-Newton
};

struct TuneOptions {
    TuneMethod method = TuneMethod::CoordinateDescent;
    ThresholdBounds bounds = ThresholdBounds::defaults();
    int max_evaluations = 4000;
};

struct TuneResult {
    ThresholdSet thresholds;
    CostBreakdown final_cost;       // full cost at the returned thresholds
    double initial_cost = 0.0;      // full cost at the init
    double hsv_seconds = 0.0;       // stage 1 wall time
    double thermal_seconds = 0.0;   // stage 2 wall time
    double total_seconds = 0.0;
    int evaluations = 0;
};

/// Two-stage bounded minimization of the segmentation cost: stage one tunes
/// the six HSV thresholds on the RGB shape terms alone, stage two tunes the
/// three thermal thresholds (including correlation against the stage-one RGB
/// mask) with the HSV result frozen. The returned thresholds never score
/// worse than the init on the full cost. Throws NoRegionsDetected when both
/// stages end with empty segmentations.
TuneResult optimize_thresholds(const GrayImage& thermal, const RgbImage& rgb,
                               const ThresholdSet& init, const CostContext& ctx,
                               const TuneOptions& options = {});

} // namespace pvtrack
