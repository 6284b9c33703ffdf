#pragma once

// Desk-scale benchmark scenarios: seeded misplacement scenes for measuring
// how many views the optimizer needs, and seeded jerky plans for measuring
// the refinement loop. Shared by the CLI `bench` subcommand, the acceptance
// suite and the microbenchmarks.

#include "fyi/optimize.hpp"
#include "fyi/plan.hpp"

namespace fyi {

struct MisplacementParams {
    int scenes = 100;
    int views = 2;
    uint64_t seed = 7;
    double offset_min = 0.1, offset_max = 0.5; // injected vertical float, meters
    double threshold = 0.8;
    int max_iter = 5;
    int image_size = 64;
    // The first camera looks straight down the offset axis from far away (it
    // cannot see a vertical float); the remaining views sit low and close,
    // where the same float is plainly visible.
    double aligned_radius_scale = 2.5;
    double side_radius_scale = 1.0;
    double side_elevation_deg = 15.0;
    double side_focal_scale = 2.5;
};

struct MisplacementResult {
    int scenes = 0;
    int reported_passed = 0; // optimizer's own verdicts
    int truly_fixed = 0;     // support gap actually closed
    double success_rate = 0.0;
    double elapsed_s = 0.0;
};

// Each scene: a desk auto-placed at the center, a mug placed at a random
// spot on it, then floated up by a random offset. Success means the
// optimizer both reports passed and actually closed the gap (within 1 mm).
MisplacementResult run_misplacement_benchmark(const AssetRepository& repo,
                                              const MisplacementParams& params);

struct JerkyPlanParams {
    int plans = 50;
    uint64_t seed = 11;
    SmoothnessBudget budget;
    int max_rounds = 3;
    double fps = 24.0;
    int max_frames = 240;
};

struct JerkyPlanResult {
    int plans = 0;
    double mean_violations_before = 0.0;
    double mean_violations_after = 0.0;
    int fully_smoothed = 0; // plans with zero violations after refinement
    int max_rounds_used = 0;
    double elapsed_s = 0.0;
};

// Each plan drives an airplane through aggressive turns and moves that
// violate the budget by construction, then runs the refinement loop.
JerkyPlanResult run_jerky_plan_benchmark(const AssetRepository& repo, const JerkyPlanParams& params);

} // namespace fyi
