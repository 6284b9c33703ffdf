#pragma once

// Pipeline configuration: a flat TOML-style key/value file with [section]
// headers, mirroring every tunable default in the engine. Unknown keys are
// rejected so typos fail loudly.

#include <string>

#include "fyi/gateway.hpp"
#include "fyi/layout.hpp"
#include "fyi/optimize.hpp"
#include "fyi/plan.hpp"

namespace fyi {

struct PipelineConfig {
    // [scene]
    std::string instruction = "Place two cups on a table.";
    double extent = 6.0;
    double cell_size = 0.05;
    double clearance = 0.05;
    bool random_yaw = false;

    // [assets]
    std::string manifest = "assets/demo_assets.json";

    // [retrieval]
    int top_k = 3;
    double min_score = 0.05;

    // [render]
    int width = 128;
    int height = 128;
    double focal_scale = 1.5;
    int threads = 0;

    // [optimizer]
    int views = 2;
    double threshold = 0.8;
    int max_iter = 5;
    double ring_radius_scale = 1.5;
    double ring_elevation_deg = 30.0;

    // [judge]
    double epsilon_px = 2.0;
    double decay_px = 20.0;
    double min_visible = 0.05;

    // [planner]
    double fps = 24.0;
    int max_frames = 240;
    int max_rounds = 3;
    double max_rot_deg_per_frame = 15.0;
    double max_trans_m_per_frame = 0.15;

    // [gateway]
    GatewayConfig gateway;

    static PipelineConfig load_file(const std::string& path);
    static PipelineConfig parse(const std::string& text);

    LayoutParams layout_params() const { return {extent, cell_size, clearance}; }
    JudgeParams judge_params() const { return {epsilon_px, decay_px, min_visible, 0.3}; }
    RingParams ring_params() const {
        return {ring_radius_scale, ring_elevation_deg, focal_scale, width, height, 0.0};
    }
    SmoothnessBudget budget() const { return {max_rot_deg_per_frame, max_trans_m_per_frame}; }
};

} // namespace fyi
