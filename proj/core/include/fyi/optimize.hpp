#pragma once

// Multi-view verification loop: render every view, score every constraint in
// every view, average per constraint, gate on a threshold, and relocate the
// worst offender until the scene passes or iterations run out.

#include <vector>

#include "fyi/judge.hpp"

namespace fyi {

struct Relocation {
    std::string instance_id;
    Vec3 from, to;
};

struct ConstraintScore {
    SpatialConstraint constraint;
    double score = 0.0;
};

struct OptimizationReport {
    int iterations = 0;
    bool passed = false;
    std::vector<ConstraintScore> constraint_scores; // final layout's scores
    std::vector<Relocation> relocations;
    std::vector<std::string> notes; // placement errors recorded, never thrown

    json to_json() const;
};

struct OptimizeParams {
    double threshold = 0.8;
    int max_iter = 5;
    int render_threads = 0;
};

// Cameras at equal azimuths on a circle of radius radius_scale x the scene's
// bounding-box diagonal, at `elevation_deg` above the centroid plane, all
// aimed at the centroid. fx = fy = focal_scale * width.
struct RingParams {
    double radius_scale = 1.5;
    double elevation_deg = 30.0;
    double focal_scale = 1.5;
    int width = 128, height = 128;
    double start_azimuth_deg = 0.0;
};

std::vector<CameraRig> make_camera_ring(const SceneLayout& layout, int views,
                                        const RingParams& params = {});

// Mutates `layout` toward the best configuration seen; when the loop fails
// to pass it leaves the best-scoring layout in place and reports passed =
// false. Relocation moves exactly one object per iteration: the worst
// constraint's subject, snapped vertically onto its support first, then
// re-placed laterally within the reference's surface region.
OptimizationReport optimize_layout(SceneLayout& layout, const std::vector<CameraRig>& cameras,
                                   JudgeHandle& judge, const OptimizeParams& params = {});

} // namespace fyi
