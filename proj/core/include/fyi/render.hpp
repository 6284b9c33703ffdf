#pragma once

// Per-view depth and instance-id buffers from analytic ray/box intersection.
// One primary ray per pixel center, slab test in each box's local frame,
// nearest positive hit wins. Depth is camera-space z, +inf = background.

#include <cstdint>
#include <limits>
#include <vector>

#include "fyi/layout.hpp"

namespace fyi {

constexpr double kBackgroundDepth = std::numeric_limits<double>::infinity();

struct RenderedView {
    int view_index = 0;
    CameraIntrinsics intrinsics;
    CameraPose pose;
    std::vector<double> depth;       // height*width, row-major, +inf background
    std::vector<uint16_t> instance;  // 0 background, else 1-based instance ordinal
    // Pixels each instance's box would cover ignoring occlusion (any-hit
    // count, ordinal-1 indexed) and pixels it actually won.
    std::vector<uint32_t> solo_coverage;
    std::vector<uint32_t> visible_coverage;

    int width() const { return intrinsics.width; }
    int height() const { return intrinsics.height; }
    double depth_at(int row, int col) const { return depth[static_cast<size_t>(row) * width() + col]; }
    uint16_t instance_at(int row, int col) const {
        return instance[static_cast<size_t>(row) * width() + col];
    }
};

// Rows are split across `threads` workers (0 = hardware concurrency); the
// buffers are identical for every thread count.
RenderedView render_view(const SceneLayout& layout, const CameraIntrinsics& K, const CameraPose& E,
                         int view_index = 0, int threads = 0);

// Won pixels / any-hit pixels for one instance; 0 when the box never enters
// the view. Raises unknown_instance for an out-of-range ordinal.
double visible_fraction(const RenderedView& view, int instance_ordinal);

} // namespace fyi
