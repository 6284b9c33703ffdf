#include "fyi/render.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

namespace fyi {

namespace {

// Per-instance data for the local-frame slab test. Scaling the ray origin
// and direction by the inverse transform preserves the ray parameter, so a
// hit's t is directly the world-space parameter (camera depth, see below).
struct BoxEntry {
    std::array<double, 9> rot_inv; // world-to-local rotation, row-major
    Vec3 inv_scale;
    Vec3 translation;
    Vec3 lo, hi; // local slab bounds
};

struct HitResult {
    double t;
    int ordinal; // 1-based
};

inline Vec3 mat_apply(const std::array<double, 9>& m, const Vec3& v) {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
}

constexpr double kRayEps = 1e-9;

// Slab intersection; returns the first crossing in front of the origin.
inline bool slab_hit(const BoxEntry& box, const Vec3& origin, const Vec3& dir, double& t_hit) {
    const Vec3 o = hadamard(mat_apply(box.rot_inv, origin - box.translation), box.inv_scale);
    const Vec3 d = hadamard(mat_apply(box.rot_inv, dir), box.inv_scale);
    double t0 = -1e300, t1 = 1e300;
    const double os[3] = {o.x, o.y, o.z};
    const double ds[3] = {d.x, d.y, d.z};
    const double los[3] = {box.lo.x, box.lo.y, box.lo.z};
    const double his[3] = {box.hi.x, box.hi.y, box.hi.z};
    for (int a = 0; a < 3; ++a) {
        if (std::abs(ds[a]) < 1e-15) {
            if (os[a] < los[a] || os[a] > his[a]) return false;
            continue;
        }
        double ta = (los[a] - os[a]) / ds[a];
        double tb = (his[a] - os[a]) / ds[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return false;
    }
    if (t1 < kRayEps) return false;
    t_hit = t0 > kRayEps ? t0 : t1;
    return true;
}

} // namespace

RenderedView render_view(const SceneLayout& layout, const CameraIntrinsics& K, const CameraPose& E,
                         int view_index, int threads) {
    RenderedView view;
    view.view_index = view_index;
    view.intrinsics = K;
    view.pose = E;
    const int W = K.width, H = K.height;
    view.depth.assign(static_cast<size_t>(W) * H, kBackgroundDepth);
    view.instance.assign(static_cast<size_t>(W) * H, 0);
    view.solo_coverage.assign(layout.instances.size(), 0);
    view.visible_coverage.assign(layout.instances.size(), 0);

    std::vector<BoxEntry> boxes;
    boxes.reserve(layout.instances.size());
    for (const auto& inst : layout.instances) {
        BoxEntry b;
        b.rot_inv = inst.transform.rotation.inverse().to_matrix();
        b.inv_scale = {1.0 / inst.transform.scale.x, 1.0 / inst.transform.scale.y,
                       1.0 / inst.transform.scale.z};
        b.translation = inst.transform.translation;
        b.lo = inst.obb.center - inst.obb.half_extents;
        b.hi = inst.obb.center + inst.obb.half_extents;
        boxes.push_back(b);
    }

    const Vec3 origin = E.center();
    const auto rot_world = E.rotation.inverse().to_matrix();

    // Per-thread coverage tallies keep the counts schedule-independent.
    int n_threads = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::clamp(n_threads, 1, std::max(1, H));
    std::vector<std::vector<uint32_t>> solo(n_threads), visible(n_threads);

    const auto render_rows = [&](int tid, int row0, int row1) {
        auto& solo_t = solo[tid];
        auto& visible_t = visible[tid];
        solo_t.assign(boxes.size(), 0);
        visible_t.assign(boxes.size(), 0);
        for (int r = row0; r < row1; ++r) {
            for (int c = 0; c < W; ++c) {
                // Ray direction with camera-space z fixed to 1, so the ray
                // parameter t equals camera depth at the hit point.
                const Vec3 dir_cam{(c + 0.5 - K.cx) / K.fx, (r + 0.5 - K.cy) / K.fy, 1.0};
                const Vec3 dir = mat_apply(rot_world, dir_cam);
                double best_t = kBackgroundDepth;
                int best = 0;
                for (size_t i = 0; i < boxes.size(); ++i) {
                    double t;
                    if (!slab_hit(boxes[i], origin, dir, t)) continue;
                    ++solo_t[i];
                    if (t < best_t) {
                        best_t = t;
                        best = static_cast<int>(i) + 1;
                    }
                }
                if (best != 0) {
                    const size_t px = static_cast<size_t>(r) * W + c;
                    view.depth[px] = best_t;
                    view.instance[px] = static_cast<uint16_t>(best);
                    ++visible_t[best - 1];
                }
            }
        }
    };

    if (n_threads == 1) {
        render_rows(0, 0, H);
    } else {
        std::vector<std::thread> pool;
        const int rows_per = (H + n_threads - 1) / n_threads;
        for (int tid = 0; tid < n_threads; ++tid) {
            const int row0 = tid * rows_per;
            const int row1 = std::min(H, row0 + rows_per);
            pool.emplace_back(render_rows, tid, row0, std::max(row0, row1));
        }
        for (auto& t : pool) t.join();
    }

    for (int tid = 0; tid < n_threads; ++tid) {
        if (solo[tid].empty()) continue;
        for (size_t i = 0; i < boxes.size(); ++i) {
            view.solo_coverage[i] += solo[tid][i];
            view.visible_coverage[i] += visible[tid][i];
        }
    }
    return view;
}

double visible_fraction(const RenderedView& view, int instance_ordinal) {
    if (instance_ordinal < 1 || static_cast<size_t>(instance_ordinal) > view.solo_coverage.size())
        raise(errc::unknown_instance, "ordinal " + std::to_string(instance_ordinal));
    const uint32_t solo = view.solo_coverage[instance_ordinal - 1];
    if (solo == 0) return 0.0;
    return static_cast<double>(view.visible_coverage[instance_ordinal - 1]) / solo;
}

} // namespace fyi
