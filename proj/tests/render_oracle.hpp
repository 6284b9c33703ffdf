#pragma once

// Brute-force reference renderer: every box becomes 12 triangles, every
// pixel ray is tested against every triangle (Moller-Trumbore, no culling),
// nearest hit wins. Deliberately shares no intersection code with
// render_view.

#include "fyi/render.hpp"

namespace oracle {

struct Tri {
    fyi::Vec3 a, b, c;
    int ordinal;
};

inline std::vector<Tri> scene_triangles(const fyi::SceneLayout& layout) {
    // Quad faces of the unit box in the fixed corner order (bit0 x, bit1 y,
    // bit2 z), split into triangles.
    static const int faces[6][4] = {{0, 2, 6, 4}, {1, 3, 7, 5}, {0, 1, 5, 4},
                                    {2, 3, 7, 6}, {0, 1, 3, 2}, {4, 5, 7, 6}};
    std::vector<Tri> tris;
    for (size_t i = 0; i < layout.instances.size(); ++i) {
        const auto corners = layout.instances[i].world_corners();
        for (const auto& f : faces) {
            tris.push_back({corners[f[0]], corners[f[1]], corners[f[2]], static_cast<int>(i) + 1});
            tris.push_back({corners[f[0]], corners[f[2]], corners[f[3]], static_cast<int>(i) + 1});
        }
    }
    return tris;
}

inline bool ray_triangle(const fyi::Vec3& origin, const fyi::Vec3& dir, const Tri& tri, double& t) {
    const fyi::Vec3 e1 = tri.b - tri.a;
    const fyi::Vec3 e2 = tri.c - tri.a;
    const fyi::Vec3 p = cross(dir, e2);
    const double det = dot(e1, p);
    if (std::abs(det) < 1e-14) return false;
    const double inv = 1.0 / det;
    const fyi::Vec3 s = origin - tri.a;
    const double u = dot(s, p) * inv;
    if (u < 0.0 || u > 1.0) return false;
    const fyi::Vec3 q = cross(s, e1);
    const double v = dot(dir, q) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    t = dot(e2, q) * inv;
    return t > 1e-9;
}

inline fyi::RenderedView render_triangles(const fyi::SceneLayout& layout,
                                          const fyi::CameraIntrinsics& K,
                                          const fyi::CameraPose& E) {
    fyi::RenderedView view;
    view.intrinsics = K;
    view.pose = E;
    view.depth.assign(static_cast<size_t>(K.width) * K.height, fyi::kBackgroundDepth);
    view.instance.assign(static_cast<size_t>(K.width) * K.height, 0);
    view.solo_coverage.assign(layout.instances.size(), 0);
    view.visible_coverage.assign(layout.instances.size(), 0);

    const auto tris = scene_triangles(layout);
    const fyi::Vec3 origin = E.center();
    const fyi::Rotation inv = E.rotation.inverse();
    for (int r = 0; r < K.height; ++r) {
        for (int c = 0; c < K.width; ++c) {
            const fyi::Vec3 dir =
                inv.rotate({(c + 0.5 - K.cx) / K.fx, (r + 0.5 - K.cy) / K.fy, 1.0});
            double best = fyi::kBackgroundDepth;
            int who = 0;
            for (const auto& tri : tris) {
                double t;
                if (ray_triangle(origin, dir, tri, t) && t < best) {
                    best = t;
                    who = tri.ordinal;
                }
            }
            if (who != 0) {
                view.depth[static_cast<size_t>(r) * K.width + c] = best;
                view.instance[static_cast<size_t>(r) * K.width + c] = static_cast<uint16_t>(who);
                ++view.visible_coverage[who - 1];
            }
        }
    }
    return view;
}

} // namespace oracle
