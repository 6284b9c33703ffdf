#pragma once

// Shared fixtures and independent oracles for the test suites. Everything in
// here deliberately re-derives results through a different route than the
// library (explicit 4x4 matrices, triangle meshes, exhaustive scans) so the
// implementation is checked against genuinely separate arithmetic.

#include <array>
#include <cmath>
#include <string>

#include "fyi/assets.hpp"
#include "fyi/geometry.hpp"
#include "fyi/rng.hpp"

namespace oracle {

inline std::string source_dir() { return FYI_SOURCE_DIR; }

inline fyi::AssetRepository demo_repo() {
    return fyi::AssetRepository::load_file(source_dir() + "/assets/demo_assets.json");
}

// Column-vector 4x4 homogeneous matrix, row-major storage.
using Mat4 = std::array<double, 16>;

inline Mat4 mat4_identity() {
    return {1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
}

inline Mat4 mat4_mul(const Mat4& a, const Mat4& b) {
    Mat4 out{};
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) {
            double s = 0.0;
            for (int k = 0; k < 4; ++k) s += a[r * 4 + k] * b[k * 4 + c];
            out[r * 4 + c] = s;
        }
    return out;
}

// Quaternion to matrix by the textbook expansion, written independently of
// Rotation::to_matrix.
inline Mat4 mat4_from_quat(double w, double x, double y, double z) {
    const double n = std::sqrt(w * w + x * x + y * y + z * z);
    w /= n;
    x /= n;
    y /= n;
    z /= n;
    Mat4 m = mat4_identity();
    m[0] = w * w + x * x - y * y - z * z;
    m[1] = 2 * (x * y - w * z);
    m[2] = 2 * (x * z + w * y);
    m[4] = 2 * (x * y + w * z);
    m[5] = w * w - x * x + y * y - z * z;
    m[6] = 2 * (y * z - w * x);
    m[8] = 2 * (x * z - w * y);
    m[9] = 2 * (y * z + w * x);
    m[10] = w * w - x * x - y * y + z * z;
    return m;
}

inline Mat4 mat4_scale(double sx, double sy, double sz) {
    Mat4 m = mat4_identity();
    m[0] = sx;
    m[5] = sy;
    m[10] = sz;
    return m;
}

inline Mat4 mat4_translate(double tx, double ty, double tz) {
    Mat4 m = mat4_identity();
    m[3] = tx;
    m[7] = ty;
    m[11] = tz;
    return m;
}

inline fyi::Vec3 mat4_apply(const Mat4& m, const fyi::Vec3& p) {
    const double w = m[12] * p.x + m[13] * p.y + m[14] * p.z + m[15];
    return {(m[0] * p.x + m[1] * p.y + m[2] * p.z + m[3]) / w,
            (m[4] * p.x + m[5] * p.y + m[6] * p.z + m[7]) / w,
            (m[8] * p.x + m[9] * p.y + m[10] * p.z + m[11]) / w};
}

// Full homogeneous projection pipeline: K [R|t] p, then perspective divide.
inline fyi::PixelCoord project_homogeneous(const fyi::CameraIntrinsics& K, const fyi::CameraPose& E,
                                           const fyi::Vec3& p) {
    const Mat4 rt = mat4_mul(mat4_translate(E.translation.x, E.translation.y, E.translation.z),
                             mat4_from_quat(E.rotation.w, E.rotation.x, E.rotation.y, E.rotation.z));
    const fyi::Vec3 cam = mat4_apply(rt, p);
    // 3x3 K applied to the homogeneous image point.
    const double u = K.fx * cam.x + K.cx * cam.z;
    const double v = K.fy * cam.y + K.cy * cam.z;
    return {u / cam.z, v / cam.z};
}

inline fyi::Rotation random_rotation(fyi::Rng& rng) {
    // Shoemake's uniform quaternion sampling.
    const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
    const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
    return fyi::Rotation(a * std::sin(2 * fyi::kPi * u2), a * std::cos(2 * fyi::kPi * u2),
                         b * std::sin(2 * fyi::kPi * u3), b * std::cos(2 * fyi::kPi * u3));
}

inline fyi::Vec3 random_vec(fyi::Rng& rng, double lo, double hi) {
    return {rng.uniform(lo, hi), rng.uniform(lo, hi), rng.uniform(lo, hi)};
}

} // namespace oracle
