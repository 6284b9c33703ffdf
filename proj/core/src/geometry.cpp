#include "fyi/geometry.hpp"

#include <algorithm>

namespace fyi {

Vec3 normalized(const Vec3& v) {
    const double n = norm(v);
    if (!(n > 1e-12) || !std::isfinite(n)) raise(errc::non_finite, "cannot normalize near-zero vector");
    return v / n;
}

Rotation::Rotation(double w_, double x_, double y_, double z_) {
    const double n = std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
    if (!std::isfinite(n) || n < 1e-12) raise(errc::non_finite, "quaternion norm is zero or not finite");
    w = w_ / n;
    x = x_ / n;
    y = y_ / n;
    z = z_ / n;
}

Rotation Rotation::yaw(double rad) { return axis_angle({0.0, 0.0, 1.0}, rad); }

Rotation Rotation::axis_angle(const Vec3& axis, double rad) {
    const Vec3 a = normalized(axis);
    const double h = 0.5 * rad;
    const double s = std::sin(h);
    return {std::cos(h), a.x * s, a.y * s, a.z * s};
}

std::array<double, 9> Rotation::to_matrix() const {
    const double xx = x * x, yy = y * y, zz = z * z;
    const double xy = x * y, xz = x * z, yz = y * z;
    const double wx = w * x, wy = w * y, wz = w * z;
    return {1.0 - 2.0 * (yy + zz), 2.0 * (xy - wz),       2.0 * (xz + wy),
            2.0 * (xy + wz),       1.0 - 2.0 * (xx + zz), 2.0 * (yz - wx),
            2.0 * (xz - wy),       2.0 * (yz + wx),       1.0 - 2.0 * (xx + yy)};
}

Rotation Rotation::from_matrix(const std::array<double, 9>& m) {
    // Shepperd's method: pick the largest diagonal combination for stability.
    const double trace = m[0] + m[4] + m[8];
    double w_, x_, y_, z_;
    if (trace > 0.0) {
        const double s = std::sqrt(trace + 1.0) * 2.0;
        w_ = 0.25 * s;
        x_ = (m[7] - m[5]) / s;
        y_ = (m[2] - m[6]) / s;
        z_ = (m[3] - m[1]) / s;
    } else if (m[0] > m[4] && m[0] > m[8]) {
        const double s = std::sqrt(1.0 + m[0] - m[4] - m[8]) * 2.0;
        w_ = (m[7] - m[5]) / s;
        x_ = 0.25 * s;
        y_ = (m[1] + m[3]) / s;
        z_ = (m[2] + m[6]) / s;
    } else if (m[4] > m[8]) {
        const double s = std::sqrt(1.0 + m[4] - m[0] - m[8]) * 2.0;
        w_ = (m[2] - m[6]) / s;
        x_ = (m[1] + m[3]) / s;
        y_ = 0.25 * s;
        z_ = (m[5] + m[7]) / s;
    } else {
        const double s = std::sqrt(1.0 + m[8] - m[0] - m[4]) * 2.0;
        w_ = (m[3] - m[1]) / s;
        x_ = (m[2] + m[6]) / s;
        y_ = (m[5] + m[7]) / s;
        z_ = 0.25 * s;
    }
    return {w_, x_, y_, z_};
}

Vec3 Rotation::rotate(const Vec3& v) const {
    // q * v * q^-1 via the two-cross-product form.
    const Vec3 u{x, y, z};
    const Vec3 t = cross(u, v) * 2.0;
    return v + t * w + cross(u, t);
}

Rotation Rotation::operator*(const Rotation& r) const {
    return {w * r.w - x * r.x - y * r.y - z * r.z, w * r.x + x * r.w + y * r.z - z * r.y,
            w * r.y - x * r.z + y * r.w + z * r.x, w * r.z + x * r.y - y * r.x + z * r.w};
}

double Rotation::yaw_angle() const {
    // Direction the rotated +X axis points in the ground plane.
    const Vec3 fwd = rotate({1.0, 0.0, 0.0});
    return std::atan2(fwd.y, fwd.x);
}

Rotation slerp(const Rotation& a, const Rotation& b, double t) {
    double d = a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
    double sign = 1.0;
    if (d < 0.0) { // take the short arc
        d = -d;
        sign = -1.0;
    }
    d = std::min(d, 1.0);
    const double theta = std::acos(d);
    if (theta < 1e-9) {
        return {a.w + (sign * b.w - a.w) * t, a.x + (sign * b.x - a.x) * t, a.y + (sign * b.y - a.y) * t,
                a.z + (sign * b.z - a.z) * t};
    }
    const double sa = std::sin((1.0 - t) * theta) / std::sin(theta);
    const double sb = sign * std::sin(t * theta) / std::sin(theta);
    return {sa * a.w + sb * b.w, sa * a.x + sb * b.x, sa * a.y + sb * b.y, sa * a.z + sb * b.z};
}

double geodesic_angle(const Rotation& a, const Rotation& b) {
    const double d = std::abs(a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z);
    return 2.0 * std::acos(std::min(d, 1.0));
}

Transform compose_transform(const Vec3& position, const Rotation& rotation, const Vec3& scale) {
    if (!position.finite() || !scale.finite()) raise(errc::non_finite, "transform inputs must be finite");
    if (!(scale.x > 0.0 && scale.y > 0.0 && scale.z > 0.0))
        raise(errc::non_positive_scale, "scale components must be strictly positive");
    return Transform{position, rotation, scale};
}

Obb make_obb(const Vec3& center, const Vec3& half_extents) {
    if (!center.finite() || !half_extents.finite()) raise(errc::non_finite, "obb parameters must be finite");
    if (!(half_extents.x > 0.0 && half_extents.y > 0.0 && half_extents.z > 0.0))
        raise(errc::non_positive_scale, "obb half extents must be strictly positive");
    return Obb{center, half_extents};
}

std::array<Vec3, 8> obb_local_corners(const Obb& obb) {
    std::array<Vec3, 8> out;
    for (int i = 0; i < 8; ++i) {
        out[i] = {obb.center.x + ((i & 1) ? obb.half_extents.x : -obb.half_extents.x),
                  obb.center.y + ((i & 2) ? obb.half_extents.y : -obb.half_extents.y),
                  obb.center.z + ((i & 4) ? obb.half_extents.z : -obb.half_extents.z)};
    }
    return out;
}

std::array<Vec3, 8> obb_world_corners(const Obb& obb, const Transform& t) {
    std::array<Vec3, 8> out = obb_local_corners(obb);
    for (auto& c : out) c = t.apply(c);
    return out;
}

Vec3 obb_bottom_center(const Obb& obb, const Transform& t) {
    return t.apply({obb.center.x, obb.center.y, obb.center.z - obb.half_extents.z});
}

CameraIntrinsics make_intrinsics(double fx, double fy, double cx, double cy, int width, int height) {
    if (!(fx > 0.0 && fy > 0.0)) raise(errc::non_positive_scale, "focal lengths must be positive");
    if (width <= 0 || height <= 0) raise(errc::non_positive_scale, "image size must be positive");
    if (!(cx >= 0.0 && cx < width && cy >= 0.0 && cy < height))
        raise(errc::non_finite, "principal point must lie inside the image");
    return CameraIntrinsics{fx, fy, cx, cy, width, height};
}

std::array<double, 16> CameraPose::to_matrix4() const {
    const auto m = rotation.to_matrix();
    return {m[0], m[1], m[2], translation.x, m[3], m[4], m[5], translation.y,
            m[6], m[7], m[8], translation.z, 0.0,  0.0,  0.0,  1.0};
}

CameraPose CameraPose::look_at(const Vec3& eye, const Vec3& target) {
    const Vec3 fwd = normalized(target - eye);
    Vec3 right = cross(fwd, Vec3{0.0, 0.0, 1.0});
    if (norm(right) < 1e-9) right = {1.0, 0.0, 0.0}; // vertical view
    right = normalized(right);
    const Vec3 down = cross(fwd, right);
    // Rows of the world-to-camera rotation are the camera axes in world
    // coordinates: +X right, +Y down, +Z forward.
    const Rotation r = Rotation::from_matrix(
        {right.x, right.y, right.z, down.x, down.y, down.z, fwd.x, fwd.y, fwd.z});
    return CameraPose{r, r.rotate(-eye)};
}

PixelCoord project(const CameraIntrinsics& K, const CameraPose& E, const Vec3& p_world) {
    const Vec3 p = E.to_camera(p_world);
    if (p.z <= kMinCameraDepth) raise(errc::behind_camera, "point has non-positive camera depth");
    return {K.fx * p.x / p.z + K.cx, K.fy * p.y / p.z + K.cy};
}

std::optional<PixelCoord> try_project(const CameraIntrinsics& K, const CameraPose& E, const Vec3& p_world) {
    const Vec3 p = E.to_camera(p_world);
    if (p.z <= kMinCameraDepth) return std::nullopt;
    return PixelCoord{K.fx * p.x / p.z + K.cx, K.fy * p.y / p.z + K.cy};
}

Vec3 unproject(const CameraIntrinsics& K, const CameraPose& E, const PixelCoord& px, double depth) {
    const Vec3 p_cam{(px.u - K.cx) / K.fx * depth, (px.v - K.cy) / K.fy * depth, depth};
    return E.to_world(p_cam);
}

} // namespace fyi
