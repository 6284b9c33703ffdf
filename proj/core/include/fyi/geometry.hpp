#pragma once

// Dependency-free 3D math: vectors, unit-quaternion rotations,
// scale-rotate-translate transforms, oriented bounding boxes and pinhole
// cameras.
//
// Conventions, fixed project-wide:
//   * world frame is right-handed with Z up,
//   * cameras look along their local +Z, with +X right and +Y down in
//     image space,
//   * transforms apply scale, then rotation, then translation,
//   * all quantities are double precision, meters and radians.

#include <array>
#include <cmath>
#include <optional>

#include "fyi/error.hpp"

namespace fyi {

constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

struct Vec2 {
    double x = 0.0, y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
};

inline double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
inline double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& v) { return std::sqrt(dot(v, v)); }

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator-() const { return {-x, -y, -z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }

    Vec2 xy() const { return {x, y}; }
    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline Vec3 hadamard(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

Vec3 normalized(const Vec3& v); // raises non_finite on near-zero input

// Projected image coordinate, continuous pixels. u grows right, v grows down.
struct PixelCoord {
    double u = 0.0, v = 0.0;
};

inline double pixel_distance(const PixelCoord& a, const PixelCoord& b) {
    return std::hypot(a.u - b.u, a.v - b.v);
}

// Unit quaternion. Construction normalizes, so instances of this type always
// satisfy |q| = 1 and the equivalent matrix is a proper rotation.
struct Rotation {
    double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

    Rotation() = default;
    Rotation(double w_, double x_, double y_, double z_);

    static Rotation identity() { return {}; }
    static Rotation yaw(double rad);               // about world +Z
    static Rotation axis_angle(const Vec3& axis, double rad);
    static Rotation from_matrix(const std::array<double, 9>& m); // row-major

    std::array<double, 9> to_matrix() const; // row-major
    Vec3 rotate(const Vec3& v) const;
    Rotation inverse() const { return {w, -x, -y, -z}; }
    Rotation operator*(const Rotation& r) const;

    double yaw_angle() const; // yaw component, radians in (-pi, pi]
};

Rotation slerp(const Rotation& a, const Rotation& b, double t);
double geodesic_angle(const Rotation& a, const Rotation& b); // radians in [0, pi]

// Scale -> rotate -> translate. Scale is per-axis and strictly positive.
struct Transform {
    Vec3 translation;
    Rotation rotation;
    Vec3 scale{1.0, 1.0, 1.0};

    Vec3 apply(const Vec3& local) const { return rotation.rotate(hadamard(scale, local)) + translation; }
};

// Validating constructor for Transform: raises non_positive_scale /
// non_finite on bad inputs.
Transform compose_transform(const Vec3& position, const Rotation& rotation, const Vec3& scale);

// Axis-aligned box in the object's local frame. World placement comes from a
// Transform, so orientation never lives here.
struct Obb {
    Vec3 center;
    Vec3 half_extents;
};

Obb make_obb(const Vec3& center, const Vec3& half_extents); // validates positivity

// Fixed corner order: bit 0 -> +x, bit 1 -> +y, bit 2 -> +z (bit unset means
// the negative face), i.e. corner 0 is (-,-,-) and corner 7 is (+,+,+).
std::array<Vec3, 8> obb_local_corners(const Obb& obb);
std::array<Vec3, 8> obb_world_corners(const Obb& obb, const Transform& t);

// Bottom-center point: the local center dropped to the bottom face, carried
// through the transform. This is the anchor every placement op works with.
Vec3 obb_bottom_center(const Obb& obb, const Transform& t);

struct CameraIntrinsics {
    double fx = 0.0, fy = 0.0;
    double cx = 0.0, cy = 0.0;
    int width = 0, height = 0;
};

CameraIntrinsics make_intrinsics(double fx, double fy, double cx, double cy, int width, int height);

// World-to-camera rigid transform: p_cam = R * p_world + t.
struct CameraPose {
    Rotation rotation;
    Vec3 translation;

    Vec3 to_camera(const Vec3& p_world) const { return rotation.rotate(p_world) + translation; }
    Vec3 to_world(const Vec3& p_cam) const { return rotation.inverse().rotate(p_cam - translation); }
    Vec3 center() const { return rotation.inverse().rotate(-translation); }
    Vec3 forward() const { return rotation.inverse().rotate({0.0, 0.0, 1.0}); }

    std::array<double, 16> to_matrix4() const; // row-major [R|t; 0 0 0 1]

    // Camera at `eye` looking at `target`; world +Z is up. Falls back to the
    // world +X axis as "right" when the view direction is vertical.
    static CameraPose look_at(const Vec3& eye, const Vec3& target);
};

struct CameraRig {
    CameraIntrinsics intrinsics;
    CameraPose pose;
};

constexpr double kMinCameraDepth = 1e-12;

// Perspective projection. Raises behind_camera when the point's camera-space
// depth is not positive; the result may fall outside the image rectangle.
PixelCoord project(const CameraIntrinsics& K, const CameraPose& E, const Vec3& p_world);
std::optional<PixelCoord> try_project(const CameraIntrinsics& K, const CameraPose& E, const Vec3& p_world);

// Inverse of project at a known camera-space depth.
Vec3 unproject(const CameraIntrinsics& K, const CameraPose& E, const PixelCoord& px, double depth);

} // namespace fyi
