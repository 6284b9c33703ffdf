#include <doctest.h>

#include <cstring>
#include "test_helpers.hpp"

using namespace fyi;

TEST_CASE("compose_transform: identity rotation and unit scale is translation") {
    const Transform t = compose_transform({1, 2, 3}, Rotation::identity(), {1, 1, 1});
    const Vec3 p = t.apply({0, 0, 0});
    CHECK(p.x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.y == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(p.z == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("compose_transform: quarter yaw turns +x into +y") {
    const Transform t = compose_transform({0, 0, 0}, Rotation::yaw(kPi / 2), {1, 1, 1});
    const Vec3 p = t.apply({1, 0, 0});
    CHECK(std::abs(p.x - 0.0) < 1e-12);
    CHECK(std::abs(p.y - 1.0) < 1e-12);
    CHECK(std::abs(p.z - 0.0) < 1e-12);
}

TEST_CASE("compose_transform: matches explicit 4x4 homogeneous product on box corners") {
    Rng rng(42);
    for (int trial = 0; trial < 200; ++trial) {
        const Vec3 pos = oracle::random_vec(rng, -5, 5);
        const Rotation rot = oracle::random_rotation(rng);
        const Vec3 scale{rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0), rng.uniform(0.1, 3.0)};
        const Obb obb = make_obb(oracle::random_vec(rng, -1, 1),
                                 {rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0), rng.uniform(0.1, 1.0)});

        const Transform t = compose_transform(pos, rot, scale);
        const oracle::Mat4 m = oracle::mat4_mul(
            oracle::mat4_translate(pos.x, pos.y, pos.z),
            oracle::mat4_mul(oracle::mat4_from_quat(rot.w, rot.x, rot.y, rot.z),
                             oracle::mat4_scale(scale.x, scale.y, scale.z)));

        const auto ours = obb_world_corners(obb, t);
        const auto locals = obb_local_corners(obb);
        for (int i = 0; i < 8; ++i) {
            const Vec3 expect = oracle::mat4_apply(m, locals[i]);
            CHECK(std::abs(ours[i].x - expect.x) < 1e-9);
            CHECK(std::abs(ours[i].y - expect.y) < 1e-9);
            CHECK(std::abs(ours[i].z - expect.z) < 1e-9);
        }
    }
}

TEST_CASE("compose_transform: rejects bad inputs") {
    CHECK_THROWS_AS(compose_transform({0, 0, 0}, Rotation::identity(), {0, 1, 1}), Error);
    CHECK_THROWS_AS(compose_transform({0, 0, 0}, Rotation::identity(), {1, -2, 1}), Error);
    CHECK_THROWS_AS(
        compose_transform({std::nan(""), 0, 0}, Rotation::identity(), {1, 1, 1}), Error);
    try {
        compose_transform({0, 0, 0}, Rotation::identity(), {1, 0, 1});
        FAIL("expected non_positive_scale");
    } catch (const Error& e) {
        CHECK(e.code() == errc::non_positive_scale);
    }
}

TEST_CASE("project: on-axis point lands on the principal point") {
    const CameraIntrinsics K = make_intrinsics(100, 100, 64, 64, 128, 128);
    const CameraPose E{}; // identity: world frame is the camera frame
    const PixelCoord u = project(K, E, {0, 0, 2});
    CHECK(u.u == doctest::Approx(64.0).epsilon(1e-12));
    CHECK(u.v == doctest::Approx(64.0).epsilon(1e-12));

    const PixelCoord u2 = project(K, E, {1, 0, 2});
    CHECK(u2.u == doctest::Approx(114.0).epsilon(1e-12));
    CHECK(u2.v == doctest::Approx(64.0).epsilon(1e-12));
}

TEST_CASE("project: raises behind_camera at non-positive depth") {
    const CameraIntrinsics K = make_intrinsics(100, 100, 64, 64, 128, 128);
    try {
        project(K, CameraPose{}, {0, 0, -1});
        FAIL("expected behind_camera");
    } catch (const Error& e) {
        CHECK(e.code() == errc::behind_camera);
    }
    CHECK(!try_project(K, CameraPose{}, {0, 0, 0}).has_value());
}

TEST_CASE("project: 1000 random triples match the homogeneous pipeline within 1e-9") {
    Rng rng(7);
    int checked = 0;
    while (checked < 1000) {
        const CameraIntrinsics K =
            make_intrinsics(rng.uniform(50, 500), rng.uniform(50, 500), rng.uniform(10, 118),
                            rng.uniform(10, 118), 128, 128);
        const Vec3 eye = oracle::random_vec(rng, -4, 4);
        Vec3 target = oracle::random_vec(rng, -4, 4);
        if (norm(target - eye) < 0.5) target = eye + Vec3{1, 1, 0.5};
        const CameraPose E = CameraPose::look_at(eye, target);
        const Vec3 p = oracle::random_vec(rng, -6, 6);
        if (E.to_camera(p).z < 0.1) continue;
        ++checked;

        const PixelCoord ours = project(K, E, p);
        const PixelCoord expect = oracle::project_homogeneous(K, E, p);
        CHECK(std::abs(ours.u - expect.u) < 1e-9);
        CHECK(std::abs(ours.v - expect.v) < 1e-9);
    }
}

TEST_CASE("project/unproject round-trip recovers the world point") {
    Rng rng(13);
    for (int i = 0; i < 200; ++i) {
        const CameraIntrinsics K = make_intrinsics(120, 140, 60, 70, 128, 144);
        const CameraPose E =
            CameraPose::look_at(oracle::random_vec(rng, -3, 3), oracle::random_vec(rng, -1, 1));
        const Vec3 p = oracle::random_vec(rng, -2, 2);
        const double depth = E.to_camera(p).z;
        if (depth < 0.1) continue;
        const Vec3 back = unproject(K, E, project(K, E, p), depth);
        CHECK(std::abs(back.x - p.x) < 1e-9);
        CHECK(std::abs(back.y - p.y) < 1e-9);
        CHECK(std::abs(back.z - p.z) < 1e-9);
    }
}

TEST_CASE("rotation: quaternion -> matrix -> quaternion preserves the action") {
    Rng rng(99);
    for (int i = 0; i < 100; ++i) {
        const Rotation r = oracle::random_rotation(rng);
        const Rotation back = Rotation::from_matrix(r.to_matrix());
        const Vec3 v = oracle::random_vec(rng, -10, 10);
        const Vec3 a = r.rotate(v);
        const Vec3 b = back.rotate(v);
        CHECK(std::abs(a.x - b.x) < 1e-9);
        CHECK(std::abs(a.y - b.y) < 1e-9);
        CHECK(std::abs(a.z - b.z) < 1e-9);
    }
}

TEST_CASE("rotation: matrix is orthonormal with determinant +1") {
    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const auto m = oracle::random_rotation(rng).to_matrix();
        const double det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
                           m[2] * (m[3] * m[7] - m[4] * m[6]);
        CHECK(std::abs(det - 1.0) < 1e-9);
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                double d = 0;
                for (int k = 0; k < 3; ++k) d += m[r * 3 + k] * m[c * 3 + k];
                CHECK(std::abs(d - (r == c ? 1.0 : 0.0)) < 1e-9);
            }
    }
}

TEST_CASE("transform composition on translations matches p1 + R1*p2") {
    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const Vec3 p1 = oracle::random_vec(rng, -3, 3), p2 = oracle::random_vec(rng, -3, 3);
        const Rotation r1 = oracle::random_rotation(rng), r2 = oracle::random_rotation(rng);
        const Transform t1 = compose_transform(p1, r1, {1, 1, 1});
        const Transform t2 = compose_transform(p2, r2, {1, 1, 1});
        const Vec3 composed = t1.apply(t2.apply({0, 0, 0}));
        const Vec3 expect = p1 + r1.rotate(p2);
        CHECK(std::abs(composed.x - expect.x) < 1e-12);
        CHECK(std::abs(composed.y - expect.y) < 1e-12);
        CHECK(std::abs(composed.z - expect.z) < 1e-12);
    }
}

TEST_CASE("obb: unit cube corners and bottom-center") {
    const Obb cube = make_obb({0, 0, 0}, {0.5, 0.5, 0.5});
    const auto corners = obb_world_corners(cube, Transform{});
    for (const auto& c : corners) {
        CHECK(std::abs(std::abs(c.x) - 0.5) < 1e-12);
        CHECK(std::abs(std::abs(c.y) - 0.5) < 1e-12);
        CHECK(std::abs(std::abs(c.z) - 0.5) < 1e-12);
    }
    const Transform lifted = compose_transform({0, 0, 1}, Rotation::identity(), {1, 1, 1});
    const Vec3 bc = obb_bottom_center(cube, lifted);
    CHECK(std::abs(bc.x) < 1e-12);
    CHECK(std::abs(bc.y) < 1e-12);
    CHECK(std::abs(bc.z - 0.5) < 1e-12);
}

TEST_CASE("obb_world_corners equals corner-by-corner transform application") {
    Rng rng(21);
    for (int i = 0; i < 100; ++i) {
        const Obb obb = make_obb(oracle::random_vec(rng, -1, 1),
                                 {rng.uniform(0.05, 2), rng.uniform(0.05, 2), rng.uniform(0.05, 2)});
        const Transform t = compose_transform(oracle::random_vec(rng, -4, 4),
                                              oracle::random_rotation(rng),
                                              {rng.uniform(0.2, 2), rng.uniform(0.2, 2), rng.uniform(0.2, 2)});
        const auto fast = obb_world_corners(obb, t);
        const auto locals = obb_local_corners(obb);
        for (int k = 0; k < 8; ++k) {
            const Vec3 expect = t.apply(locals[k]);
            CHECK(std::abs(fast[k].x - expect.x) < 1e-12);
            CHECK(std::abs(fast[k].y - expect.y) < 1e-12);
            CHECK(std::abs(fast[k].z - expect.z) < 1e-12);
        }
    }
}

TEST_CASE("operations are bitwise deterministic") {
    const CameraIntrinsics K = make_intrinsics(321.5, 287.25, 63.5, 64.5, 128, 128);
    const CameraPose E = CameraPose::look_at({1.25, -2.5, 3.0}, {0.1, 0.2, 0.3});
    const Vec3 p{0.123456789, 0.45, 0.25}; // near the aim point, safely in front
    const PixelCoord a = project(K, E, p);
    const PixelCoord b = project(K, E, p);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);

    const Rotation r = Rotation::axis_angle({1, 2, 3}, 0.7);
    const auto m1 = r.to_matrix();
    const auto m2 = r.to_matrix();
    CHECK(std::memcmp(m1.data(), m2.data(), sizeof m1) == 0);
}
