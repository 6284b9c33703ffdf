#include <doctest.h>

#include <cstring>

#include "fyi/layout.hpp"
#include "render_oracle.hpp"
#include "test_helpers.hpp"

using namespace fyi;

namespace {

// A scene of `count` random boxes placed by the engine itself.
SceneLayout random_scene(const AssetRepository& repo, Rng& rng, int count) {
    static const std::vector<std::string> ids{"box",  "cup",   "mug",  "lamp",
                                              "vase", "plant", "book", "monitor"};
    SceneLayout layout(LayoutParams{4.0, 0.05, 0.05});
    std::map<std::string, int> counter;
    for (int i = 0; i < count; ++i) {
        const AssetRecord* a = repo.find(ids[rng.below(ids.size())]);
        const std::string label = a->asset_id + "_" + std::to_string(++counter[a->asset_id]);
        layout.insert(*a, label, a->description, Placement{},
                      Rotation::yaw(rng.uniform(0.0, 2 * kPi)),
                      Vec3{rng.uniform(0.7, 1.5), rng.uniform(0.7, 1.5), rng.uniform(0.7, 1.5)});
    }
    return layout;
}

CameraRig ring_camera(const SceneLayout& layout, double azimuth, int size) {
    const auto [lo, hi] = layout.world_bounds();
    const Vec3 centroid = (lo + hi) * 0.5;
    const double radius = 1.5 * std::max(norm(hi - lo), 0.5);
    const Vec3 eye = centroid + Vec3{radius * std::cos(azimuth) * std::cos(deg_to_rad(30)),
                                     radius * std::sin(azimuth) * std::cos(deg_to_rad(30)),
                                     radius * std::sin(deg_to_rad(30))};
    return {make_intrinsics(1.5 * size, 1.5 * size, size / 2.0, size / 2.0, size, size),
            CameraPose::look_at(eye, centroid)};
}

} // namespace

TEST_CASE("empty layout renders all background") {
    SceneLayout layout;
    const CameraIntrinsics K = make_intrinsics(64, 64, 32, 32, 64, 64);
    const RenderedView v = render_view(layout, K, CameraPose{});
    for (const double d : v.depth) CHECK(d == kBackgroundDepth);
    for (const uint16_t i : v.instance) CHECK(i == 0);
}

TEST_CASE("unit cube two meters ahead: center pixel depth is 1.5") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout(LayoutParams{8.0, 0.05, 0.05});
    // The box asset is a 0.4 cube; scale 2.5 makes it a unit cube. Identity
    // camera looks along world +z, so "2 m ahead" is bottom at z=1.5.
    layout.insert(*repo.find("box"), "box_1", "a box", Placement{Vec3{0, 0, 1.5}},
                  Rotation::identity(), Vec3{2.5, 2.5, 2.5});
    const CameraIntrinsics K = make_intrinsics(100, 100, 64, 64, 128, 128);
    const RenderedView v = render_view(layout, K, CameraPose{});
    CHECK(v.depth_at(64, 64) == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(v.instance_at(64, 64) == 1);
}

TEST_CASE("slab renderer matches the triangle brute force on random scenes") {
    const AssetRepository repo = oracle::demo_repo();
    Rng rng(555);
    for (int scene = 0; scene < 6; ++scene) {
        const SceneLayout layout = random_scene(repo, rng, 3);
        const CameraRig rig = ring_camera(layout, rng.uniform(0, 2 * kPi), 64);
        const RenderedView fast = render_view(layout, rig.intrinsics, rig.pose);
        const RenderedView slow = oracle::render_triangles(layout, rig.intrinsics, rig.pose);

        REQUIRE(fast.instance.size() == slow.instance.size());
        int mismatches = 0;
        for (size_t i = 0; i < fast.instance.size(); ++i) {
            if (fast.instance[i] != slow.instance[i]) ++mismatches;
            if (fast.instance[i] != 0 && fast.instance[i] == slow.instance[i])
                CHECK(std::abs(fast.depth[i] - slow.depth[i]) < 1e-6);
        }
        CHECK(mismatches == 0);
    }
}

TEST_CASE("occlusion: the recorded instance is the nearest hit") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout(LayoutParams{8.0, 0.05, 0.05});
    // Identity camera looks along world +z, so depth equals world z and the
    // first surface met is the near box's bottom face.
    layout.insert(*repo.find("box"), "near_box", "near", Placement{Vec3{0, 0, 1.0}});
    layout.insert(*repo.find("box"), "far_box", "far", Placement{Vec3{0, 0, 3.0}});
    const CameraIntrinsics K = make_intrinsics(200, 200, 32, 32, 64, 64);
    const RenderedView v = render_view(layout, K, CameraPose{});
    CHECK(v.instance_at(32, 32) == 1); // the near box, ordinal 1
    CHECK(v.depth_at(32, 32) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("visible_fraction: sole, hidden, and half-occluded objects") {
    const AssetRepository repo = oracle::demo_repo();

    SceneLayout solo(LayoutParams{8.0, 0.05, 0.05});
    solo.insert(*repo.find("box"), "box_1", "a box", Placement{Vec3{0, 0, 1.5}});
    const CameraIntrinsics K = make_intrinsics(96, 96, 32, 32, 64, 64);
    const RenderedView v1 = render_view(solo, K, CameraPose{});
    CHECK(visible_fraction(v1, 1) == doctest::Approx(1.0));

    // A bigger cube right in front of the box hides it completely.
    SceneLayout hidden = solo;
    hidden.insert(*repo.find("box"), "blocker", "a blocker", Placement{Vec3{0, 0, 1.0}},
                  Rotation::identity(), Vec3{3.0, 3.0, 0.5});
    const RenderedView v2 = render_view(hidden, K, CameraPose{});
    CHECK(visible_fraction(v2, 1) == doctest::Approx(0.0));

    // A cube shifted to cover about half the box: the fraction equals the
    // two-render pixel-count ratio.
    SceneLayout half = solo;
    half.insert(*repo.find("box"), "blocker", "a blocker", Placement{Vec3{-0.2, 0, 1.0}},
                Rotation::identity(), Vec3{1.0, 3.0, 0.5});
    const RenderedView v3 = render_view(half, K, CameraPose{});
    const RenderedView alone = render_view(solo, K, CameraPose{});
    long solo_px = 0, vis_px = 0;
    for (size_t i = 0; i < v3.instance.size(); ++i) {
        if (alone.instance[i] == 1) ++solo_px;
        if (v3.instance[i] == 1) ++vis_px;
    }
    REQUIRE(solo_px > 0);
    CHECK(visible_fraction(v3, 1) ==
          doctest::Approx(static_cast<double>(vis_px) / solo_px).epsilon(1e-12));
    CHECK(visible_fraction(v3, 1) > 0.2);
    CHECK(visible_fraction(v3, 1) < 0.8);

    CHECK_THROWS_AS(visible_fraction(v1, 99), Error);
    CHECK_THROWS_AS(visible_fraction(v1, 0), Error);
}

TEST_CASE("rendering is identical for every thread count") {
    const AssetRepository repo = oracle::demo_repo();
    Rng rng(808);
    const SceneLayout layout = random_scene(repo, rng, 4);
    const CameraRig rig = ring_camera(layout, 1.1, 96);
    const RenderedView serial = render_view(layout, rig.intrinsics, rig.pose, 0, 1);
    for (const int threads : {2, 3, 4, 7}) {
        const RenderedView parallel = render_view(layout, rig.intrinsics, rig.pose, 0, threads);
        CHECK(std::memcmp(serial.depth.data(), parallel.depth.data(),
                          serial.depth.size() * sizeof(double)) == 0);
        CHECK(std::memcmp(serial.instance.data(), parallel.instance.data(),
                          serial.instance.size() * sizeof(uint16_t)) == 0);
        CHECK(serial.solo_coverage == parallel.solo_coverage);
        CHECK(serial.visible_coverage == parallel.visible_coverage);
    }
}

TEST_CASE("doubling resolution roughly quadruples covered pixels") {
    const AssetRepository repo = oracle::demo_repo();
    Rng rng(77);
    int checked = 0;
    for (int scene = 0; scene < 12 && checked < 8; ++scene) {
        const SceneLayout layout = random_scene(repo, rng, 2);
        const CameraRig lo = ring_camera(layout, rng.uniform(0, 2 * kPi), 64);
        const CameraRig hi{make_intrinsics(lo.intrinsics.fx * 2, lo.intrinsics.fy * 2,
                                           lo.intrinsics.cx * 2, lo.intrinsics.cy * 2, 128, 128),
                           lo.pose};
        const RenderedView a = render_view(layout, lo.intrinsics, lo.pose);
        const RenderedView b = render_view(layout, hi.intrinsics, hi.pose);
        for (size_t i = 0; i < a.visible_coverage.size(); ++i) {
            if (a.visible_coverage[i] < 100) continue; // silhouette-degenerate or tiny
            ++checked;
            const double ratio =
                static_cast<double>(b.visible_coverage[i]) / a.visible_coverage[i];
            CHECK(ratio > 3.5);
            CHECK(ratio < 4.5);
        }
    }
    CHECK(checked >= 4);
}
