#include <doctest.h>
#include <algorithm>

#include "fyi/dataset.hpp"
#include "fyi/optimize.hpp"
#include "test_helpers.hpp"

using namespace fyi;

namespace {

// Compensated (Kahan) summation oracle for the mean.
double kahan_mean(const std::vector<double>& xs) {
    double sum = 0.0, comp = 0.0;
    for (const double x : xs) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum / static_cast<double>(xs.size());
}

std::vector<JudgeVerdict> verdicts_of(const std::vector<double>& scores) {
    std::vector<JudgeVerdict> out;
    for (size_t i = 0; i < scores.size(); ++i) {
        JudgeVerdict v;
        v.view_index = static_cast<int>(i);
        v.score = scores[i];
        out.push_back(v);
    }
    return out;
}

// Cup floating `offset` meters above the table top, at a small lateral
// shift from the table center.
SceneLayout floating_cup_scene(const AssetRepository& repo, double offset) {
    SceneLayout layout;
    layout.constraints.push_back({Predicate::on, "cup_1", "table_1", std::nullopt, 0});
    layout.insert(*repo.find("table"), "table_1", "a table", Placement{});
    layout.insert(*repo.find("cup"), "cup_1", "a cup", Placement{});
    const ObjectInstance& cup = layout.instance("cup_1");
    Vec3 lifted = cup.transform.translation;
    lifted.x += 0.25;
    lifted.z += offset;
    layout.place_instructed("cup_1", lifted);
    return layout;
}

CameraIntrinsics test_intrinsics(int size) {
    return make_intrinsics(1.5 * size, 1.5 * size, size / 2.0, size / 2.0, size, size);
}

} // namespace

TEST_CASE("aggregate_scores is the arithmetic mean") {
    CHECK(aggregate_scores(verdicts_of({1.0, 1.0})) == 1.0);
    CHECK(aggregate_scores(verdicts_of({0.9, 0.7})) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK_THROWS_AS(aggregate_scores({}), Error);
}

TEST_CASE("aggregate_scores matches compensated summation on 100 random vectors") {
    Rng rng(123);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> scores;
        const int n = 1 + static_cast<int>(rng.below(16));
        for (int i = 0; i < n; ++i) scores.push_back(rng.uniform());
        const double ours = aggregate_scores(verdicts_of(scores));
        CHECK(std::abs(ours - kahan_mean(scores)) < 1e-12);
        // The mean always lies between the extremes.
        CHECK(ours >= *std::min_element(scores.begin(), scores.end()) - 1e-15);
        CHECK(ours <= *std::max_element(scores.begin(), scores.end()) + 1e-15);
    }
}

TEST_CASE("geometric judge: a resting cup scores 1.0 from every view") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout;
    layout.constraints.push_back({Predicate::on, "cup_1", "table_1", std::nullopt, 0});
    layout.insert(*repo.find("table"), "table_1", "a table", Placement{});
    layout.insert(*repo.find("cup"), "cup_1", "a cup", Placement{});

    const auto cameras = make_camera_ring(layout, 3);
    std::vector<RenderedView> views;
    for (size_t i = 0; i < cameras.size(); ++i)
        views.push_back(render_view(layout, cameras[i].intrinsics, cameras[i].pose, (int)i));

    const auto verdicts = geometric_judge(layout, views, layout.constraints.front());
    REQUIRE(verdicts.size() == 3);
    for (const auto& v : verdicts) CHECK(v.score == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("geometric judge: a floating cup is invisible along the offset axis only") {
    const AssetRepository repo = oracle::demo_repo();
    const double offset = 0.3;
    SceneLayout layout = floating_cup_scene(repo, offset);
    const Vec3 cup = layout.instance("cup_1").transform.translation;

    const CameraIntrinsics K = test_intrinsics(128);
    // View direction within 5 degrees of the (vertical) offset axis.
    const CameraPose aligned = CameraPose::look_at({cup.x + 0.05, cup.y, cup.z + 2.5}, cup);
    // Orthogonal side view, close enough that 0.3 m spans many pixels.
    const CameraPose side = CameraPose::look_at({cup.x + 1.2, cup.y, cup.z - offset / 2}, cup);

    std::vector<RenderedView> views;
    views.push_back(render_view(layout, K, aligned, 0));
    views.push_back(render_view(layout, K, side, 1));

    // Analytic oracle: the projected gap between the anchor and its snapped
    // position explains both scores.
    const Vec3 snapped{cup.x, cup.y, cup.z - offset};
    const double gap_aligned = pixel_distance(project(K, aligned, cup), project(K, aligned, snapped));
    const double gap_side = pixel_distance(project(K, side, cup), project(K, side, snapped));
    CHECK(gap_aligned < 6.0);   // nearly hidden along the axis
    CHECK(gap_side > 22.0);     // glaring from the side

    const auto verdicts = geometric_judge(layout, views, layout.constraints.front());
    REQUIRE(verdicts.size() == 2);
    CHECK(verdicts[0].score >= 0.8);
    CHECK(verdicts[1].score <= 0.2);
}

TEST_CASE("geometric judge: an occluded subject is uninformative (0.5)") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout;
    layout.constraints.push_back({Predicate::on, "cup_1", "table_1", std::nullopt, 0});
    layout.insert(*repo.find("table"), "table_1", "a table", Placement{});
    layout.insert(*repo.find("cup"), "cup_1", "a cup", Placement{});
    // A camera below the table plane: the table hides the cup.
    const Vec3 cup = layout.instance("cup_1").transform.translation;
    const CameraIntrinsics K = test_intrinsics(96);
    const CameraPose from_below = CameraPose::look_at({cup.x, cup.y + 2.0, 0.1}, {cup.x, cup.y, 0.3});
    std::vector<RenderedView> views{render_view(layout, K, from_below, 0)};

    const auto verdicts = geometric_judge(layout, views, layout.constraints.front());
    REQUIRE(verdicts.size() == 1);
    CHECK(visible_fraction(views[0], layout.ordinal_of("cup_1")) < 0.05);
    CHECK(verdicts[0].score == 0.5);
    CHECK(verdicts[0].rationale.find("uninformative") != std::string::npos);
}

TEST_CASE("single aligned view passes a floating cup without fixing it") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout = floating_cup_scene(repo, 0.3);
    const Vec3 cup = layout.instance("cup_1").transform.translation;
    const double table_top = *layout.instance("table_1").support_top();

    const std::vector<CameraRig> one_view{
        {test_intrinsics(64), CameraPose::look_at({cup.x + 0.03, cup.y, cup.z + 2.5}, cup)}};
    GeometricJudge judge;
    const OptimizationReport report = optimize_layout(layout, one_view, judge, {0.8, 5, 1});

    CHECK(report.passed);
    CHECK(report.iterations == 1);
    CHECK(report.relocations.empty());
    // The float is still there: the blind spot of a single view.
    CHECK(layout.instance("cup_1").transform.translation.z - table_top ==
          doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("adding an orthogonal view gets the cup snapped within two iterations") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout = floating_cup_scene(repo, 0.3);
    const Vec3 cup = layout.instance("cup_1").transform.translation;
    const double table_top = *layout.instance("table_1").support_top();

    const std::vector<CameraRig> two_views{
        {test_intrinsics(64), CameraPose::look_at({cup.x + 0.03, cup.y, cup.z + 2.5}, cup)},
        {test_intrinsics(64), CameraPose::look_at({cup.x + 1.2, cup.y, cup.z - 0.15}, cup)}};
    GeometricJudge judge;
    const OptimizationReport report = optimize_layout(layout, two_views, judge, {0.8, 5, 1});

    CHECK(report.passed);
    CHECK(report.iterations <= 2);
    REQUIRE(report.relocations.size() == 1);
    CHECK(report.relocations[0].instance_id == "cup_1");
    CHECK(std::abs(layout.instance("cup_1").transform.translation.z - table_top) < 1e-9);
    for (const auto& s : report.constraint_scores) CHECK(s.score >= 0.8);
}

TEST_CASE("an already-valid scene passes immediately with zero relocations") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout;
    layout.constraints.push_back({Predicate::on, "cup_1", "table_1", std::nullopt, 0});
    layout.insert(*repo.find("table"), "table_1", "a table", Placement{});
    layout.insert(*repo.find("cup"), "cup_1", "a cup", Placement{});

    const auto cameras = make_camera_ring(layout, 2, RingParams{1.5, 30.0, 1.5, 64, 64, 0.0});
    GeometricJudge judge;
    const OptimizationReport report = optimize_layout(layout, cameras, judge, {0.8, 5, 1});
    CHECK(report.passed);
    CHECK(report.iterations == 1);
    CHECK(report.relocations.empty());
    // passed <=> every aggregated score >= t
    for (const auto& s : report.constraint_scores) CHECK(s.score >= 0.8);
}

TEST_CASE("a hopeless judge leaves the best layout and reports failure") {
    class ZeroJudge : public JudgeHandle {
      public:
        std::vector<JudgeVerdict> judge(const SceneLayout&, const std::vector<RenderedView>& views,
                                        const SpatialConstraint& c) override {
            std::vector<JudgeVerdict> out;
            for (const auto& v : views) out.push_back({c, v.view_index, 0.0, "never"});
            return out;
        }
    };
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout;
    layout.constraints.push_back({Predicate::on, "cup_1", "table_1", std::nullopt, 0});
    layout.insert(*repo.find("table"), "table_1", "a table", Placement{});
    layout.insert(*repo.find("cup"), "cup_1", "a cup", Placement{});
    const Vec3 before = layout.instance("cup_1").transform.translation;

    const auto cameras = make_camera_ring(layout, 2, RingParams{1.5, 30.0, 1.5, 64, 64, 0.0});
    ZeroJudge judge;
    const OptimizationReport report = optimize_layout(layout, cameras, judge, {0.8, 3, 1});
    CHECK(!report.passed);
    CHECK(report.iterations == 3);
    // All iterations scored identically, so the first layout is the best.
    const Vec3 after = layout.instance("cup_1").transform.translation;
    CHECK(std::abs(after.x - before.x) < 1e-12);
    CHECK(std::abs(after.y - before.y) < 1e-12);
    CHECK(std::abs(after.z - before.z) < 1e-12);
}

TEST_CASE("optimization reports are byte-deterministic") {
    const AssetRepository repo = oracle::demo_repo();
    std::string first;
    for (int run = 0; run < 2; ++run) {
        SceneLayout layout = floating_cup_scene(repo, 0.25);
        const Vec3 cup = layout.instance("cup_1").transform.translation;
        const std::vector<CameraRig> cams{
            {test_intrinsics(64), CameraPose::look_at({cup.x + 0.03, cup.y, cup.z + 2.5}, cup)},
            {test_intrinsics(64), CameraPose::look_at({cup.x + 1.2, cup.y, cup.z}, cup)}};
        GeometricJudge judge;
        OptimizationReport report = optimize_layout(layout, cams, judge, {0.8, 5, 1});
        const std::string bytes = canonical_bytes(report.to_json());
        if (run == 0) first = bytes;
        else CHECK(bytes == first);
    }
}

TEST_CASE("the gateway judge with the judge mock agrees with the in-process judge") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout = floating_cup_scene(repo, 0.3);
    const Vec3 cup = layout.instance("cup_1").transform.translation;
    const std::vector<CameraRig> cams{
        {test_intrinsics(64), CameraPose::look_at({cup.x + 0.03, cup.y, cup.z + 2.5}, cup)},
        {test_intrinsics(64), CameraPose::look_at({cup.x + 1.2, cup.y, cup.z}, cup)}};
    std::vector<RenderedView> views;
    for (size_t i = 0; i < cams.size(); ++i)
        views.push_back(render_view(layout, cams[i].intrinsics, cams[i].pose, (int)i));

    auto gateway = make_mock_gateway(RoleTag::judge, 7);
    GatewayJudge remote(*gateway);
    const auto via_wire = remote.judge(layout, views, layout.constraints.front());
    const auto in_process = geometric_judge(layout, views, layout.constraints.front());
    REQUIRE(via_wire.size() == in_process.size());
    for (size_t i = 0; i < via_wire.size(); ++i)
        CHECK(via_wire[i].score == doctest::Approx(in_process[i].score).epsilon(1e-9));
}

TEST_CASE("camera ring: equal azimuths, aimed at the centroid") {
    const AssetRepository repo = oracle::demo_repo();
    SceneLayout layout;
    layout.insert(*repo.find("table"), "table_1", "a table", Placement{});
    const auto rigs = make_camera_ring(layout, 4);
    REQUIRE(rigs.size() == 4);
    const auto [lo, hi] = layout.world_bounds();
    const Vec3 centroid = (lo + hi) * 0.5;
    const double expected_radius = 1.5 * norm(hi - lo);
    for (const auto& rig : rigs) {
        CHECK(norm(rig.pose.center() - centroid) == doctest::Approx(expected_radius).epsilon(1e-9));
        // Aimed at the centroid: it projects to the principal point.
        const PixelCoord px = project(rig.intrinsics, rig.pose, centroid);
        CHECK(px.u == doctest::Approx(rig.intrinsics.cx).epsilon(1e-6));
        CHECK(px.v == doctest::Approx(rig.intrinsics.cy).epsilon(1e-6));
    }
}
