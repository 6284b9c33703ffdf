// Microbenchmarks for the hot paths: text retrieval, free-region search,
// rendering, judging and a whole single-scene pipeline run.

#include <benchmark/benchmark.h>

#include "fyi/dataset.hpp"
#include "fyi/rng.hpp"

using namespace fyi;

namespace {

const AssetRepository& repo() {
    static const AssetRepository r =
        AssetRepository::load_file(std::string(FYI_SOURCE_DIR) + "/assets/demo_assets.json");
    return r;
}

SceneLayout demo_scene() {
    SceneLayout layout(LayoutParams{4.0, 0.05, 0.05});
    layout.constraints.push_back({Predicate::on, "cup_1", "table_1", std::nullopt, 0});
    layout.constraints.push_back({Predicate::on, "cup_2", "table_1", std::nullopt, 0});
    layout.insert(*repo().find("table"), "table_1", "a table", Placement{});
    layout.insert(*repo().find("cup"), "cup_1", "a cup", Placement{});
    layout.insert(*repo().find("cup"), "cup_2", "a cup", Placement{});
    return layout;
}

} // namespace

static void BM_EmbedText(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(embed_text("a wooden dining table with two ceramic cups"));
}
BENCHMARK(BM_EmbedText);

static void BM_RetrieveTopK(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(retrieve_top_k(repo(), "pink cup", 3));
}
BENCHMARK(BM_RetrieveTopK);

static void BM_ProjectPoint(benchmark::State& state) {
    const CameraIntrinsics K = make_intrinsics(192, 192, 64, 64, 128, 128);
    const CameraPose E = CameraPose::look_at({2, -2, 1.5}, {0, 0, 0.4});
    const Vec3 p{0.1, 0.2, 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(project(K, E, p));
}
BENCHMARK(BM_ProjectPoint);

static void BM_FindFreeRegion(benchmark::State& state) {
    // A grid with several occupied blobs, searching for a table-sized spot.
    OccupancyGrid grid({-3, -3}, {3, 3}, 0.05);
    Rng rng(5);
    for (int b = 0; b < static_cast<int>(state.range(0)); ++b) {
        const Poly2 blob = translated(
            Poly2{{-0.5, -0.3}, {0.5, -0.3}, {0.5, 0.3}, {-0.5, 0.3}},
            {rng.uniform(-2.2, 2.2), rng.uniform(-2.2, 2.2)});
        grid.mark(grid.cells_under(blob, 0.0));
    }
    const Poly2 footprint{{-0.8, -0.4}, {0.8, -0.4}, {0.8, 0.4}, {-0.8, 0.4}};
    for (auto _ : state) benchmark::DoNotOptimize(grid.find_free_region(footprint, 0.05));
}
BENCHMARK(BM_FindFreeRegion)->Arg(0)->Arg(8)->Arg(24);

static void BM_RenderView(benchmark::State& state) {
    const SceneLayout layout = demo_scene();
    const int size = static_cast<int>(state.range(0));
    const auto rigs = make_camera_ring(layout, 1, RingParams{1.5, 30.0, 1.5, size, size, 0.0});
    for (auto _ : state)
        benchmark::DoNotOptimize(render_view(layout, rigs[0].intrinsics, rigs[0].pose, 0, 1));
    state.SetItemsProcessed(state.iterations() * size * size);
}
BENCHMARK(BM_RenderView)->Arg(64)->Arg(128);

static void BM_GeometricJudge(benchmark::State& state) {
    const SceneLayout layout = demo_scene();
    const auto rigs = make_camera_ring(layout, 2, RingParams{1.5, 30.0, 1.5, 64, 64, 0.0});
    std::vector<RenderedView> views;
    for (size_t i = 0; i < rigs.size(); ++i)
        views.push_back(render_view(layout, rigs[i].intrinsics, rigs[i].pose, (int)i, 1));
    for (auto _ : state)
        benchmark::DoNotOptimize(geometric_judge(layout, views, layout.constraints.front()));
}
BENCHMARK(BM_GeometricJudge);

static void BM_SampleFrames(benchmark::State& state) {
    const SceneLayout layout = demo_scene();
    PlannerSceneContext ctx;
    const auto [lo, hi] = layout.world_bounds();
    ctx.camera_aim = (lo + hi) * 0.5;
    ctx.initial_camera = CameraPose::look_at(ctx.camera_aim + Vec3{3, 0, 2}, ctx.camera_aim);
    auto gateway = make_mock_gateway(RoleTag::planner, 7);
    const ActionPlan plan =
        plan_from_instruction("orbit the scene by 90 degrees", layout, ctx, *gateway);
    for (auto _ : state) benchmark::DoNotOptimize(sample_frames(plan, layout, ctx));
}
BENCHMARK(BM_SampleFrames);

static void BM_PipelineScene(benchmark::State& state) {
    PipelineConfig config;
    config.manifest = std::string(FYI_SOURCE_DIR) + "/assets/demo_assets.json";
    config.width = 64;
    config.height = 64;
    const std::filesystem::path dir =
        std::filesystem::temp_directory_path() / "fyi_bench_pipeline";
    PipelineOptions opt;
    opt.seed = 7;
    uint64_t n = 0;
    for (auto _ : state) {
        opt.scene_name = "scene_" + std::to_string(n++);
        benchmark::DoNotOptimize(
            run_pipeline(config, "bench", AssetRepository::load_json(repo().to_json()), opt, dir));
    }
    std::filesystem::remove_all(dir);
}
BENCHMARK(BM_PipelineScene)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
