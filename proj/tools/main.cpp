// Command-line front end: instruction -> dataset in one command, plus
// subcommands that stop after each pipeline stage for inspection, and the
// desk-scale benchmark tables.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "fyi/bench.hpp"
#include "fyi/dataset.hpp"

using namespace fyi;

namespace {

struct GlobalArgs {
    std::string config_path;
    std::string out_dir = "out";
    uint64_t seed = 7;
    int views = 0;          // 0 = config value
    double threshold = 0.0; // 0 = config value
    bool live = false;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::config_error, "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

struct Loaded {
    PipelineConfig config;
    std::string config_bytes;
};

Loaded load_config(const GlobalArgs& args) {
    Loaded loaded;
    if (!args.config_path.empty()) {
        loaded.config_bytes = read_file(args.config_path);
        loaded.config = PipelineConfig::parse(loaded.config_bytes);
    } else {
        loaded.config_bytes = "";
        loaded.config = PipelineConfig{};
    }
    if (args.views > 0) loaded.config.views = args.views;
    if (args.threshold > 0.0) loaded.config.threshold = args.threshold;
    return loaded;
}

std::unique_ptr<GatewayHandle> gateway_for(const PipelineConfig& config, RoleTag role,
                                           uint64_t seed, bool live) {
    if (!live) return make_mock_gateway(role, seed);
    GatewayConfig gc = config.gateway;
    const GatewayConfig env = GatewayConfig::from_env();
    if (!env.endpoint.empty()) gc.endpoint = env.endpoint;
    if (!env.model.empty()) gc.model = env.model;
    gc.api_key = env.api_key;
    if (gc.endpoint.empty())
        raise(errc::config_error, "--live needs gateway.endpoint or FYI_LLM_ENDPOINT");
    return std::make_unique<Gateway>(gc, make_live_transport());
}

struct StageOutputs {
    SceneDecomposition decomposition;
    SceneLayout layout;
    OptimizationReport report;
};

StageOutputs run_through_optimize(const PipelineConfig& config, const GlobalArgs& args,
                                  const AssetRepository& repo) {
    StageOutputs out;
    auto collector = gateway_for(config, RoleTag::collector, args.seed, args.live);
    out.decomposition = collect(repo, InstructionInput{config.instruction, {}}, *collector,
                                CollectConfig{config.top_k, config.min_score});
    BuildParams build;
    build.layout = config.layout_params();
    build.random_yaw = config.random_yaw;
    build.seed = args.seed;
    out.layout = build_layout(out.decomposition, repo, build);

    const auto cameras = make_camera_ring(out.layout, config.views, config.ring_params());
    GeometricJudge judge(config.judge_params());
    out.report = optimize_layout(out.layout, cameras, judge,
                                 {config.threshold, config.max_iter, config.threads});
    return out;
}

int cmd_collect(const GlobalArgs& args) {
    const Loaded loaded = load_config(args);
    const AssetRepository repo = AssetRepository::load_file(loaded.config.manifest);
    auto gateway = gateway_for(loaded.config, RoleTag::collector, args.seed, args.live);
    const SceneDecomposition d =
        collect(repo, InstructionInput{loaded.config.instruction, {}}, *gateway,
                CollectConfig{loaded.config.top_k, loaded.config.min_score});
    atomic_write(std::filesystem::path(args.out_dir) / "decomposition.json",
                 canonical_bytes(d.to_json()));
    int assets = 0, constraints = 0;
    for (const auto& s : d.sub_scenes) {
        assets += static_cast<int>(s.assets.size());
        constraints += static_cast<int>(s.constraints.size());
    }
    std::printf("collected %d assets, %d constraints -> %s/decomposition.json\n", assets,
                constraints, args.out_dir.c_str());
    return exit_ok;
}

int cmd_layout(const GlobalArgs& args) {
    const Loaded loaded = load_config(args);
    const AssetRepository repo = AssetRepository::load_file(loaded.config.manifest);
    auto gateway = gateway_for(loaded.config, RoleTag::collector, args.seed, args.live);
    const SceneDecomposition d =
        collect(repo, InstructionInput{loaded.config.instruction, {}}, *gateway,
                CollectConfig{loaded.config.top_k, loaded.config.min_score});
    BuildParams build;
    build.layout = loaded.config.layout_params();
    build.random_yaw = loaded.config.random_yaw;
    build.seed = args.seed;
    const SceneLayout layout = build_layout(d, repo, build);
    atomic_write(std::filesystem::path(args.out_dir) / "scene.json", export_scene(layout));
    std::printf("placed %zu instances -> %s/scene.json\n", layout.instances.size(),
                args.out_dir.c_str());
    return exit_ok;
}

int cmd_optimize(const GlobalArgs& args) {
    const Loaded loaded = load_config(args);
    const AssetRepository repo = AssetRepository::load_file(loaded.config.manifest);
    const StageOutputs out = run_through_optimize(loaded.config, args, repo);
    atomic_write(std::filesystem::path(args.out_dir) / "scene.json", export_scene(out.layout));
    atomic_write(std::filesystem::path(args.out_dir) / "report.json",
                 canonical_bytes(out.report.to_json()));
    std::printf("optimization %s in %d iteration(s), %zu relocation(s)\n",
                out.report.passed ? "passed" : "FAILED", out.report.iterations,
                out.report.relocations.size());
    return out.report.passed ? exit_ok : exit_optimization_failed;
}

int cmd_plan(const GlobalArgs& args) {
    const Loaded loaded = load_config(args);
    const AssetRepository repo = AssetRepository::load_file(loaded.config.manifest);
    const StageOutputs out = run_through_optimize(loaded.config, args, repo);

    const auto cameras = make_camera_ring(out.layout, loaded.config.views, loaded.config.ring_params());
    PlannerSceneContext ctx;
    ctx.initial_camera = cameras.front().pose;
    const auto [lo, hi] = out.layout.world_bounds();
    ctx.camera_aim = (lo + hi) * 0.5;

    auto planner = gateway_for(loaded.config, RoleTag::planner, args.seed, args.live);
    const ActionPlan plan = plan_from_instruction(loaded.config.instruction, out.layout, ctx,
                                                  *planner, loaded.config.fps);
    RefineParams refine;
    refine.budget = loaded.config.budget();
    refine.max_rounds = loaded.config.max_rounds;
    refine.max_frames = loaded.config.max_frames;
    const RefineResult refined = refine_plan(plan, out.layout, ctx, refine);

    atomic_write(std::filesystem::path(args.out_dir) / "plan.json",
                 canonical_bytes(refined.plan.to_json()));
    std::printf("plan: %zu action(s), %zu frame(s), %d refinement round(s)%s\n",
                refined.plan.actions.size(), refined.sequence.frames.size(), refined.rounds_used,
                refined.sequence.converged ? "" : " (non-convergent)");
    return refined.sequence.converged ? exit_ok : exit_refinement_nonconvergent;
}

int cmd_render(const GlobalArgs& args) {
    const Loaded loaded = load_config(args);
    const AssetRepository repo = AssetRepository::load_file(loaded.config.manifest);
    const StageOutputs out = run_through_optimize(loaded.config, args, repo);
    const auto cameras = make_camera_ring(out.layout, loaded.config.views, loaded.config.ring_params());
    for (size_t v = 0; v < cameras.size(); ++v) {
        const RenderedView view = render_view(out.layout, cameras[v].intrinsics, cameras[v].pose,
                                              static_cast<int>(v), loaded.config.threads);
        char name[64];
        std::snprintf(name, sizeof(name), "view_%02zu", v);
        atomic_write(std::filesystem::path(args.out_dir) / (std::string(name) + "_depth.pfm"),
                     export_depth(view));
        atomic_write(std::filesystem::path(args.out_dir) / (std::string(name) + "_mask.pgm"),
                     export_mask(view));
    }
    std::printf("rendered %zu view(s) -> %s\n", cameras.size(), args.out_dir.c_str());
    return exit_ok;
}

int cmd_pipeline(const GlobalArgs& args, int scenes) {
    const Loaded loaded = load_config(args);
    std::vector<uint64_t> seeds;
    for (int i = 0; i < scenes; ++i) seeds.push_back(args.seed + static_cast<uint64_t>(i));
    const json manifest =
        run_bundle(loaded.config, loaded.config_bytes, seeds, args.out_dir, args.live);
    std::printf("bundle: %d scene(s), config %s, all_ok=%s -> %s/manifest.json\n", scenes,
                manifest["config_hash"].get<std::string>().substr(0, 12).c_str(),
                manifest["all_ok"].get<bool>() ? "true" : "false", args.out_dir.c_str());
    if (manifest["all_ok"].get<bool>()) return exit_ok;
    // Surface the first failing scene's exit code.
    for (const auto& scene : manifest["scenes"])
        if (scene["exit_code"].get<int>() != exit_ok) return scene["exit_code"].get<int>();
    return exit_ok;
}

int cmd_bench(const GlobalArgs& args) {
    const Loaded loaded = load_config(args);
    const AssetRepository repo = AssetRepository::load_file(loaded.config.manifest);

    std::printf("misplacement benchmark: 100 scenes, vertical offsets 0.10-0.50 m, aligned first "
                "camera, t=%.2f\n",
                0.8);
    std::printf("%8s %14s %14s %10s\n", "views", "success_rate", "opt_passed", "time_s");
    for (const int views : {1, 2, 3}) {
        MisplacementParams p;
        p.views = views;
        p.seed = args.seed;
        const MisplacementResult r = run_misplacement_benchmark(repo, p);
        std::printf("%8d %14.4f %14.4f %10.2f\n", views, r.success_rate,
                    static_cast<double>(r.reported_passed) / r.scenes, r.elapsed_s);
    }

    JerkyPlanParams jp;
    jp.seed = args.seed + 4;
    const JerkyPlanResult jr = run_jerky_plan_benchmark(repo, jp);
    std::printf("\nframe-prediction benchmark: %d jerky plans, budget %.0f deg / %.2f m per frame\n",
                jr.plans, jp.budget.max_rot_deg_per_frame, jp.budget.max_trans_m_per_frame);
    std::printf("%22s %22s %12s %10s\n", "violations_before", "violations_after", "smoothed",
                "time_s");
    std::printf("%22.2f %22.2f %9d/%2d %10.2f\n", jr.mean_violations_before,
                jr.mean_violations_after, jr.fully_smoothed, jr.plans, jr.elapsed_s);
    return exit_ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"instruction-to-dataset scene synthesis engine"};
    app.require_subcommand(1);

    GlobalArgs args;
    app.add_option("--config", args.config_path, "TOML-style config file");
    app.add_option("--seed", args.seed, "base RNG seed")->capture_default_str();
    app.add_option("--out", args.out_dir, "output directory")->capture_default_str();
    app.add_option("--views", args.views, "override optimizer view count");
    app.add_option("--threshold", args.threshold, "override judge threshold");
    app.add_flag("--live", args.live, "use the HTTP gateway instead of the rule-table mocks");

    int scenes = 1;
    app.add_subcommand("collect", "decompose the instruction into assets and constraints");
    app.add_subcommand("layout", "place the decomposed assets into a scene");
    app.add_subcommand("optimize", "verify and fix the scene across views");
    app.add_subcommand("plan", "turn the instruction into a smooth frame plan");
    app.add_subcommand("render", "write depth/mask views of the optimized scene");
    auto* pipeline =
        app.add_subcommand("pipeline", "run every stage and export a dataset bundle");
    pipeline->add_option("--scenes", scenes, "number of scenes (seed, seed+1, ...)")
        ->capture_default_str();
    app.add_subcommand("bench", "run the desk-scale view-count and smoothing benchmarks");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("collect")) return cmd_collect(args);
        if (app.got_subcommand("layout")) return cmd_layout(args);
        if (app.got_subcommand("optimize")) return cmd_optimize(args);
        if (app.got_subcommand("plan")) return cmd_plan(args);
        if (app.got_subcommand("render")) return cmd_render(args);
        if (app.got_subcommand("pipeline")) return cmd_pipeline(args, scenes);
        if (app.got_subcommand("bench")) return cmd_bench(args);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        switch (e.code()) {
        case errc::schema_error:
        case errc::transport_error:
        case errc::timeout:
        case errc::budget_exhausted: return exit_gateway_error;
        default: return exit_config_error;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_config_error;
    }
    return exit_ok;
}
