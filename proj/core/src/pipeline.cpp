#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <thread>

#include "fyi/dataset.hpp"

namespace fyi {

namespace {

std::string frame_file(const char* stem, int index, const char* ext) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s_%04d.%s", stem, index, ext);
    return buf;
}

// Re-render the scene at one frame's object/camera state.
RenderedView render_frame(const SceneLayout& base, const FrameState& frame,
                          const CameraIntrinsics& K, int threads) {
    SceneLayout posed = base;
    for (auto& inst : posed.instances) {
        const auto it = frame.actors.find(inst.instance_id);
        if (it != frame.actors.end()) inst.transform = it->second;
    }
    return render_view(posed, K, frame.camera, 0, threads);
}

} // namespace

PipelineResult run_pipeline(const PipelineConfig& config, const std::string& config_hash,
                            const AssetRepository& repo, const PipelineOptions& options,
                            const std::filesystem::path& out_dir) {
    PipelineResult result;
    const std::filesystem::path scene_dir = out_dir / options.scene_name;
    json files = json::array();
    const auto emit = [&](const std::string& name, const std::string& bytes) {
        atomic_write(scene_dir / name, bytes);
        files.push_back(json{{"path", options.scene_name + "/" + name},
                             {"bytes", static_cast<int64_t>(bytes.size())},
                             {"sha256", sha256_hex(bytes)}});
    };

    const int views = options.views > 0 ? options.views : config.views;
    const double threshold = options.threshold > 0.0 ? options.threshold : config.threshold;

    try {
        // Backends: one gateway per role, rule-table mocks unless --live.
        std::unique_ptr<GatewayHandle> collector, planner;
        std::unique_ptr<Gateway> live;
        if (options.live) {
            GatewayConfig gc = config.gateway;
            const GatewayConfig env = GatewayConfig::from_env();
            if (!env.endpoint.empty()) gc.endpoint = env.endpoint;
            if (!env.model.empty()) gc.model = env.model;
            gc.api_key = env.api_key;
            if (gc.endpoint.empty())
                raise(errc::config_error, "live mode needs gateway.endpoint or FYI_LLM_ENDPOINT");
            live = std::make_unique<Gateway>(gc, make_live_transport());
        }
        GatewayHandle* collector_gw;
        GatewayHandle* planner_gw;
        if (options.live) {
            collector_gw = live.get();
            planner_gw = live.get();
        } else {
            collector = make_mock_gateway(RoleTag::collector, options.seed);
            planner = make_mock_gateway(RoleTag::planner, options.seed);
            collector_gw = collector.get();
            planner_gw = planner.get();
        }

        // 1. Instruction -> resolved decomposition.
        const SceneDecomposition decomposition =
            collect(repo, InstructionInput{config.instruction, {}}, *collector_gw,
                    CollectConfig{config.top_k, config.min_score});

        // 2. Decomposition -> placed layout.
        BuildParams build;
        build.layout = config.layout_params();
        build.random_yaw = config.random_yaw;
        build.seed = options.seed;
        SceneLayout layout = build_layout(decomposition, repo, build);

        // 3. Multi-view verification.
        const auto cameras = make_camera_ring(layout, views, config.ring_params());
        GeometricJudge geometric(config.judge_params());
        std::unique_ptr<GatewayJudge> live_judge;
        JudgeHandle* judge = &geometric;
        if (options.live) {
            live_judge = std::make_unique<GatewayJudge>(*live, config.judge_params());
            judge = live_judge.get();
        }
        OptimizeParams opt{threshold, config.max_iter, config.threads};
        const OptimizationReport report = optimize_layout(layout, cameras, *judge, opt);
        result.optimization_passed = report.passed;

        // 4. Instruction -> plan -> smooth frame sequence.
        PlannerSceneContext ctx;
        ctx.initial_camera = cameras.front().pose;
        const auto [lo, hi] = layout.world_bounds();
        ctx.camera_aim = (lo + hi) * 0.5;
        const ActionPlan plan =
            plan_from_instruction(config.instruction, layout, ctx, *planner_gw, config.fps);
        RefineParams refine;
        refine.budget = config.budget();
        refine.max_rounds = config.max_rounds;
        refine.max_frames = config.max_frames;
        if (options.live) refine.online = live.get();
        const RefineResult refined = refine_plan(plan, layout, ctx, refine);
        result.refinement_converged = refined.sequence.converged;
        result.frames = static_cast<int>(refined.sequence.frames.size());

        // 5. Export.
        emit("scene.json", export_scene(layout));
        emit("report.json", canonical_bytes(report.to_json()));
        emit("plan.json", canonical_bytes(refined.plan.to_json()));
        const CameraIntrinsics K = cameras.front().intrinsics;
        for (size_t i = 0; i < refined.sequence.frames.size(); ++i) {
            const RenderedView view =
                render_frame(layout, refined.sequence.frames[i], K, config.threads);
            emit(frame_file("depth", static_cast<int>(i), "pfm"), export_depth(view));
            emit(frame_file("mask", static_cast<int>(i), "pgm"), export_mask(view));
        }
        emit("trajectory.json", canonical_bytes(trajectory_json(refined.sequence, K)));
        emit("poses.json", canonical_bytes(poses_json(refined.sequence)));

        if (!report.passed) result.exit_code = exit_optimization_failed;
        else if (!refined.sequence.converged) result.exit_code = exit_refinement_nonconvergent;
    } catch (const Error& e) {
        result.error = e.what();
        switch (e.code()) {
        case errc::schema_error:
        case errc::transport_error:
        case errc::timeout:
        case errc::budget_exhausted: result.exit_code = exit_gateway_error; break;
        default: result.exit_code = exit_config_error; break;
        }
    }

    result.scene_manifest = json{{"name", options.scene_name},
                                 {"seed", static_cast<int64_t>(options.seed)},
                                 {"config_hash", config_hash},
                                 {"exit_code", result.exit_code},
                                 {"optimization_passed", result.optimization_passed},
                                 {"refinement_converged", result.refinement_converged},
                                 {"frames", result.frames},
                                 {"files", std::move(files)}};
    if (!result.error.empty()) result.scene_manifest["error"] = result.error;
    return result;
}

json run_bundle(const PipelineConfig& config, const std::string& config_bytes,
                const std::vector<uint64_t>& seeds, const std::filesystem::path& out_dir,
                bool live, int concurrency) {
    const std::string config_hash = sha256_hex(config_bytes);
    const AssetRepository repo = AssetRepository::load_file(config.manifest);
    std::vector<json> scene_entries(seeds.size());
    std::atomic<size_t> next{0};
    std::atomic<bool> any_failed{false};

    const auto worker = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= seeds.size()) return;
            char name[32];
            std::snprintf(name, sizeof(name), "scene_%04zu", i);
            PipelineOptions opt;
            opt.seed = seeds[i];
            opt.scene_name = name;
            opt.live = live;
            const PipelineResult r = run_pipeline(config, config_hash, repo, opt, out_dir);
            scene_entries[i] = r.scene_manifest;
            if (r.exit_code != exit_ok) any_failed = true;
        }
    };

    int n = concurrency > 0 ? concurrency : static_cast<int>(std::thread::hardware_concurrency());
    n = std::max(1, std::min<int>(n, static_cast<int>(seeds.size())));
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    json scenes = json::array();
    for (auto& e : scene_entries) scenes.push_back(std::move(e));
    json manifest{{"schema", 1},
                  {"config_hash", config_hash},
                  {"scene_count", static_cast<int64_t>(seeds.size())},
                  {"all_ok", !any_failed.load()},
                  {"scenes", std::move(scenes)}};
    atomic_write(out_dir / "manifest.json", canonical_bytes(manifest));

    // Self-check: every listed file must exist with the recorded hash.
    for (const auto& scene : manifest["scenes"]) {
        for (const auto& f : scene.value("files", json::array())) {
            const std::filesystem::path p = out_dir / f.at("path").get<std::string>();
            std::ifstream in(p, std::ios::binary);
            if (!in) raise(errc::config_error, "manifest lists missing file " + p.string());
            std::stringstream buf;
            buf << in.rdbuf();
            if (sha256_hex(buf.str()) != f.at("sha256").get<std::string>())
                raise(errc::config_error, "hash mismatch after write: " + p.string());
        }
    }
    return manifest;
}

} // namespace fyi
