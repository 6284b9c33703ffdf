#include "fyi/bench.hpp"

#include <chrono>
#include <cmath>

#include "fyi/rng.hpp"

namespace fyi {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

const AssetRecord& need_asset(const AssetRepository& repo, const std::string& id) {
    const AssetRecord* a = repo.find(id);
    if (!a) raise(errc::unresolvable_asset, "benchmark needs asset '" + id + "'");
    return *a;
}

} // namespace

MisplacementResult run_misplacement_benchmark(const AssetRepository& repo,
                                              const MisplacementParams& p) {
    const auto t0 = Clock::now();
    const AssetRecord& desk = need_asset(repo, "desk");
    const AssetRecord& mug = need_asset(repo, "mug");

    MisplacementResult result;
    result.scenes = p.scenes;
    Rng root(p.seed);

    for (int s = 0; s < p.scenes; ++s) {
        Rng rng = root.fork(static_cast<uint64_t>(s));

        SceneLayout layout(LayoutParams{4.0, 0.05, 0.05});
        layout.constraints.push_back({Predicate::on, "mug_1", "desk_1", std::nullopt, 0});
        layout.insert(desk, "desk_1", desk.description, Placement{});
        layout.insert(mug, "mug_1", mug.description, Placement{});

        // Float the mug: keep it over the desk but lift its base.
        const ObjectInstance& d = layout.instance("desk_1");
        const double margin_x = desk.canonical_dims.x * 0.5 - mug.canonical_dims.x;
        const double margin_y = desk.canonical_dims.y * 0.5 - mug.canonical_dims.y;
        const Vec3 desk_pos = d.transform.translation;
        const double top = *d.support_top();
        const double offset = rng.uniform(p.offset_min, p.offset_max);
        layout.place_instructed("mug_1", Vec3{desk_pos.x + rng.uniform(-margin_x, margin_x),
                                              desk_pos.y + rng.uniform(-margin_y, margin_y),
                                              top + offset});

        // Camera 1 looks straight down the offset axis; extra views circle
        // low around the desk.
        const auto [lo, hi] = layout.world_bounds();
        const Vec3 centroid = (lo + hi) * 0.5;
        const double diagonal = norm(hi - lo);
        const double size = p.image_size;
        const CameraIntrinsics K = make_intrinsics(p.side_focal_scale * size, p.side_focal_scale * size,
                                                   size / 2.0, size / 2.0, p.image_size, p.image_size);
        std::vector<CameraRig> cameras;
        cameras.push_back(
            {K, CameraPose::look_at(centroid + Vec3{0.0, 0.0, p.aligned_radius_scale * diagonal},
                                    centroid)});
        for (int v = 1; v < p.views; ++v) {
            const double az = 2.0 * kPi * (v - 1) / std::max(1, p.views - 1);
            const double el = deg_to_rad(p.side_elevation_deg);
            const double r = p.side_radius_scale * diagonal;
            const Vec3 eye = centroid + Vec3{r * std::cos(az) * std::cos(el),
                                             r * std::sin(az) * std::cos(el), r * std::sin(el)};
            cameras.push_back({K, CameraPose::look_at(eye, centroid)});
        }

        GeometricJudge judge;
        OptimizeParams opt{p.threshold, p.max_iter, 1};
        const OptimizationReport report = optimize_layout(layout, cameras, judge, opt);

        const double gap =
            std::abs(layout.instance("mug_1").transform.translation.z - *d.support_top());
        if (report.passed) ++result.reported_passed;
        if (gap < 1e-3) ++result.truly_fixed;
        if (report.passed && gap < 1e-3) result.success_rate += 1.0;
    }

    result.success_rate /= std::max(1, p.scenes);
    result.elapsed_s = seconds_since(t0);
    return result;
}

JerkyPlanResult run_jerky_plan_benchmark(const AssetRepository& repo, const JerkyPlanParams& p) {
    const auto t0 = Clock::now();
    const AssetRecord& airplane = need_asset(repo, "airplane");

    JerkyPlanResult result;
    result.plans = p.plans;
    Rng root(p.seed);
    long total_before = 0, total_after = 0;

    for (int i = 0; i < p.plans; ++i) {
        Rng rng = root.fork(static_cast<uint64_t>(i));

        SceneLayout layout(LayoutParams{12.0, 0.1, 0.05});
        layout.insert(airplane, "airplane_1", airplane.description, Placement{});

        // A handful of abrupt actions: large turns and jumps compressed into
        // one or two frame intervals.
        ActionPlan plan;
        plan.fps = p.fps;
        double clock = 0.0;
        double yaw = 0.0;
        Vec3 pos = layout.instance("airplane_1").transform.translation;
        const int n_actions = 2 + static_cast<int>(rng.below(3));
        for (int a = 0; a < n_actions; ++a) {
            const double dur = (1.0 + static_cast<double>(rng.below(2))) / p.fps; // 1-2 frames
            if (rng.below(2) == 0) {
                yaw += deg_to_rad(90.0 + rng.uniform(0.0, 90.0)) * (rng.below(2) ? 1.0 : -1.0);
                const Rotation target = Rotation::yaw(yaw);
                plan.actions.push_back(
                    {"airplane_1", ActionKind::rotate_to, clock, clock + dur, target});
            } else {
                const Vec3 dir{std::cos(yaw), std::sin(yaw), 0.0};
                pos += dir * rng.uniform(0.5, 1.5);
                plan.actions.push_back({"airplane_1", ActionKind::move_to, clock, clock + dur, pos});
            }
            clock += dur;
            // A short legal glide between the jolts.
            const double glide = 0.25;
            pos += Vec3{std::cos(yaw), std::sin(yaw), 0.0} * (0.02 * glide * p.fps);
            plan.actions.push_back({"airplane_1", ActionKind::move_to, clock, clock + glide, pos});
            clock += glide;
        }
        plan.duration_s = clock;

        PlannerSceneContext ctx;
        const auto [lo, hi] = layout.world_bounds();
        ctx.camera_aim = (lo + hi) * 0.5;
        ctx.initial_camera = CameraPose::look_at(ctx.camera_aim + Vec3{4.0, 0.0, 2.0}, ctx.camera_aim);

        const FrameSequence raw = sample_frames(plan, layout, ctx);
        const auto before = check_temporal(raw, p.budget);
        total_before += static_cast<long>(before.size());

        RefineParams refine;
        refine.budget = p.budget;
        refine.max_rounds = p.max_rounds;
        refine.max_frames = p.max_frames;
        const RefineResult refined = refine_plan(plan, layout, ctx, refine);
        const auto after = check_temporal(refined.sequence, p.budget);
        total_after += static_cast<long>(after.size());
        if (after.empty()) ++result.fully_smoothed;
        result.max_rounds_used = std::max(result.max_rounds_used, refined.rounds_used);
    }

    result.mean_violations_before = static_cast<double>(total_before) / std::max(1, p.plans);
    result.mean_violations_after = static_cast<double>(total_after) / std::max(1, p.plans);
    result.elapsed_s = seconds_since(t0);
    return result;
}

} // namespace fyi
