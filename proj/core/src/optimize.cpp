#include "fyi/optimize.hpp"

#include <algorithm>
#include <cmath>

namespace fyi {

json OptimizationReport::to_json() const {
    json scores = json::array();
    for (const auto& s : constraint_scores)
        scores.push_back(json{{"constraint", s.constraint.to_json()}, {"score", s.score}});
    json relocs = json::array();
    for (const auto& r : relocations)
        relocs.push_back(json{{"instance", r.instance_id},
                              {"from", json::array({r.from.x, r.from.y, r.from.z})},
                              {"to", json::array({r.to.x, r.to.y, r.to.z})}});
    json notes_j = json::array();
    for (const auto& n : notes) notes_j.push_back(n);
    return json{{"iterations", iterations},
                {"passed", passed},
                {"constraint_scores", std::move(scores)},
                {"relocations", std::move(relocs)},
                {"notes", std::move(notes_j)}};
}

std::vector<CameraRig> make_camera_ring(const SceneLayout& layout, int views, const RingParams& p) {
    if (views < 1) raise(errc::config_error, "camera ring needs at least one view");
    const auto [lo, hi] = layout.world_bounds();
    const Vec3 centroid = (lo + hi) * 0.5;
    const double diagonal = std::max(norm(hi - lo), 0.5);
    const double radius = p.radius_scale * diagonal;
    const double elev = deg_to_rad(p.elevation_deg);

    const CameraIntrinsics K = make_intrinsics(p.focal_scale * p.width, p.focal_scale * p.width,
                                               p.width / 2.0, p.height / 2.0, p.width, p.height);
    std::vector<CameraRig> rigs;
    rigs.reserve(views);
    for (int i = 0; i < views; ++i) {
        const double az = deg_to_rad(p.start_azimuth_deg) + 2.0 * kPi * i / views;
        const Vec3 eye = centroid + Vec3{radius * std::cos(az) * std::cos(elev),
                                         radius * std::sin(az) * std::cos(elev),
                                         radius * std::sin(elev)};
        rigs.push_back({K, CameraPose::look_at(eye, centroid)});
    }
    return rigs;
}

namespace {

struct Pass {
    std::vector<ConstraintScore> scores;
    int violations = 0;
    double total = 0.0;
    int worst = -1; // index into scores
};

Pass evaluate(const SceneLayout& layout, const std::vector<CameraRig>& cameras, JudgeHandle& judge,
              const OptimizeParams& params) {
    std::vector<RenderedView> views;
    views.reserve(cameras.size());
    for (size_t i = 0; i < cameras.size(); ++i)
        views.push_back(render_view(layout, cameras[i].intrinsics, cameras[i].pose,
                                    static_cast<int>(i), params.render_threads));
    Pass pass;
    double worst_score = 2.0;
    for (const auto& c : layout.constraints) {
        const auto verdicts = judge.judge(layout, views, c);
        const double s = aggregate_scores(verdicts);
        pass.scores.push_back({c, s});
        pass.total += s;
        if (s < params.threshold) {
            ++pass.violations;
            if (s < worst_score) {
                worst_score = s;
                pass.worst = static_cast<int>(pass.scores.size()) - 1;
            }
        }
    }
    return pass;
}

} // namespace

OptimizationReport optimize_layout(SceneLayout& layout, const std::vector<CameraRig>& cameras,
                                   JudgeHandle& judge, const OptimizeParams& params) {
    if (cameras.empty()) raise(errc::config_error, "optimizer needs at least one camera");
    if (!(params.threshold > 0.0 && params.threshold <= 1.0))
        raise(errc::config_error, "threshold must lie in (0, 1]");
    if (params.max_iter < 1) raise(errc::config_error, "max_iter must be >= 1");

    OptimizationReport report;
    SceneLayout best = layout;
    Pass best_pass;
    bool have_best = false;

    for (int iter = 0; iter < params.max_iter; ++iter) {
        report.iterations = iter + 1;
        Pass pass = evaluate(layout, cameras, judge, params);

        const bool better = !have_best || pass.violations < best_pass.violations ||
                            (pass.violations == best_pass.violations && pass.total > best_pass.total);
        if (better) {
            best = layout;
            best_pass = pass;
            have_best = true;
        }

        if (pass.violations == 0) {
            report.passed = true;
            report.constraint_scores = std::move(pass.scores);
            return report;
        }
        if (iter + 1 == params.max_iter) break;

        // Fix the worst constraint's subject: vertical snap onto the support
        // first, lateral re-placement within the reference's region second.
        const SpatialConstraint& worst = pass.scores[pass.worst].constraint;
        ObjectInstance* subject = layout.find(worst.subject);
        const ObjectInstance* reference = layout.find(worst.reference);
        if (!subject || !reference) {
            report.notes.push_back("constraint references missing instance: " + constraint_text(worst));
            continue;
        }
        const Vec3 old_pos = subject->transform.translation;
        bool moved = false;

        if (worst.predicate == Predicate::on) {
            const auto sup = layout.support_index.find(worst.subject);
            const double target_z = sup != layout.support_index.end()
                                        ? sup->second.height
                                        : reference->transform.translation.z +
                                              reference->obb.half_extents.z * 2.0 *
                                                  reference->transform.scale.z;
            if (std::abs(subject->transform.translation.z - target_z) > 1e-9) {
                layout.set_bottom_height(worst.subject, target_z);
                moved = true;
            }
        }
        if (!moved) {
            // Lateral move toward where the constraint wants the anchor.
            std::vector<RenderedView> anchor_views; // correction needs view axes
            anchor_views.push_back(render_view(layout, cameras[0].intrinsics, cameras[0].pose, 0,
                                               params.render_threads));
            const Vec3 corrected = subject->transform.translation +
                                   constraint_correction(layout, anchor_views, worst, JudgeParams{});
            if (!layout.relocate_free(worst.subject, corrected.xy())) {
                report.notes.push_back("no free region while fixing " + constraint_text(worst));
                continue;
            }
            moved = true;
        }
        if (moved)
            report.relocations.push_back({worst.subject, old_pos, subject->transform.translation});
    }

    layout = std::move(best);
    report.passed = best_pass.violations == 0;
    report.constraint_scores = std::move(best_pass.scores);
    return report;
}

} // namespace fyi
