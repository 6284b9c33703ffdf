#include "fyi/judge.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace fyi {

double score_projected_gap(double gap_px, double epsilon_px, double decay_px) {
    if (gap_px <= epsilon_px) return 1.0;
    return std::max(0.0, 1.0 - (gap_px - epsilon_px) / decay_px);
}

namespace {

std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

// Highest resting surface of the reference, scaled into world space.
double reference_support_height(const ObjectInstance& ref) {
    if (const auto top = ref.support_top()) return *top;
    return ref.transform.translation.z + ref.obb.half_extents.z * 2.0 * ref.transform.scale.z;
}

} // namespace

Vec3 constraint_correction(const SceneLayout& layout, const std::vector<RenderedView>& views,
                           const SpatialConstraint& c, const JudgeParams& params) {
    const ObjectInstance* subject = layout.find(c.subject);
    const ObjectInstance* reference = layout.find(c.reference);
    if (!subject || !reference) raise(errc::unknown_instance, constraint_text(c));
    const Vec3 a = subject->transform.translation; // bottom-center anchor

    switch (c.predicate) {
    case Predicate::on: {
        // Valid set: anchor on the reference's resting surface, laterally
        // inside its footprint.
        const Vec2 xy = closest_point_in_convex(reference->footprint, a.xy());
        return Vec3{xy.x, xy.y, reference_support_height(*reference)} - a;
    }
    case Predicate::above: {
        const Vec2 xy = closest_point_in_convex(reference->footprint, a.xy());
        const double min_z = reference_support_height(*reference);
        return Vec3{xy.x, xy.y, std::max(a.z, min_z)} - a;
    }
    case Predicate::inside: {
        // Anchor inside the reference box shrunk by the subject's half size.
        const Vec3 local = hadamard(
            reference->transform.rotation.inverse().rotate(a - reference->transform.translation),
            {1.0 / reference->transform.scale.x, 1.0 / reference->transform.scale.y,
             1.0 / reference->transform.scale.z});
        const Vec3 sub_half = hadamard(subject->obb.half_extents, subject->transform.scale);
        Vec3 lo = reference->obb.center - reference->obb.half_extents + sub_half;
        Vec3 hi = reference->obb.center + reference->obb.half_extents - sub_half;
        lo.z = reference->obb.center.z - reference->obb.half_extents.z; // rest on the floor
        hi.z = std::max(lo.z, hi.z - 2.0 * sub_half.z);
        const Vec3 clamped{std::clamp(local.x, std::min(lo.x, hi.x), std::max(lo.x, hi.x)),
                           std::clamp(local.y, std::min(lo.y, hi.y), std::max(lo.y, hi.y)),
                           std::clamp(local.z, lo.z, hi.z)};
        return reference->transform.apply(clamped) - a;
    }
    case Predicate::near: {
        const double limit = c.param.value_or(params.near_default_m);
        const Vec2 d = a.xy() - reference->transform.translation.xy();
        const double dist = norm(d);
        if (dist <= limit) return {0.0, 0.0, 0.0};
        const Vec2 pull = d * ((dist - limit) / dist);
        return {-pull.x, -pull.y, 0.0};
    }
    case Predicate::left_of:
    case Predicate::right_of:
    case Predicate::in_front_of:
    case Predicate::behind: {
        // Anchored to the declared reference view's axes: "left" is that
        // camera's -X, "in front" is toward that camera.
        const size_t view_idx = static_cast<size_t>(
            std::clamp<int>(c.reference_view, 0, static_cast<int>(views.size()) - 1));
        if (views.empty()) raise(errc::config_error, "horizontal predicate needs a reference view");
        const CameraPose& anchor = views[view_idx].pose;
        const Rotation inv = anchor.rotation.inverse();
        Vec3 dir_cam{0, 0, 0};
        switch (c.predicate) {
        case Predicate::left_of: dir_cam = {-1.0, 0.0, 0.0}; break;
        case Predicate::right_of: dir_cam = {1.0, 0.0, 0.0}; break;
        case Predicate::in_front_of: dir_cam = {0.0, 0.0, -1.0}; break;
        default: dir_cam = {0.0, 0.0, 1.0}; break; // behind
        }
        Vec3 dir = inv.rotate(dir_cam);
        dir.z = 0.0; // relations live in the ground plane
        if (norm(dir) < 1e-9) return {0.0, 0.0, 0.0}; // vertical anchor view: undecidable
        dir = normalized(dir);
        const double margin = 1e-3;
        const double along = dot(a - reference->transform.translation, dir);
        if (along >= margin) return {0.0, 0.0, 0.0};
        return dir * (margin - along);
    }
    }
    return {0.0, 0.0, 0.0};
}

std::vector<JudgeVerdict> geometric_judge(const SceneLayout& layout,
                                          const std::vector<RenderedView>& views,
                                          const SpatialConstraint& c, const JudgeParams& params) {
    const ObjectInstance* subject = layout.find(c.subject);
    const ObjectInstance* reference = layout.find(c.reference);
    if (!subject || !reference) raise(errc::unknown_instance, constraint_text(c));

    const Vec3 anchor = subject->transform.translation;
    const int sub_ord = layout.ordinal_of(c.subject);
    const int ref_ord = layout.ordinal_of(c.reference);

    std::vector<JudgeVerdict> verdicts;
    verdicts.reserve(views.size());
    for (const auto& view : views) {
        JudgeVerdict v;
        v.constraint = c;
        v.view_index = view.view_index;

        const double vis = visible_fraction(view, sub_ord);
        if (view.solo_coverage[sub_ord - 1] == 0 || vis < params.min_visible) {
            v.score = 0.5;
            v.rationale = "uninformative: subject not visible (fraction " + fmt2(vis) + ")";
            verdicts.push_back(std::move(v));
            continue;
        }

        const Vec3 correction = constraint_correction(layout, views, c, params);
        const Vec3 corrected = anchor + correction;
        const auto pa = try_project(view.intrinsics, view.pose, anchor);
        const auto pq = try_project(view.intrinsics, view.pose, corrected);
        if (!pa || !pq) {
            v.score = 0.5;
            v.rationale = "uninformative: anchor behind camera";
            verdicts.push_back(std::move(v));
            continue;
        }

        const double gap_px = pixel_distance(*pa, *pq);
        double score = score_projected_gap(gap_px, params.epsilon_px, params.decay_px);

        // Depth-ordering check for `on`: where the two boxes' rectangles
        // overlap, the subject must win some pixels; a subject fully hidden
        // behind its support at the contact region is suspicious.
        if (c.predicate == Predicate::on && score > 0.5) {
            const auto ra = project_object(layout, c.subject, view.intrinsics, view.pose);
            const auto rb = project_object(layout, c.reference, view.intrinsics, view.pose);
            const int x0 = static_cast<int>(std::max(ra.u0, rb.u0));
            const int x1 = static_cast<int>(std::min(ra.u1, rb.u1));
            const int y0 = static_cast<int>(std::max(ra.v0, rb.v0));
            const int y1 = static_cast<int>(std::min(ra.v1, rb.v1));
            long sub_px = 0, both_px = 0;
            for (int y = y0; y < y1 && y < view.height(); ++y) {
                for (int x = x0; x < x1 && x < view.width(); ++x) {
                    const uint16_t id = view.instance_at(y, x);
                    if (id == sub_ord || id == ref_ord) {
                        ++both_px;
                        if (id == sub_ord) ++sub_px;
                    }
                }
            }
            if (both_px > 0 && sub_px == 0) {
                score = 0.5;
                v.rationale = "depth ordering inconsistent: subject never in front at the contact";
            }
        }

        if (v.rationale.empty())
            v.rationale = "projected correction " + fmt2(gap_px) + " px (visible " + fmt2(vis) + ")";
        v.score = score;
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

double aggregate_scores(const std::vector<JudgeVerdict>& verdicts) {
    if (verdicts.empty()) raise(errc::no_verdicts, "aggregate over zero verdicts");
    double sum = 0.0;
    for (const auto& v : verdicts) sum += v.score;
    return sum / static_cast<double>(verdicts.size());
}

std::vector<JudgeVerdict> GatewayJudge::judge(const SceneLayout& layout,
                                              const std::vector<RenderedView>& views,
                                              const SpatialConstraint& c) {
    // Measure once per view, ask the backend to score. Attachments carry the
    // instance mask so a live VLM can look at the view itself.
    std::vector<JudgeVerdict> verdicts;
    const ObjectInstance* subject = layout.find(c.subject);
    if (!subject) raise(errc::unknown_instance, c.subject);
    const int sub_ord = layout.ordinal_of(c.subject);

    for (const auto& view : views) {
        const double vis = visible_fraction(view, sub_ord);
        const Vec3 anchor = subject->transform.translation;
        const Vec3 corrected = anchor + constraint_correction(layout, views, c, params_);
        const auto pa = try_project(view.intrinsics, view.pose, anchor);
        const auto pq = try_project(view.intrinsics, view.pose, corrected);
        const double gap_px = (pa && pq) ? pixel_distance(*pa, *pq) : -1.0;

        StructuredRequest req;
        req.role = RoleTag::judge;
        req.expected_schema = SchemaId::judge_verdict;
        req.prompt = "Is this relation satisfied in the attached view: " + constraint_text(c) + "?";
        req.context = json{{"constraint", c.to_json()},
                           {"view_index", view.view_index},
                           {"gap_px", gap_px},
                           {"visible_fraction", vis},
                           {"epsilon_px", params_.epsilon_px},
                           {"decay_px", params_.decay_px}};

        // Mask thumbnail, one byte per pixel, long edge capped at 512 px.
        const int step = std::max(1, (std::max(view.width(), view.height()) + 511) / 512);
        const int tw = (view.width() + step - 1) / step;
        const int th = (view.height() + step - 1) / step;
        std::string mask;
        mask.reserve(static_cast<size_t>(tw) * th);
        for (int r = 0; r < view.height(); r += step)
            for (int cpx = 0; cpx < view.width(); cpx += step)
                mask.push_back(static_cast<char>(std::min<uint16_t>(view.instance_at(r, cpx), 255)));
        const std::string header =
            "P5\n" + std::to_string(tw) + " " + std::to_string(th) + "\n255\n";
        req.attachments.push_back({"image/x-portable-graymap", base64_encode(header + mask)});

        const json payload = gateway_.send(req);
        JudgeVerdict v;
        v.constraint = c;
        v.view_index = view.view_index;
        v.score = payload.at("score").get<double>();
        v.rationale = payload.at("rationale").get<std::string>();
        verdicts.push_back(std::move(v));
    }
    return verdicts;
}

} // namespace fyi
