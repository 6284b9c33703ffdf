#pragma once

// Per-view spatial-relation scoring. Each verdict is computed from one view's
// evidence only — a misplacement whose offset lies along that view's line of
// sight projects to (almost) nothing and scores high there. Catching such
// cases is exactly what averaging over several views is for.

#include <vector>

#include "fyi/gateway.hpp"
#include "fyi/layout.hpp"
#include "fyi/render.hpp"

namespace fyi {

struct JudgeVerdict {
    SpatialConstraint constraint;
    int view_index = 0;
    double score = 0.0; // in [0,1]
    std::string rationale;
};

struct JudgeParams {
    double epsilon_px = 2.0;       // projected gap below this is a perfect score
    double decay_px = 20.0;        // linear falloff length past epsilon
    double min_visible = 0.05;     // below this visible fraction a view is uninformative
    double near_default_m = 0.3;   // `near` distance when the constraint has no param
};

// 1.0 for gap <= epsilon, then linear to 0 over decay_px.
double score_projected_gap(double gap_px, double epsilon_px, double decay_px);

// Smallest world-space correction that would satisfy the constraint, applied
// to the subject's bottom-center; zero vector when already satisfied.
// Horizontal predicates use the axes of views[constraint.reference_view].
Vec3 constraint_correction(const SceneLayout& layout, const std::vector<RenderedView>& views,
                           const SpatialConstraint& constraint, const JudgeParams& params);

// One verdict per rendered view. Scores derive from the pixel distance
// between the subject anchor and its corrected position in that view, plus
// visibility and depth-ordering checks from the view's buffers.
std::vector<JudgeVerdict> geometric_judge(const SceneLayout& layout,
                                          const std::vector<RenderedView>& views,
                                          const SpatialConstraint& constraint,
                                          const JudgeParams& params = {});

// Arithmetic mean of the per-view scores for one constraint.
// Raises no_verdicts on an empty input.
double aggregate_scores(const std::vector<JudgeVerdict>& verdicts);

class JudgeHandle {
  public:
    virtual ~JudgeHandle() = default;
    virtual std::vector<JudgeVerdict> judge(const SceneLayout& layout,
                                            const std::vector<RenderedView>& views,
                                            const SpatialConstraint& constraint) = 0;
};

class GeometricJudge : public JudgeHandle {
  public:
    explicit GeometricJudge(JudgeParams params = {}) : params_(params) {}
    std::vector<JudgeVerdict> judge(const SceneLayout& layout, const std::vector<RenderedView>& views,
                                    const SpatialConstraint& constraint) override {
        return geometric_judge(layout, views, constraint, params_);
    }
    const JudgeParams& params() const { return params_; }

  private:
    JudgeParams params_;
};

// Judge backed by a gateway (one request per view, judge_verdict schema).
// The request carries the same measurements the geometric judge uses plus
// downscaled view attachments, so rule-based mocks and live VLMs are
// interchangeable behind this adapter.
class GatewayJudge : public JudgeHandle {
  public:
    GatewayJudge(GatewayHandle& gateway, JudgeParams params = {})
        : gateway_(gateway), params_(params) {}
    std::vector<JudgeVerdict> judge(const SceneLayout& layout, const std::vector<RenderedView>& views,
                                    const SpatialConstraint& constraint) override;

  private:
    GatewayHandle& gateway_;
    JudgeParams params_;
};

} // namespace fyi
