#pragma once

// Timed action plans and their realization as frame sequences: linear
// interpolation for positions, geodesic (slerp) interpolation for rotations,
// circular parameterization for camera orbits, plus the per-frame smoothness
// check and the refinement loop that stretches too-fast actions.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fyi/gateway.hpp"
#include "fyi/layout.hpp"

namespace fyi {

inline const std::string kCameraActor = "camera";

struct OrbitParams {
    Vec3 center;
    double radius = 1.0;
    double start_azimuth_deg = 0.0;
    double end_azimuth_deg = 90.0;
    double elevation_deg = 30.0;
};

enum class ActionKind { move_to, rotate_to, orbit_camera, dolly, hold };

const char* action_kind_name(ActionKind k);

struct Action {
    std::string actor; // instance id or "camera"
    ActionKind kind = ActionKind::hold;
    double start_s = 0.0, end_s = 1.0;
    // move_to carries Vec3, rotate_to carries Rotation, orbit_camera carries
    // OrbitParams, dolly carries a signed distance, hold carries nothing.
    std::variant<std::monostate, Vec3, Rotation, OrbitParams, double> target;

    json to_json() const;
    static Action from_json(const json& j);
};

struct ActionPlan {
    std::vector<Action> actions;
    double duration_s = 0.0;
    double fps = 24.0;

    json to_json() const;
    static ActionPlan from_json(const json& j);
    // Sorted, non-overlapping intervals per actor; duration covers the last
    // end; finite targets. Raises schema_error.
    void validate() const;
};

struct FrameState {
    double time_s = 0.0;
    std::map<std::string, Transform> actors; // object states
    CameraPose camera;
};

struct FrameSequence {
    std::vector<FrameState> frames;
    double fps = 24.0;
    int refinement_rounds = 0;
    bool converged = true;
};

struct SmoothnessBudget {
    double max_rot_deg_per_frame = 15.0;
    double max_trans_m_per_frame = 0.15;
};

struct Violation {
    int frame_index = 0; // index of the later frame of the offending pair
    std::string actor;
    enum class Kind { rotation, translation } kind = Kind::translation;
    double delta = 0.0; // degrees or meters
    double limit = 0.0;

    json to_json() const;
};

struct PlannerSceneContext {
    // Initial camera for sequences without camera actions, also the origin
    // state for camera actions.
    CameraPose initial_camera;
    Vec3 camera_aim; // camera move_to keeps aiming here
};

// round(duration * fps) frames at times i / fps. Object states start from
// the layout; the camera starts from context.initial_camera.
FrameSequence sample_frames(const ActionPlan& plan, const SceneLayout& layout,
                            const PlannerSceneContext& context);

// One violation per consecutive frame pair and actor whose geodesic rotation
// angle or translation norm exceeds the budget. Raises too_few_frames.
std::vector<Violation> check_temporal(const FrameSequence& seq, const SmoothnessBudget& budget);

struct RefineResult {
    FrameSequence sequence;
    ActionPlan plan; // the refined plan that produced `sequence`
    int rounds_used = 0;
};

struct RefineParams {
    SmoothnessBudget budget;
    int max_rounds = 3;
    int max_frames = 240;
    double headroom = 0.8; // stretched actions aim at headroom * budget per frame
    // Online path: violations go back to this planner backend for a revised
    // plan. Null selects the deterministic stretch policy.
    GatewayHandle* online = nullptr;
};

// Sample -> check -> stretch loop. Returns the first clean sequence, or the
// best (fewest violations) one with converged = false after max_rounds.
RefineResult refine_plan(const ActionPlan& plan, const SceneLayout& layout,
                         const PlannerSceneContext& context, const RefineParams& params);

// Instruction -> plan through the gateway's planner role (rule-table mock or
// live backend); actors are resolved against the layout.
ActionPlan plan_from_instruction(const std::string& instruction, const SceneLayout& layout,
                                 const PlannerSceneContext& context, GatewayHandle& gateway,
                                 double fps = 24.0);

} // namespace fyi
