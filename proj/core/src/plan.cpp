#include "fyi/plan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fyi {

const char* action_kind_name(ActionKind k) {
    switch (k) {
    case ActionKind::move_to: return "move_to";
    case ActionKind::rotate_to: return "rotate_to";
    case ActionKind::orbit_camera: return "orbit_camera";
    case ActionKind::dolly: return "dolly";
    case ActionKind::hold: return "hold";
    }
    return "hold";
}

static std::optional<ActionKind> action_kind_from(const std::string& s) {
    static const std::pair<const char*, ActionKind> table[] = {
        {"move_to", ActionKind::move_to},     {"rotate_to", ActionKind::rotate_to},
        {"orbit_camera", ActionKind::orbit_camera}, {"dolly", ActionKind::dolly},
        {"hold", ActionKind::hold},
    };
    for (const auto& [n, k] : table)
        if (s == n) return k;
    return std::nullopt;
}

json Action::to_json() const {
    json j{{"actor", actor}, {"kind", action_kind_name(kind)}, {"start_s", start_s}, {"end_s", end_s}};
    switch (kind) {
    case ActionKind::move_to: {
        const Vec3& t = std::get<Vec3>(target);
        j["target"] = json::array({t.x, t.y, t.z});
        break;
    }
    case ActionKind::rotate_to: {
        const Rotation& r = std::get<Rotation>(target);
        j["target_quat"] = json::array({r.w, r.x, r.y, r.z});
        break;
    }
    case ActionKind::orbit_camera: {
        const OrbitParams& o = std::get<OrbitParams>(target);
        j["orbit"] = json{{"center", json::array({o.center.x, o.center.y, o.center.z})},
                          {"radius", o.radius},
                          {"start_azimuth_deg", o.start_azimuth_deg},
                          {"end_azimuth_deg", o.end_azimuth_deg},
                          {"elevation_deg", o.elevation_deg}};
        break;
    }
    case ActionKind::dolly: j["distance"] = std::get<double>(target); break;
    case ActionKind::hold: break;
    }
    return j;
}

Action Action::from_json(const json& j) {
    Action a;
    a.actor = j.at("actor").get<std::string>();
    const auto kind = action_kind_from(j.at("kind").get<std::string>());
    if (!kind) raise(errc::schema_error, "unknown action kind '" + j.at("kind").get<std::string>() + "'");
    a.kind = *kind;
    a.start_s = j.at("start_s").get<double>();
    a.end_s = j.at("end_s").get<double>();
    switch (a.kind) {
    case ActionKind::move_to: {
        const auto& t = j.at("target");
        a.target = Vec3{t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
        break;
    }
    case ActionKind::rotate_to: {
        const auto& q = j.at("target_quat");
        a.target = Rotation(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                            q.at(3).get<double>());
        break;
    }
    case ActionKind::orbit_camera: {
        const auto& o = j.at("orbit");
        OrbitParams p;
        const auto& c = o.at("center");
        p.center = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
        p.radius = o.at("radius").get<double>();
        p.start_azimuth_deg = o.at("start_azimuth_deg").get<double>();
        p.end_azimuth_deg = o.at("end_azimuth_deg").get<double>();
        p.elevation_deg = o.at("elevation_deg").get<double>();
        a.target = p;
        break;
    }
    case ActionKind::dolly: a.target = j.at("distance").get<double>(); break;
    case ActionKind::hold: a.target = std::monostate{}; break;
    }
    return a;
}

json ActionPlan::to_json() const {
    json actions_j = json::array();
    for (const auto& a : actions) actions_j.push_back(a.to_json());
    return json{{"actions", std::move(actions_j)}, {"duration_s", duration_s}, {"fps", fps}};
}

ActionPlan ActionPlan::from_json(const json& j) {
    ActionPlan p;
    for (const auto& a : j.at("actions")) p.actions.push_back(Action::from_json(a));
    p.duration_s = j.at("duration_s").get<double>();
    p.fps = j.at("fps").get<double>();
    return p;
}

void ActionPlan::validate() const {
    if (!(fps > 0.0)) raise(errc::schema_error, "fps must be positive");
    std::map<std::string, std::vector<const Action*>> per_actor;
    for (const auto& a : actions) {
        if (!(a.end_s > a.start_s) || a.start_s < 0.0)
            raise(errc::schema_error, "action interval must satisfy 0 <= start < end");
        if (a.kind == ActionKind::orbit_camera || a.kind == ActionKind::dolly) {
            if (a.actor != kCameraActor)
                raise(errc::schema_error, std::string(action_kind_name(a.kind)) + " only moves the camera");
        }
        if (a.kind == ActionKind::move_to && !std::get<Vec3>(a.target).finite())
            raise(errc::schema_error, "move_to target must be finite");
        if (a.kind == ActionKind::orbit_camera && !(std::get<OrbitParams>(a.target).radius > 0.0))
            raise(errc::schema_error, "orbit radius must be positive");
        if (a.end_s > duration_s + 1e-9) raise(errc::schema_error, "duration_s must cover every action");
        per_actor[a.actor].push_back(&a);
    }
    for (auto& [actor, list] : per_actor) {
        std::vector<const Action*> sorted = list;
        std::sort(sorted.begin(), sorted.end(),
                  [](const Action* a, const Action* b) { return a->start_s < b->start_s; });
        for (size_t i = 1; i < sorted.size(); ++i)
            if (sorted[i]->start_s < sorted[i - 1]->end_s - 1e-9)
                raise(errc::schema_error, "overlapping actions for actor '" + actor + "'");
    }
}

// --- sampling ----------------------------------------------------------------

namespace {

Vec3 orbit_eye(const OrbitParams& o, double azimuth_deg) {
    const double az = deg_to_rad(azimuth_deg);
    const double el = deg_to_rad(o.elevation_deg);
    return o.center + Vec3{o.radius * std::cos(az) * std::cos(el),
                           o.radius * std::sin(az) * std::cos(el), o.radius * std::sin(el)};
}

struct CameraTimeline {
    struct Entry {
        const Action* action;
        CameraPose start; // camera state when the action begins
    };
    CameraPose initial;
    Vec3 aim;
    std::vector<Entry> entries;

    CameraPose end_state(const Entry& e) const { return eval_action(e, 1.0); }

    CameraPose eval_action(const Entry& e, double u) const {
        const Action& a = *e.action;
        switch (a.kind) {
        case ActionKind::move_to: {
            const Vec3 c0 = e.start.center();
            const Vec3 c1 = std::get<Vec3>(a.target);
            return CameraPose::look_at(c0 + (c1 - c0) * u, aim);
        }
        case ActionKind::rotate_to: {
            const Vec3 c = e.start.center();
            const Rotation r = slerp(e.start.rotation, std::get<Rotation>(a.target), u);
            return CameraPose{r, r.rotate(-c)};
        }
        case ActionKind::orbit_camera: {
            const OrbitParams& o = std::get<OrbitParams>(a.target);
            const double az = o.start_azimuth_deg + (o.end_azimuth_deg - o.start_azimuth_deg) * u;
            return CameraPose::look_at(orbit_eye(o, az), o.center);
        }
        case ActionKind::dolly: {
            const Vec3 c0 = e.start.center();
            Vec3 dir = aim - c0;
            if (norm(dir) < 1e-9) dir = e.start.forward();
            dir = normalized(dir);
            return CameraPose::look_at(c0 + dir * (std::get<double>(a.target) * u), aim);
        }
        case ActionKind::hold: return e.start;
        }
        return e.start;
    }

    CameraPose at(double t) const {
        CameraPose state = initial;
        for (const auto& e : entries) {
            if (t < e.action->start_s) return state;
            if (t <= e.action->end_s) {
                const double u = (t - e.action->start_s) / (e.action->end_s - e.action->start_s);
                return eval_action(e, u);
            }
            state = end_state(e);
        }
        return state;
    }
};

struct ObjectTimeline {
    struct Entry {
        const Action* action;
        Transform start;
    };
    Transform initial;
    std::vector<Entry> entries;

    Transform eval_action(const Entry& e, double u) const {
        Transform out = e.start;
        switch (e.action->kind) {
        case ActionKind::move_to: {
            const Vec3& t1 = std::get<Vec3>(e.action->target);
            out.translation = e.start.translation + (t1 - e.start.translation) * u;
            break;
        }
        case ActionKind::rotate_to:
            out.rotation = slerp(e.start.rotation, std::get<Rotation>(e.action->target), u);
            break;
        default: break; // hold
        }
        return out;
    }

    Transform at(double t) const {
        Transform state = initial;
        for (const auto& e : entries) {
            if (t < e.action->start_s) return state;
            if (t <= e.action->end_s) {
                const double u = (t - e.action->start_s) / (e.action->end_s - e.action->start_s);
                return eval_action(e, u);
            }
            state = eval_action(e, 1.0);
        }
        return state;
    }
};

} // namespace

FrameSequence sample_frames(const ActionPlan& plan, const SceneLayout& layout,
                            const PlannerSceneContext& context) {
    plan.validate();

    CameraTimeline camera;
    camera.initial = context.initial_camera;
    camera.aim = context.camera_aim;
    std::map<std::string, ObjectTimeline> objects;
    for (const auto& inst : layout.instances) objects[inst.instance_id].initial = inst.transform;

    // Chain start states through each actor's sorted actions.
    std::vector<const Action*> sorted;
    for (const auto& a : plan.actions) sorted.push_back(&a);
    std::sort(sorted.begin(), sorted.end(),
              [](const Action* a, const Action* b) { return a->start_s < b->start_s; });
    for (const Action* a : sorted) {
        if (a->actor == kCameraActor) {
            CameraPose state = camera.initial;
            if (!camera.entries.empty()) state = camera.end_state(camera.entries.back());
            camera.entries.push_back({a, state});
        } else {
            auto it = objects.find(a->actor);
            if (it == objects.end()) raise(errc::unknown_actor, a->actor);
            auto& tl = it->second;
            Transform state = tl.initial;
            if (!tl.entries.empty()) state = tl.eval_action(tl.entries.back(), 1.0);
            tl.entries.push_back({a, state});
        }
    }

    FrameSequence seq;
    seq.fps = plan.fps;
    const int n_frames = std::max(1, static_cast<int>(std::lround(plan.duration_s * plan.fps)));
    seq.frames.reserve(n_frames);
    for (int i = 0; i < n_frames; ++i) {
        FrameState f;
        f.time_s = i / plan.fps;
        for (const auto& [id, tl] : objects) f.actors[id] = tl.at(f.time_s);
        f.camera = camera.at(f.time_s);
        seq.frames.push_back(std::move(f));
    }
    return seq;
}

std::vector<Violation> check_temporal(const FrameSequence& seq, const SmoothnessBudget& budget) {
    if (seq.frames.size() < 2) raise(errc::too_few_frames, "need at least two frames");
    std::vector<std::string> actors;
    for (const auto& [id, _] : seq.frames.front().actors) actors.push_back(id);
    actors.push_back(kCameraActor);
    std::sort(actors.begin(), actors.end());

    std::vector<Violation> out;
    for (size_t i = 1; i < seq.frames.size(); ++i) {
        const FrameState& prev = seq.frames[i - 1];
        const FrameState& cur = seq.frames[i];
        for (const auto& actor : actors) {
            double rot_deg, trans;
            if (actor == kCameraActor) {
                rot_deg = rad_to_deg(geodesic_angle(prev.camera.rotation, cur.camera.rotation));
                trans = norm(cur.camera.center() - prev.camera.center());
            } else {
                const Transform& a = prev.actors.at(actor);
                const Transform& b = cur.actors.at(actor);
                rot_deg = rad_to_deg(geodesic_angle(a.rotation, b.rotation));
                trans = norm(b.translation - a.translation);
            }
            if (rot_deg > budget.max_rot_deg_per_frame)
                out.push_back({static_cast<int>(i), actor, Violation::Kind::rotation, rot_deg,
                               budget.max_rot_deg_per_frame});
            if (trans > budget.max_trans_m_per_frame)
                out.push_back({static_cast<int>(i), actor, Violation::Kind::translation, trans,
                               budget.max_trans_m_per_frame});
        }
    }
    return out;
}

json Violation::to_json() const {
    return json{{"frame", frame_index},
                {"actor", actor},
                {"kind", kind == Kind::rotation ? "rotation" : "translation"},
                {"delta", delta},
                {"limit", limit}};
}

// --- refinement ---------------------------------------------------------------

namespace {

// Total state change an action produces, for the stretch arithmetic.
// Conservative upper bounds: orbit uses arc length and azimuth sweep.
void action_totals(const ActionPlan& plan, const SceneLayout& layout,
                   const PlannerSceneContext& context, const Action& target_action,
                   double& trans_total, double& rot_deg_total) {
    trans_total = 0.0;
    rot_deg_total = 0.0;
    switch (target_action.kind) {
    case ActionKind::orbit_camera: {
        const OrbitParams& o = std::get<OrbitParams>(target_action.target);
        const double sweep = std::abs(deg_to_rad(o.end_azimuth_deg - o.start_azimuth_deg));
        trans_total = o.radius * sweep;
        rot_deg_total = rad_to_deg(sweep);
        return;
    }
    case ActionKind::dolly: trans_total = std::abs(std::get<double>(target_action.target)); return;
    case ActionKind::hold: return;
    default: break;
    }

    // move_to / rotate_to need the actor's state at the action start.
    Transform obj_state;
    CameraPose cam_state = context.initial_camera;
    bool is_camera = target_action.actor == kCameraActor;
    if (!is_camera) {
        const ObjectInstance* inst = layout.find(target_action.actor);
        if (!inst) raise(errc::unknown_actor, target_action.actor);
        obj_state = inst->transform;
    }
    std::vector<const Action*> prior;
    for (const auto& a : plan.actions)
        if (a.actor == target_action.actor && a.end_s <= target_action.start_s + 1e-9) prior.push_back(&a);
    std::sort(prior.begin(), prior.end(),
              [](const Action* a, const Action* b) { return a->start_s < b->start_s; });
    for (const Action* a : prior) {
        switch (a->kind) {
        case ActionKind::move_to:
            if (is_camera) cam_state = CameraPose::look_at(std::get<Vec3>(a->target), context.camera_aim);
            else obj_state.translation = std::get<Vec3>(a->target);
            break;
        case ActionKind::rotate_to:
            if (is_camera) {
                const Vec3 c = cam_state.center();
                const Rotation r = std::get<Rotation>(a->target);
                cam_state = CameraPose{r, r.rotate(-c)};
            } else {
                obj_state.rotation = std::get<Rotation>(a->target);
            }
            break;
        case ActionKind::orbit_camera: {
            const OrbitParams& o = std::get<OrbitParams>(a->target);
            cam_state = CameraPose::look_at(orbit_eye(o, o.end_azimuth_deg), o.center);
            break;
        }
        case ActionKind::dolly: {
            const Vec3 c0 = cam_state.center();
            Vec3 dir = context.camera_aim - c0;
            if (norm(dir) > 1e-9) dir = normalized(dir);
            cam_state = CameraPose::look_at(c0 + dir * std::get<double>(a->target), context.camera_aim);
            break;
        }
        case ActionKind::hold: break;
        }
    }

    if (target_action.kind == ActionKind::move_to) {
        const Vec3 from = is_camera ? cam_state.center() : obj_state.translation;
        trans_total = norm(std::get<Vec3>(target_action.target) - from);
        if (is_camera) {
            // Re-aiming while moving also rotates the camera.
            const CameraPose end = CameraPose::look_at(std::get<Vec3>(target_action.target), context.camera_aim);
            rot_deg_total = rad_to_deg(geodesic_angle(cam_state.rotation, end.rotation));
        }
    } else if (target_action.kind == ActionKind::rotate_to) {
        const Rotation from = is_camera ? cam_state.rotation : obj_state.rotation;
        rot_deg_total = rad_to_deg(geodesic_angle(from, std::get<Rotation>(target_action.target)));
    }
}

// Stretch every listed action so its per-frame delta lands at
// headroom * budget, shifting later actions of the same actor.
ActionPlan stretch_actions(const ActionPlan& plan, const SceneLayout& layout,
                           const PlannerSceneContext& context, const std::vector<size_t>& indices,
                           const SmoothnessBudget& budget, double headroom) {
    ActionPlan out = plan;
    for (const size_t idx : indices) {
        Action& act = out.actions[idx];
        double trans_total, rot_deg_total;
        action_totals(out, layout, context, act, trans_total, rot_deg_total);
        const double needed = std::max(trans_total / (headroom * budget.max_trans_m_per_frame),
                                       rot_deg_total / (headroom * budget.max_rot_deg_per_frame));
        const double needed_frames = std::ceil(needed);
        const double new_dur = needed_frames / out.fps;
        const double old_dur = act.end_s - act.start_s;
        if (new_dur <= old_dur + 1e-12) continue;
        const double shift = new_dur - old_dur;
        const double pivot_end = act.end_s;
        act.end_s = act.start_s + new_dur;
        for (auto& other : out.actions) {
            if (&other == &act || other.actor != act.actor) continue;
            if (other.start_s >= pivot_end - 1e-9) {
                other.start_s += shift;
                other.end_s += shift;
            }
        }
    }
    double duration = 0.0;
    for (const auto& a : out.actions) duration = std::max(duration, a.end_s);
    out.duration_s = duration;
    return out;
}

} // namespace

RefineResult refine_plan(const ActionPlan& plan, const SceneLayout& layout,
                         const PlannerSceneContext& context, const RefineParams& params) {
    if (params.max_rounds < 1) raise(errc::config_error, "max_rounds must be >= 1");

    ActionPlan current = plan;
    RefineResult best;
    size_t best_violations = std::numeric_limits<size_t>::max();

    for (int round = 0; round <= params.max_rounds; ++round) {
        FrameSequence seq = sample_frames(current, layout, context);
        seq.refinement_rounds = round;
        const auto violations =
            seq.frames.size() < 2 ? std::vector<Violation>{} : check_temporal(seq, params.budget);

        if (violations.size() < best_violations) {
            best_violations = violations.size();
            best.sequence = seq;
            best.plan = current;
            best.rounds_used = round;
        }
        if (violations.empty()) {
            best.sequence.converged = true;
            return best;
        }
        if (round == params.max_rounds) break;

        if (params.online) {
            // Forward the violations; the backend returns a revised plan.
            StructuredRequest req;
            req.role = RoleTag::planner;
            req.expected_schema = SchemaId::action_plan;
            req.prompt = "The sampled frames violate the smoothness budget. Refine the plan: "
                         "stretch or subdivide the offending actions.";
            json viols = json::array();
            for (const auto& v : violations) viols.push_back(v.to_json());
            req.context = json{{"refine",
                                json{{"plan", current.to_json()},
                                     {"violations", std::move(viols)},
                                     {"max_rot_deg_per_frame", params.budget.max_rot_deg_per_frame},
                                     {"max_trans_m_per_frame", params.budget.max_trans_m_per_frame},
                                     {"headroom", params.headroom}}}};
            current = ActionPlan::from_json(params.online->send(req));
        } else {
            // Deterministic policy: stretch each action that covers a
            // violating frame pair.
            std::vector<size_t> offending;
            for (const auto& v : violations) {
                const double t1 = v.frame_index / current.fps;
                const double t0 = (v.frame_index - 1) / current.fps;
                for (size_t i = 0; i < current.actions.size(); ++i) {
                    const Action& a = current.actions[i];
                    if (a.actor != v.actor) continue;
                    if (a.start_s < t1 + 1e-9 && a.end_s > t0 - 1e-9) {
                        if (std::find(offending.begin(), offending.end(), i) == offending.end())
                            offending.push_back(i);
                    }
                }
            }
            if (offending.empty()) break; // violations we cannot attribute; give up
            std::sort(offending.begin(), offending.end());
            ActionPlan stretched = stretch_actions(current, layout, context, offending,
                                                   params.budget, params.headroom);
            // The sequence length cap: refusing to grow past it beats
            // emitting a plan whose tail would be cut off mid-action.
            if (stretched.duration_s * stretched.fps > params.max_frames) break;
            current = std::move(stretched);
        }
    }

    best.sequence.converged = false;
    return best;
}

// --- instruction -> plan -------------------------------------------------------

ActionPlan plan_from_instruction(const std::string& instruction, const SceneLayout& layout,
                                 const PlannerSceneContext& context, GatewayHandle& gateway,
                                 double fps) {
    json instances = json::array();
    for (const auto& inst : layout.instances) {
        instances.push_back(json{{"id", inst.instance_id},
                                 {"description", inst.description},
                                 {"position",
                                  json::array({inst.transform.translation.x, inst.transform.translation.y,
                                               inst.transform.translation.z})},
                                 {"yaw_rad", inst.transform.rotation.yaw_angle()}});
    }
    const Vec3 eye = context.initial_camera.center();
    const Vec3 d = eye - context.camera_aim;
    StructuredRequest req;
    req.role = RoleTag::planner;
    req.expected_schema = SchemaId::action_plan;
    req.prompt = "Turn this instruction into a timed action plan over the scene: " + instruction;
    req.context = json{{"instruction", instruction},
                       {"fps", fps},
                       {"instances", std::move(instances)},
                       {"camera", json{{"eye", json::array({eye.x, eye.y, eye.z})},
                                       {"aim", json::array({context.camera_aim.x, context.camera_aim.y,
                                                            context.camera_aim.z})},
                                       {"radius", std::hypot(d.x, d.y)},
                                       {"elevation_deg", rad_to_deg(std::atan2(d.z, std::hypot(d.x, d.y)))},
                                       {"azimuth_deg", rad_to_deg(std::atan2(d.y, d.x))}}}};

    const json payload = gateway.send(req);
    ActionPlan plan = ActionPlan::from_json(payload);
    plan.validate();
    for (const auto& a : plan.actions)
        if (a.actor != kCameraActor && !layout.find(a.actor)) raise(errc::unknown_actor, a.actor);
    return plan;
}

} // namespace fyi
