#include <algorithm>
#include <cmath>
#include <map>
#include <regex>

#include "fyi/assets.hpp"
#include "fyi/gateway.hpp"
#include "fyi/judge.hpp"
#include "fyi/plan.hpp"

// Rule-based stand-ins for the four backend roles, speaking the exact wire
// format of a chat-completions server so the full extraction and validation
// path runs offline. Every table below is deterministic; the seed only keys
// choices that would otherwise be arbitrary.
//
// Collector grammar:
//   * nouns come from a fixed lexicon (plural and alias forms folded to a
//     canonical query), counts from number words/digits, bare plurals = 2;
//   * relation markers bind the nearest mention before them to the nearest
//     mention after them: "left of" -> left_of, "right of" -> right_of,
//     "in front of" -> in_front_of, "behind" -> behind, "near"/"beside"/
//     "next to" -> near(0.3 m), "above"/"over" -> above, "inside"/"into" ->
//     inside, "on"/"onto"/"upon" -> on;
//   * the reference of an `on` marker is a surface; every object mentioned
//     before that marker without its own `on` rests on it too ("a mug left
//     of a laptop on a desk" puts both the mug and the laptop on the desk);
//   * "at (x, y, z)" after a mention pins that object's position verbatim.
//
// Planner grammar (stateful, left to right; every action chains at the
// previous action's end):
//   * "turns left"/"turns right" -> rotate_to +-90 deg yaw over 1 s,
//     "turns around" -> 180 deg over 2 s;
//   * "moves/flies/drives forward|backward [N meters]" -> move_to along the
//     actor's current heading, default 2 m, at 1 m/s;
//   * "rises|ascends [N meters]" / "descends|lowers [N meters]" -> vertical
//     move_to, default 1 m, at 1 m/s;
//   * "holds still for N seconds" -> hold;
//   * "orbit [by N degrees]" -> orbit_camera from the current camera azimuth,
//     default 90 deg, at 45 deg/s (min 1 s);
//   * "dolly in|out [N meters]" -> camera dolly, default 0.5 m over 1 s;
//   * no motion phrase at all -> a 90 deg orbit over 2 s.
//
// Judge: scores the projected-gap measurement in the request context with
// the same curve the in-process geometric judge uses.
//
// Locator: echoes the engine-suggested position back as the proposal.

namespace fyi {

namespace {

// --- shared helpers ---------------------------------------------------------

json chat_response(const json& payload) {
    const std::string content =
        "Here is the structured output:\n```json\n" + canonical_dump(payload) + "\n```";
    return json{{"object", "chat.completion"},
                {"choices", json::array({json{{"index", 0},
                                              {"finish_reason", "stop"},
                                              {"message", json{{"role", "assistant"},
                                                               {"content", content}}}}})}};
}

// Pull the fenced context block back out of the rendered user message.
json context_of(const std::string& body_text) {
    const json body = json::parse(body_text, nullptr, false);
    if (body.is_discarded()) raise(errc::transport_error, "mock received non-JSON body");
    std::string user_text;
    for (const auto& m : body.value("messages", json::array())) {
        if (m.value("role", "") != "user") continue;
        const auto& content = m.at("content");
        if (content.is_string()) {
            user_text = content.get<std::string>();
        } else if (content.is_array()) {
            for (const auto& part : content)
                if (part.value("type", "") == "text") user_text += part.value("text", "");
        }
    }
    const size_t fence = user_text.rfind("```json");
    if (fence == std::string::npos) raise(errc::transport_error, "mock body has no context block");
    const auto ctx = extract_first_json_object(user_text.substr(fence));
    if (!ctx) raise(errc::transport_error, "mock context block is not valid JSON");
    return *ctx;
}

std::optional<double> number_token(const std::string& tok) {
    static const std::map<std::string, double> words{
        {"one", 1}, {"two", 2}, {"three", 3}, {"four", 4}, {"five", 5},
        {"six", 6}, {"seven", 7}, {"eight", 8}, {"nine", 9}, {"ten", 10}};
    const auto it = words.find(tok);
    if (it != words.end()) return it->second;
    if (!tok.empty() && std::all_of(tok.begin(), tok.end(), [](char c) { return c >= '0' && c <= '9'; }))
        return std::stod(tok);
    return std::nullopt;
}

// --- collector ---------------------------------------------------------------

// token -> canonical query (covers plurals and aliases). `piano` and
// `bicycle` are deliberately absent from the demo manifest so the
// unresolvable-asset path stays reachable.
const std::map<std::string, std::string>& noun_lexicon() {
    static const std::map<std::string, std::string> lex = [] {
        std::map<std::string, std::string> m;
        const auto add = [&m](const std::string& canon, std::initializer_list<const char*> forms) {
            m[canon] = canon;
            for (const char* f : forms) m[f] = canon;
        };
        add("cup", {"cups"});
        add("mug", {"mugs"});
        add("table", {"tables"});
        add("desk", {"desks"});
        add("laptop", {"laptops"});
        add("airplane", {"airplanes", "plane", "planes", "aeroplane"});
        add("sofa", {"sofas", "couch", "couches"});
        add("chair", {"chairs"});
        add("plate", {"plates"});
        add("book", {"books"});
        add("monitor", {"monitors", "screen"});
        add("keyboard", {"keyboards"});
        add("lamp", {"lamps"});
        add("vase", {"vases"});
        add("bottle", {"bottles"});
        add("bowl", {"bowls"});
        add("phone", {"phones", "smartphone"});
        add("plant", {"plants"});
        add("shelf", {"shelves", "bookshelf"});
        add("rug", {"rugs", "carpet"});
        add("television", {"tv", "televisions"});
        add("box", {"boxes", "crate"});
        add("piano", {"pianos"});
        add("bicycle", {"bicycles", "bike"});
        return m;
    }();
    return lex;
}

struct Mention {
    std::string noun;
    int count = 1;
    size_t token_pos = 0;
    std::vector<std::string> labels;
};

json collector_payload(const json& ctx) {
    const std::string instruction = ctx.value("instruction", "");
    const auto tokens = tokenize_lower(instruction);

    std::vector<Mention> mentions;
    std::map<std::string, int> noun_counter;
    int pending_count = 0;
    for (size_t i = 0; i < tokens.size(); ++i) {
        if (const auto n = number_token(tokens[i]); n && *n >= 1 && *n <= 10) {
            pending_count = static_cast<int>(*n);
            continue;
        }
        const auto it = noun_lexicon().find(tokens[i]);
        if (it == noun_lexicon().end()) continue;
        Mention m;
        m.noun = it->second;
        const bool plural = tokens[i] != it->second; // a non-canonical form is a plural/alias
        m.count = pending_count > 0 ? pending_count : (plural && tokens[i].back() == 's' ? 2 : 1);
        m.token_pos = i;
        for (int k = 0; k < m.count; ++k)
            m.labels.push_back(m.noun + "_" + std::to_string(++noun_counter[m.noun]));
        mentions.push_back(std::move(m));
        pending_count = 0;
    }

    struct Marker {
        Predicate predicate;
        size_t token_pos;
    };
    std::vector<Marker> markers;
    for (size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        const auto next = [&](size_t k) { return i + k < tokens.size() ? tokens[i + k] : std::string(); };
        if (t == "left" && next(1) == "of") markers.push_back({Predicate::left_of, i});
        else if (t == "right" && next(1) == "of") markers.push_back({Predicate::right_of, i});
        else if (t == "in" && next(1) == "front" && next(2) == "of")
            markers.push_back({Predicate::in_front_of, i});
        else if (t == "behind") markers.push_back({Predicate::behind, i});
        else if (t == "near" || t == "beside") markers.push_back({Predicate::near, i});
        else if (t == "next" && next(1) == "to") markers.push_back({Predicate::near, i});
        else if (t == "above" || t == "over") markers.push_back({Predicate::above, i});
        else if (t == "inside" || t == "into") markers.push_back({Predicate::inside, i});
        else if (t == "on" || t == "onto" || t == "upon") markers.push_back({Predicate::on, i});
    }

    json constraints = json::array();
    std::vector<std::string> surfaces; // labels, in marker order
    std::vector<size_t> surface_marker_pos;
    std::map<std::string, bool> has_on;
    for (const auto& mk : markers) {
        const Mention* before = nullptr;
        const Mention* after = nullptr;
        for (const auto& m : mentions) {
            if (m.token_pos < mk.token_pos) before = &m;
            if (m.token_pos > mk.token_pos && !after) after = &m;
        }
        if (!before || !after) continue;
        const std::string& ref = after->labels.front();
        for (const auto& sub : before->labels) {
            json c{{"predicate", predicate_name(mk.predicate)}, {"subject", sub}, {"reference", ref}};
            if (mk.predicate == Predicate::near) c["param"] = 0.3;
            constraints.push_back(std::move(c));
            if (mk.predicate == Predicate::on) has_on[sub] = true;
        }
        if (mk.predicate == Predicate::on) {
            surfaces.push_back(ref);
            surface_marker_pos.push_back(mk.token_pos);
        }
    }

    // Distribute the surface to earlier objects that did not get their own
    // `on` lexically ("a mug left of a laptop on a desk").
    if (!surfaces.empty()) {
        const std::string& surface = surfaces.front();
        const size_t marker_pos = surface_marker_pos.front();
        for (const auto& m : mentions) {
            if (m.token_pos >= marker_pos) continue;
            for (const auto& label : m.labels) {
                if (label == surface || has_on[label]) continue;
                constraints.push_back(
                    json{{"predicate", "on"}, {"subject", label}, {"reference", surface}});
                has_on[label] = true;
            }
        }
    }

    json assets = json::array();
    for (const auto& m : mentions)
        for (const auto& label : m.labels) assets.push_back(json{{"label", label}, {"query", m.noun}});

    // Verbatim positions: "<noun> at (x, y, z)".
    json placements = json::array();
    std::string lower = instruction;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    static const std::regex at_re(
        R"(at\s*\(\s*(-?[0-9]*\.?[0-9]+)\s*,\s*(-?[0-9]*\.?[0-9]+)\s*,\s*(-?[0-9]*\.?[0-9]+)\s*\))");
    for (auto it = std::sregex_iterator(lower.begin(), lower.end(), at_re);
         it != std::sregex_iterator(); ++it) {
        const size_t at_pos = static_cast<size_t>(it->position(0));
        const Mention* owner = nullptr;
        size_t best = 0;
        for (const auto& m : mentions) {
            const size_t found = lower.rfind(m.noun, at_pos);
            if (found != std::string::npos && (!owner || found >= best)) {
                owner = &m;
                best = found;
            }
        }
        if (!owner) continue;
        placements.push_back(json{{"label", owner->labels.front()},
                                  {"target", json::array({std::stod((*it)[1]), std::stod((*it)[2]),
                                                          std::stod((*it)[3])})}});
    }

    return json{{"sub_scenes", json::array({json{{"description", instruction},
                                                 {"assets", std::move(assets)},
                                                 {"constraints", std::move(constraints)},
                                                 {"placements", std::move(placements)}}})}};
}

// --- planner -----------------------------------------------------------------

json planner_payload(const json& ctx) {
    const std::string instruction = ctx.value("instruction", "");
    const double fps = ctx.value("fps", 24.0);
    const auto tokens = tokenize_lower(instruction);

    // Pick the acting object: first instance whose id stem appears as a noun.
    std::string actor;
    Vec3 actor_pos{};
    double actor_yaw = 0.0;
    for (const auto& inst : ctx.value("instances", json::array())) {
        const std::string id = inst.value("id", "");
        const std::string stem = id.substr(0, id.find('_'));
        for (const auto& t : tokens) {
            const auto it = noun_lexicon().find(t);
            if (it != noun_lexicon().end() && it->second == stem) {
                actor = id;
                const auto& p = inst.at("position");
                actor_pos = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
                actor_yaw = inst.value("yaw_rad", 0.0);
                break;
            }
        }
        if (!actor.empty()) break;
    }

    const json cam = ctx.value("camera", json::object());
    const auto cam_vec = [&](const char* key) {
        const auto& a = cam.value(key, json::array({0.0, 0.0, 0.0}));
        return Vec3{a[0].get<double>(), a[1].get<double>(), a[2].get<double>()};
    };
    OrbitParams orbit;
    orbit.center = cam_vec("aim");
    orbit.radius = std::max(cam.value("radius", 2.0), 1e-6);
    orbit.elevation_deg = cam.value("elevation_deg", 30.0);
    orbit.start_azimuth_deg = cam.value("azimuth_deg", 0.0);

    json actions = json::array();
    double clock = 0.0;
    const auto emit = [&](json a, double duration) {
        a["start_s"] = clock;
        a["end_s"] = clock + duration;
        clock += duration;
        actions.push_back(std::move(a));
    };
    const auto number_after = [&](size_t i) -> std::optional<double> {
        for (size_t k = i + 1; k < std::min(tokens.size(), i + 3); ++k)
            if (const auto n = number_token(tokens[k])) return n;
        return std::nullopt;
    };

    for (size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        const auto next = [&](size_t k) { return i + k < tokens.size() ? tokens[i + k] : std::string(); };

        if ((t == "turns" || t == "turn" || t == "turning") && !actor.empty()) {
            double delta = 0.0, dur = 1.0;
            if (next(1) == "left") delta = kPi / 2.0;
            else if (next(1) == "right") delta = -kPi / 2.0;
            else if (next(1) == "around") {
                delta = kPi;
                dur = 2.0;
            } else continue;
            actor_yaw += delta;
            const Rotation target = Rotation::yaw(actor_yaw);
            emit(json{{"actor", actor},
                      {"kind", "rotate_to"},
                      {"target_quat", json::array({target.w, target.x, target.y, target.z})}},
                 dur);
        } else if ((t == "moves" || t == "move" || t == "flies" || t == "fly" || t == "drives" ||
                    t == "rises" || t == "ascends" || t == "descends" || t == "lowers") &&
                   !actor.empty()) {
            Vec3 dir{std::cos(actor_yaw), std::sin(actor_yaw), 0.0};
            double dist = 2.0;
            if (t == "rises" || t == "ascends") {
                dir = {0.0, 0.0, 1.0};
                dist = 1.0;
            } else if (t == "descends" || t == "lowers") {
                dir = {0.0, 0.0, -1.0};
                dist = 1.0;
            } else if (next(1) == "backward" || next(1) == "backwards" || next(1) == "back") {
                dir = dir * -1.0;
            } else if (next(1) != "forward" && next(1) != "forwards" && next(1) != "ahead") {
                continue; // a move verb needs a direction
            }
            if (const auto n = number_after(i + (dir.z == 0.0 ? 1 : 0))) dist = *n;
            actor_pos += dir * dist;
            emit(json{{"actor", actor},
                      {"kind", "move_to"},
                      {"target", json::array({actor_pos.x, actor_pos.y, actor_pos.z})}},
                 std::max(dist / 1.0, 1e-3));
        } else if (t == "holds" || t == "hold") {
            double secs = 1.0;
            if (const auto n = number_after(i + 1)) secs = *n;
            emit(json{{"actor", actor.empty() ? kCameraActor : actor}, {"kind", "hold"}}, secs);
        } else if (t == "orbit" || t == "orbits" || t == "orbiting") {
            // Degrees often trail filler words ("orbit the scene by 180
            // degrees"), so scan a wider window than the move verbs use.
            double degrees = 90.0;
            for (size_t k = i + 1; k < std::min(tokens.size(), i + 6); ++k)
                if (const auto n = number_token(tokens[k])) {
                    degrees = *n;
                    break;
                }
            OrbitParams o = orbit;
            o.end_azimuth_deg = o.start_azimuth_deg + degrees;
            emit(json{{"actor", kCameraActor},
                      {"kind", "orbit_camera"},
                      {"orbit",
                       json{{"center", json::array({o.center.x, o.center.y, o.center.z})},
                            {"radius", o.radius},
                            {"start_azimuth_deg", o.start_azimuth_deg},
                            {"end_azimuth_deg", o.end_azimuth_deg},
                            {"elevation_deg", o.elevation_deg}}}},
                 std::max(std::abs(degrees) / 45.0, 1.0));
            orbit.start_azimuth_deg = o.end_azimuth_deg;
        } else if (t == "dolly" || t == "dollies") {
            double dist = 0.5;
            if (const auto n = number_after(i + 1)) dist = *n;
            if (next(1) == "out") dist = -dist;
            emit(json{{"actor", kCameraActor}, {"kind", "dolly"}, {"distance", dist}}, 1.0);
        }
    }

    if (actions.empty()) {
        OrbitParams o = orbit;
        o.end_azimuth_deg = o.start_azimuth_deg + 90.0;
        emit(json{{"actor", kCameraActor},
                  {"kind", "orbit_camera"},
                  {"orbit",
                   json{{"center", json::array({o.center.x, o.center.y, o.center.z})},
                        {"radius", o.radius},
                        {"start_azimuth_deg", o.start_azimuth_deg},
                        {"end_azimuth_deg", o.end_azimuth_deg},
                        {"elevation_deg", o.elevation_deg}}}},
             2.0);
    }

    return json{{"actions", std::move(actions)}, {"duration_s", clock}, {"fps", fps}};
}

// --- judge / locator -----------------------------------------------------------

json judge_payload(const json& ctx) {
    const double vis = ctx.value("visible_fraction", 0.0);
    const double gap = ctx.value("gap_px", -1.0);
    const double eps = ctx.value("epsilon_px", 2.0);
    const double decay = ctx.value("decay_px", 20.0);
    if (vis < 0.05 || gap < 0.0)
        return json{{"score", 0.5}, {"rationale", "uninformative: subject not visible in this view"}};
    const double score = score_projected_gap(gap, eps, decay);
    return json{{"score", score},
                {"rationale", "projected correction " + format_double(gap) + " px"}};
}

json locator_payload(const json& ctx) {
    return json{{"instance_id", ctx.value("instance_id", "")},
                {"position", ctx.value("suggested", json::array({0.0, 0.0, 0.0}))}};
}

// --- transport ----------------------------------------------------------------

class MockTransport : public HttpTransport {
  public:
    MockTransport(RoleTag role, uint64_t seed) : role_(role), seed_(seed) {}

    HttpResponse post(const std::string&, const std::string& body,
                      const std::vector<std::pair<std::string, std::string>>&, double) override {
        const json ctx = context_of(body);
        json payload;
        switch (role_) {
        case RoleTag::collector: payload = collector_payload(ctx); break;
        case RoleTag::planner:
            payload = ctx.contains("refine") ? refined_plan(ctx) : planner_payload(ctx);
            break;
        case RoleTag::judge: payload = judge_payload(ctx); break;
        case RoleTag::locator: payload = locator_payload(ctx); break;
        }
        return {200, canonical_dump(chat_response(payload))};
    }

  private:
    // Revision rule for refinement feedback: stretch every violating action
    // so its per-frame delta fits inside headroom * budget.
    static json refined_plan(const json& ctx) {
        const json& r = ctx.at("refine");
        json plan = r.at("plan");
        const double fps = plan.value("fps", 24.0);
        const double headroom = r.value("headroom", 0.8);
        const double rot_budget = r.value("max_rot_deg_per_frame", 15.0);
        const double trans_budget = r.value("max_trans_m_per_frame", 0.15);
        for (const auto& v : r.value("violations", json::array())) {
            const std::string actor = v.value("actor", "");
            const double t1 = v.value("frame", 1) / fps;
            for (auto& a : plan.at("actions")) {
                if (a.value("actor", "") != actor) continue;
                const double s = a.value("start_s", 0.0), e = a.value("end_s", 0.0);
                if (!(s <= t1 + 1e-9 && e >= t1 - 1.0 / fps - 1e-9)) continue;
                const double frames = std::max((e - s) * fps, 1.0);
                const double per_frame = v.value("delta", 0.0);
                const double budget =
                    v.value("kind", "") == std::string("rotation") ? rot_budget : trans_budget;
                const double required = std::ceil(per_frame * frames / (headroom * budget));
                const double new_dur = std::max(required, frames) / fps;
                const double shift = new_dur - (e - s);
                if (shift <= 0.0) continue;
                a["end_s"] = s + new_dur;
                for (auto& other : plan.at("actions")) {
                    if (&other == &a || other.value("actor", "") != actor) continue;
                    if (other.value("start_s", 0.0) >= e - 1e-9) {
                        other["start_s"] = other.value("start_s", 0.0) + shift;
                        other["end_s"] = other.value("end_s", 0.0) + shift;
                    }
                }
                break;
            }
        }
        double duration = 0.0;
        for (const auto& a : plan.at("actions")) duration = std::max(duration, a.value("end_s", 0.0));
        plan["duration_s"] = duration;
        return plan;
    }

    RoleTag role_;
    uint64_t seed_;
};

} // namespace

std::shared_ptr<HttpTransport> make_mock_transport(RoleTag role, uint64_t seed) {
    switch (role) {
    case RoleTag::collector:
    case RoleTag::locator:
    case RoleTag::judge:
    case RoleTag::planner: return std::make_shared<MockTransport>(role, seed);
    }
    raise(errc::unknown_role, "no mock rule table for this role");
}

std::unique_ptr<GatewayHandle> make_mock_gateway(RoleTag role, uint64_t seed) {
    GatewayConfig config;
    config.endpoint = "mock://" + std::string(role_name(role));
    config.model = "rule-table";
    return std::make_unique<Gateway>(config, make_mock_transport(role, seed),
                                     GatewayHooks{[](std::chrono::milliseconds) {}, seed});
}

} // namespace fyi
