#include "fyi/gateway.hpp"

#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <thread>

namespace fyi {

const char* role_name(RoleTag role) {
    switch (role) {
    case RoleTag::collector: return "collector";
    case RoleTag::locator: return "locator";
    case RoleTag::judge: return "judge";
    case RoleTag::planner: return "planner";
    }
    return "collector";
}

const char* schema_name(SchemaId schema) {
    switch (schema) {
    case SchemaId::scene_decomposition: return "scene_decomposition";
    case SchemaId::relocation_proposal: return "relocation_proposal";
    case SchemaId::judge_verdict: return "judge_verdict";
    case SchemaId::action_plan: return "action_plan";
    }
    return "scene_decomposition";
}

void GatewayConfig::validate() const {
    if (max_attempts < 1) raise(errc::config_error, "max_attempts must be >= 1");
    if (!(timeout_s > 0.0)) raise(errc::config_error, "timeout_s must be positive");
    if (backoff_factor < 1.0) raise(errc::config_error, "backoff_factor must be >= 1");
    if (max_inflight < 1) raise(errc::config_error, "max_inflight must be >= 1");
}

GatewayConfig GatewayConfig::from_env() {
    GatewayConfig c;
    if (const char* e = std::getenv("FYI_LLM_ENDPOINT")) c.endpoint = e;
    if (const char* e = std::getenv("FYI_LLM_MODEL")) c.model = e;
    if (const char* e = std::getenv("FYI_LLM_API_KEY")) c.api_key = e;
    return c;
}

// --- content extraction -----------------------------------------------------

std::optional<json> extract_first_json_object(const std::string& text) {
    size_t start = text.find('{');
    while (start != std::string::npos) {
        int depth = 0;
        bool in_string = false, escaped = false;
        for (size_t i = start; i < text.size(); ++i) {
            const char c = text[i];
            if (in_string) {
                if (escaped) escaped = false;
                else if (c == '\\') escaped = true;
                else if (c == '"') in_string = false;
                continue;
            }
            if (c == '"') in_string = true;
            else if (c == '{') ++depth;
            else if (c == '}') {
                --depth;
                if (depth == 0) {
                    const std::string candidate = text.substr(start, i - start + 1);
                    json parsed = json::parse(candidate, nullptr, false);
                    if (!parsed.is_discarded()) return parsed;
                    break; // balanced but unparseable; scan past this opener
                }
            }
        }
        start = text.find('{', start + 1);
    }
    return std::nullopt;
}

// --- schema validation ------------------------------------------------------

namespace {

void need(std::vector<std::string>& errors, bool ok, const std::string& msg) {
    if (!ok) errors.push_back(msg);
}

bool is_vec3(const json& j) {
    return j.is_array() && j.size() == 3 && j[0].is_number() && j[1].is_number() && j[2].is_number();
}

void validate_decomposition(const json& p, std::vector<std::string>& errors) {
    if (!p.is_object() || !p.contains("sub_scenes") || !p["sub_scenes"].is_array()) {
        errors.push_back("payload must be an object with a sub_scenes array");
        return;
    }
    need(errors, !p["sub_scenes"].empty(), "sub_scenes must not be empty");
    for (const auto& s : p["sub_scenes"]) {
        if (!s.is_object()) {
            errors.push_back("sub_scene must be an object");
            continue;
        }
        need(errors, s.contains("description") && s["description"].is_string(),
             "sub_scene.description must be a string");
        for (const auto& a : s.value("assets", json::array())) {
            need(errors, a.is_object() && a.contains("label") && a["label"].is_string(),
                 "asset.label must be a string");
            need(errors, a.is_object() && a.contains("query") && a["query"].is_string(),
                 "asset.query must be a string");
        }
        for (const auto& c : s.value("constraints", json::array())) {
            if (!c.is_object()) {
                errors.push_back("constraint must be an object");
                continue;
            }
            const std::string pred = c.value("predicate", "");
            static const char* preds[] = {"on",     "above", "left_of", "right_of",
                                          "in_front_of", "behind", "near", "inside"};
            bool ok = false;
            for (const char* q : preds) ok = ok || pred == q;
            need(errors, ok, "constraint.predicate '" + pred + "' not in the closed set");
            need(errors, c.contains("subject") && c["subject"].is_string(),
                 "constraint.subject must be a string");
            need(errors, c.contains("reference") && c["reference"].is_string(),
                 "constraint.reference must be a string");
        }
        for (const auto& pl : s.value("placements", json::array())) {
            need(errors, pl.is_object() && pl.contains("label") && pl["label"].is_string(),
                 "placement.label must be a string");
            need(errors, pl.is_object() && pl.contains("target") && is_vec3(pl["target"]),
                 "placement.target must be [x,y,z]");
        }
    }
}

void validate_action_plan(const json& p, std::vector<std::string>& errors) {
    if (!p.is_object() || !p.contains("actions") || !p["actions"].is_array()) {
        errors.push_back("payload must be an object with an actions array");
        return;
    }
    need(errors, p.contains("fps") && p["fps"].is_number() && p["fps"].get<double>() > 0,
         "fps must be a positive number");
    need(errors, p.contains("duration_s") && p["duration_s"].is_number(),
         "duration_s must be a number");
    for (const auto& a : p["actions"]) {
        if (!a.is_object()) {
            errors.push_back("action must be an object");
            continue;
        }
        need(errors, a.contains("actor") && a["actor"].is_string(), "action.actor must be a string");
        const std::string kind = a.value("kind", "");
        need(errors,
             kind == "move_to" || kind == "rotate_to" || kind == "orbit_camera" || kind == "dolly" ||
                 kind == "hold",
             "action.kind '" + kind + "' unknown");
        const double s = a.value("start_s", -1.0), e = a.value("end_s", -1.0);
        need(errors, a.contains("start_s") && a.contains("end_s") && e > s,
             "action needs end_s > start_s");
        if (kind == "move_to")
            need(errors, a.contains("target") && is_vec3(a["target"]), "move_to.target must be [x,y,z]");
        if (kind == "rotate_to")
            need(errors,
                 a.contains("target_quat") && a["target_quat"].is_array() && a["target_quat"].size() == 4,
                 "rotate_to.target_quat must be [w,x,y,z]");
        if (kind == "dolly")
            need(errors, a.contains("distance") && a["distance"].is_number(),
                 "dolly.distance must be a number");
        if (kind == "orbit_camera") {
            const bool ok = a.contains("orbit") && a["orbit"].is_object() &&
                            is_vec3(a["orbit"].value("center", json())) &&
                            a["orbit"].value("radius", 0.0) > 0.0 &&
                            a["orbit"].contains("start_azimuth_deg") &&
                            a["orbit"].contains("end_azimuth_deg") &&
                            a["orbit"].contains("elevation_deg");
            need(errors, ok, "orbit_camera.orbit needs center, radius > 0, azimuths and elevation");
        }
    }
}

void validate_judge_verdict(const json& p, std::vector<std::string>& errors) {
    if (!p.is_object()) {
        errors.push_back("payload must be an object");
        return;
    }
    const bool has_score = p.contains("score") && p["score"].is_number();
    need(errors, has_score, "score must be a number");
    if (has_score) {
        const double s = p["score"].get<double>();
        need(errors, s >= 0.0 && s <= 1.0, "score must lie in [0,1]");
    }
    need(errors, p.contains("rationale") && p["rationale"].is_string(), "rationale must be a string");
}

void validate_relocation(const json& p, std::vector<std::string>& errors) {
    if (!p.is_object()) {
        errors.push_back("payload must be an object");
        return;
    }
    need(errors, p.contains("instance_id") && p["instance_id"].is_string(),
         "instance_id must be a string");
    need(errors, p.contains("position") && is_vec3(p["position"]), "position must be [x,y,z]");
}

} // namespace

std::vector<std::string> validate_schema(SchemaId schema, const json& payload) {
    std::vector<std::string> errors;
    switch (schema) {
    case SchemaId::scene_decomposition: validate_decomposition(payload, errors); break;
    case SchemaId::action_plan: validate_action_plan(payload, errors); break;
    case SchemaId::judge_verdict: validate_judge_verdict(payload, errors); break;
    case SchemaId::relocation_proposal: validate_relocation(payload, errors); break;
    }
    return errors;
}

// --- wire building ----------------------------------------------------------

std::string base64_encode(const std::string& bytes) {
    static const char* alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    std::string out;
    out.reserve((bytes.size() + 2) / 3 * 4);
    size_t i = 0;
    while (i + 2 < bytes.size()) {
        const uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                           static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out.push_back(alphabet[v & 63]);
        i += 3;
    }
    const size_t rest = bytes.size() - i;
    if (rest == 1) {
        const uint32_t v = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out += "==";
    } else if (rest == 2) {
        const uint32_t v = (static_cast<unsigned char>(bytes[i]) << 16) |
                           (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out.push_back(alphabet[(v >> 18) & 63]);
        out.push_back(alphabet[(v >> 12) & 63]);
        out.push_back(alphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

static std::string system_prompt_for(RoleTag role) {
    switch (role) {
    case RoleTag::collector:
        return "You turn a scene instruction into a structured decomposition: the objects to "
               "retrieve, their spatial constraints, and any explicit positions. Respond with one "
               "JSON object matching the scene_decomposition schema and nothing else.";
    case RoleTag::locator:
        return "You propose a corrected world position for one misplaced object. Respond with one "
               "JSON object matching the relocation_proposal schema.";
    case RoleTag::judge:
        return "You verify one spatial relation in one rendered view and answer with a confidence "
               "score in [0,1]. Respond with one JSON object matching the judge_verdict schema.";
    case RoleTag::planner:
        return "You convert an instruction over a verified scene into a timed action plan. Respond "
               "with one JSON object matching the action_plan schema.";
    }
    return "";
}

std::string render_user_message(const StructuredRequest& request) {
    std::string msg = request.prompt;
    msg += "\n\nContext:\n```json\n";
    msg += canonical_dump(request.context);
    msg += "\n```\n";
    return msg;
}

json wire_body(const GatewayConfig& config, const StructuredRequest& request) {
    json user_content;
    const std::string text = render_user_message(request);
    if (request.attachments.empty()) {
        user_content = text;
    } else {
        user_content = json::array({json{{"type", "text"}, {"text", text}}});
        for (const auto& a : request.attachments)
            user_content.push_back(
                json{{"type", "image_url"},
                     {"image_url", json{{"url", "data:" + a.mime + ";base64," + a.data_base64}}}});
    }
    return json{{"model", config.model},
                {"temperature", 0},
                {"messages", json::array({json{{"role", "system"}, {"content", system_prompt_for(request.role)}},
                                          json{{"role", "user"}, {"content", user_content}}})}};
}

// --- gateway ----------------------------------------------------------------

Gateway::Gateway(GatewayConfig config, std::shared_ptr<HttpTransport> transport, GatewayHooks hooks)
    : config_(std::move(config)), transport_(std::move(transport)), hooks_(std::move(hooks)) {
    config_.validate();
    if (!hooks_.sleep)
        hooks_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
    jitter_state_ = hooks_.jitter_seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL;
}

static uint64_t xorshift64(uint64_t& state) {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
}

HttpResponse Gateway::post_with_retry(const std::string& body) {
    const std::vector<std::pair<std::string, std::string>> headers =
        config_.api_key.empty()
            ? std::vector<std::pair<std::string, std::string>>{}
            : std::vector<std::pair<std::string, std::string>>{{"Authorization", "Bearer " + config_.api_key}};

    std::string trace;
    for (int attempt = 0; attempt < config_.max_attempts; ++attempt) {
        {
            std::unique_lock lock(mutex_);
            if (requests_made_ >= config_.max_requests)
                raise(errc::budget_exhausted,
                      "request budget of " + std::to_string(config_.max_requests) + " spent");
            ++requests_made_;
        }
        std::string failure;
        HttpResponse resp;
        bool got_response = false;
        try {
            resp = transport_->post(config_.endpoint, body, headers, config_.timeout_s);
            got_response = true;
        } catch (const Error& e) {
            if (e.code() != errc::transport_error && e.code() != errc::timeout) throw;
            failure = e.what();
        }
        if (got_response) {
            if (resp.status == 200) return resp;
            if (resp.status != 429 && resp.status < 500)
                raise(errc::transport_error,
                      "HTTP " + std::to_string(resp.status) + " (not retryable): " + resp.body);
            failure = "HTTP " + std::to_string(resp.status);
        }
        trace += "attempt " + std::to_string(attempt + 1) + ": " + failure + "; ";
        if (attempt + 1 == config_.max_attempts) break;
        // Exponential backoff with additive jitter: the sleep is never
        // shorter than base*factor^attempt and never twice as long.
        const double exp_ms = config_.backoff_base_ms * std::pow(config_.backoff_factor, attempt);
        uint64_t j;
        {
            std::unique_lock lock(mutex_);
            j = xorshift64(jitter_state_);
        }
        const double jitter = static_cast<double>(j >> 11) * 0x1.0p-53 * exp_ms;
        hooks_.sleep(std::chrono::milliseconds(static_cast<long>(exp_ms + jitter)));
    }
    raise(errc::transport_error, "all " + std::to_string(config_.max_attempts) + " attempts failed: " + trace);
}

json Gateway::send(const StructuredRequest& request) {
    // Bound concurrent wire requests to max_inflight.
    std::unique_lock lock(mutex_);
    inflight_cv_.wait(lock, [&] { return inflight_ < config_.max_inflight; });
    ++inflight_;
    lock.unlock();

    struct Release {
        Gateway* g;
        ~Release() {
            std::unique_lock l(g->mutex_);
            --g->inflight_;
            g->inflight_cv_.notify_one();
        }
    } release{this};

    const auto run_once = [&](const StructuredRequest& req) -> std::pair<std::optional<json>, std::string> {
        const HttpResponse resp = post_with_retry(canonical_dump(wire_body(config_, req)));
        json body = json::parse(resp.body, nullptr, false);
        if (body.is_discarded()) return {std::nullopt, "response body is not JSON"};
        if (!body.contains("choices") || !body["choices"].is_array() || body["choices"].empty())
            return {std::nullopt, "response has no choices"};
        const json& msg = body["choices"][0].value("message", json::object());
        if (!msg.contains("content") || !msg["content"].is_string())
            return {std::nullopt, "first choice has no string content"};
        const auto payload = extract_first_json_object(msg["content"].get<std::string>());
        if (!payload) return {std::nullopt, "no JSON object found in content"};
        const auto errors = validate_schema(req.expected_schema, *payload);
        if (!errors.empty()) {
            std::string joined;
            for (const auto& e : errors) joined += e + "; ";
            return {std::nullopt, joined};
        }
        return {payload, ""};
    };

    auto [payload, error] = run_once(request);
    if (payload) return *payload;

    // One repair round-trip: re-ask with the validation error appended.
    StructuredRequest repair = request;
    repair.prompt += "\n\nThe previous reply was rejected: " + error +
                     "\nRespond again with a single JSON object matching the " +
                     std::string(schema_name(request.expected_schema)) + " schema.";
    auto [payload2, error2] = run_once(repair);
    if (payload2) return *payload2;
    raise(errc::schema_error, "backend reply failed validation twice: " + error2);
}

} // namespace fyi
