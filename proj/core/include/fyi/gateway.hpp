#pragma once

// The one seam between the engine and any chat-completions backend: wire
// client with structured-output validation, retry with jittered exponential
// backoff, a request budget, and deterministic rule-based mock backends so
// the whole pipeline runs offline.

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fyi/canonical_json.hpp"
#include "fyi/error.hpp"

namespace fyi {

enum class RoleTag { collector, locator, judge, planner };
enum class SchemaId { scene_decomposition, relocation_proposal, judge_verdict, action_plan };

const char* role_name(RoleTag role);
const char* schema_name(SchemaId schema);

struct GatewayConfig {
    std::string endpoint; // e.g. https://host/v1/chat/completions
    std::string model;
    std::string api_key;
    double timeout_s = 30.0;
    int max_attempts = 5;
    int backoff_base_ms = 500;
    double backoff_factor = 2.0;
    int max_inflight = 4;
    int max_requests = 256; // per-run request budget

    void validate() const;
    // Reads FYI_LLM_ENDPOINT, FYI_LLM_MODEL, FYI_LLM_API_KEY.
    static GatewayConfig from_env();
};

struct Attachment {
    std::string mime;
    std::string data_base64;
};

struct StructuredRequest {
    RoleTag role = RoleTag::collector;
    std::string prompt;                  // role template already rendered
    std::vector<Attachment> attachments; // images, base64
    SchemaId expected_schema = SchemaId::scene_decomposition;
    // Structured facts behind the prompt; appended as a fenced JSON block so
    // rule-based mocks can consume exactly what a live model reads.
    json context = json::object();
};

struct HttpResponse {
    int status = 0;
    std::string body;
};

class HttpTransport {
  public:
    virtual ~HttpTransport() = default;
    // Connection-level failures raise transport_error / timeout.
    virtual HttpResponse post(const std::string& endpoint, const std::string& body,
                              const std::vector<std::pair<std::string, std::string>>& headers,
                              double timeout_s) = 0;
};

class GatewayHandle {
  public:
    virtual ~GatewayHandle() = default;
    // Returns the schema-validated payload; malformed data never escapes.
    virtual json send(const StructuredRequest& request) = 0;
};

// Test seams: injectable sleep and a seed for backoff jitter.
struct GatewayHooks {
    std::function<void(std::chrono::milliseconds)> sleep; // default: real sleep
    uint64_t jitter_seed = 0;
};

class Gateway : public GatewayHandle {
  public:
    Gateway(GatewayConfig config, std::shared_ptr<HttpTransport> transport, GatewayHooks hooks = {});

    json send(const StructuredRequest& request) override;

    int requests_made() const { return requests_made_; }

  private:
    HttpResponse post_with_retry(const std::string& body);

    GatewayConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    GatewayHooks hooks_;
    std::mutex mutex_;
    std::condition_variable_any inflight_cv_;
    int inflight_ = 0;
    int requests_made_ = 0;
    uint64_t jitter_state_ = 0;
};

// cpp-httplib client (http and https).
std::shared_ptr<HttpTransport> make_live_transport();

// Deterministic rule-table backend for one role, speaking the same wire
// format as a live server so the full extraction/validation path runs.
// Raises unknown_role for roles without a table.
std::shared_ptr<HttpTransport> make_mock_transport(RoleTag role, uint64_t seed);
std::unique_ptr<GatewayHandle> make_mock_gateway(RoleTag role, uint64_t seed);

// --- building blocks, exposed for tests ---

// First balanced, parseable JSON object embedded in free text.
std::optional<json> extract_first_json_object(const std::string& text);

// Structural validation; empty result means valid.
std::vector<std::string> validate_schema(SchemaId schema, const json& payload);

// Chat-completions request body: model, system+user messages, temperature 0.
json wire_body(const GatewayConfig& config, const StructuredRequest& request);

// Prompt text with the fenced context block appended.
std::string render_user_message(const StructuredRequest& request);

std::string base64_encode(const std::string& bytes);

} // namespace fyi
