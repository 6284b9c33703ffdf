#include "fyi/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace fyi {

namespace {

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') || (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

} // namespace

PipelineConfig PipelineConfig::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::config_error, "cannot open config '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

PipelineConfig PipelineConfig::parse(const std::string& text) {
    PipelineConfig c;

    std::map<std::string, std::function<void(const std::string&)>> setters;
    const auto set_str = [&](const char* key, std::string& field) {
        setters[key] = [&field](const std::string& v) { field = unquote(v); };
    };
    const auto set_double = [&](const char* key, double& field) {
        setters[key] = [&field, key = std::string(key)](const std::string& v) {
            try {
                field = std::stod(v);
            } catch (...) {
                raise(errc::config_error, "key '" + key + "' needs a number, got '" + v + "'");
            }
        };
    };
    const auto set_int = [&](const char* key, int& field) {
        setters[key] = [&field, key = std::string(key)](const std::string& v) {
            try {
                field = std::stoi(v);
            } catch (...) {
                raise(errc::config_error, "key '" + key + "' needs an integer, got '" + v + "'");
            }
        };
    };
    const auto set_bool = [&](const char* key, bool& field) {
        setters[key] = [&field, key = std::string(key)](const std::string& v) {
            if (v == "true") field = true;
            else if (v == "false") field = false;
            else raise(errc::config_error, "key '" + key + "' needs true/false, got '" + v + "'");
        };
    };

    set_str("scene.instruction", c.instruction);
    set_double("scene.extent", c.extent);
    set_double("scene.cell_size", c.cell_size);
    set_double("scene.clearance", c.clearance);
    set_bool("scene.random_yaw", c.random_yaw);
    set_str("assets.manifest", c.manifest);
    set_int("retrieval.top_k", c.top_k);
    set_double("retrieval.min_score", c.min_score);
    set_int("render.width", c.width);
    set_int("render.height", c.height);
    set_double("render.focal_scale", c.focal_scale);
    set_int("render.threads", c.threads);
    set_int("optimizer.views", c.views);
    set_double("optimizer.threshold", c.threshold);
    set_int("optimizer.max_iter", c.max_iter);
    set_double("optimizer.ring_radius_scale", c.ring_radius_scale);
    set_double("optimizer.ring_elevation_deg", c.ring_elevation_deg);
    set_double("judge.epsilon_px", c.epsilon_px);
    set_double("judge.decay_px", c.decay_px);
    set_double("judge.min_visible", c.min_visible);
    set_double("planner.fps", c.fps);
    set_int("planner.max_frames", c.max_frames);
    set_int("planner.max_rounds", c.max_rounds);
    set_double("planner.max_rot_deg_per_frame", c.max_rot_deg_per_frame);
    set_double("planner.max_trans_m_per_frame", c.max_trans_m_per_frame);
    set_str("gateway.endpoint", c.gateway.endpoint);
    set_str("gateway.model", c.gateway.model);
    set_double("gateway.timeout_s", c.gateway.timeout_s);
    set_int("gateway.max_attempts", c.gateway.max_attempts);
    set_int("gateway.backoff_base_ms", c.gateway.backoff_base_ms);
    set_double("gateway.backoff_factor", c.gateway.backoff_factor);
    set_int("gateway.max_inflight", c.gateway.max_inflight);
    set_int("gateway.max_requests", c.gateway.max_requests);

    std::istringstream in(text);
    std::string line, section;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // Strip comments, but only outside quoted strings.
        bool in_quote = false;
        for (size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') in_quote = !in_quote;
            else if (line[i] == '#' && !in_quote) {
                line = line.substr(0, i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            raise(errc::config_error, "line " + std::to_string(line_no) + ": expected key = value");
        const std::string key =
            (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            raise(errc::config_error, "line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        it->second(value);
    }
    return c;
}

} // namespace fyi
