#include "fyi/canonical_json.hpp"

#include <cstdio>

namespace fyi {

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.9g", value);
    std::string s(buf);
    if (s == "-0") s = "0";
    return s;
}

static void escape_string(const std::string& s, std::string& out) {
    out.push_back('"');
    for (const char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\b': out += "\\b"; break;
        case '\f': out += "\\f"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                out += buf;
            } else {
                out.push_back(c); // UTF-8 passes through
            }
        }
    }
    out.push_back('"');
}

static void dump(const json& v, std::string& out) {
    switch (v.type()) {
    case json::value_t::null: out += "null"; break;
    case json::value_t::boolean: out += v.get<bool>() ? "true" : "false"; break;
    case json::value_t::number_integer: out += std::to_string(v.get<int64_t>()); break;
    case json::value_t::number_unsigned: out += std::to_string(v.get<uint64_t>()); break;
    case json::value_t::number_float: out += format_double(v.get<double>()); break;
    case json::value_t::string: escape_string(v.get<std::string>(), out); break;
    case json::value_t::array: {
        out.push_back('[');
        bool first = true;
        for (const auto& e : v) {
            if (!first) out.push_back(',');
            first = false;
            dump(e, out);
        }
        out.push_back(']');
        break;
    }
    case json::value_t::object: {
        // nlohmann's object_t is std::map, so iteration is already sorted.
        out.push_back('{');
        bool first = true;
        for (auto it = v.begin(); it != v.end(); ++it) {
            if (!first) out.push_back(',');
            first = false;
            escape_string(it.key(), out);
            out.push_back(':');
            dump(it.value(), out);
        }
        out.push_back('}');
        break;
    }
    default: out += "null"; break;
    }
}

std::string canonical_dump(const json& value) {
    std::string out;
    out.reserve(256);
    dump(value, out);
    return out;
}

std::string canonical_bytes(const json& value) { return canonical_dump(value) + "\n"; }

} // namespace fyi
