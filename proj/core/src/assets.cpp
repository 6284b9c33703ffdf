#include "fyi/assets.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace fyi {

static uint64_t fnv1a64(const std::string& s) {
    uint64_t h = 14695981039346656037ULL;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> tokenize_lower(const std::string& text) {
    std::vector<std::string> tokens;
    std::string cur;
    for (const char ch : text) {
        if (std::isalnum(static_cast<unsigned char>(ch))) {
            cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        } else if (!cur.empty()) {
            tokens.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) tokens.push_back(std::move(cur));
    return tokens;
}

Embedding embed_text(const std::string& text) {
    const auto tokens = tokenize_lower(text);
    if (tokens.empty()) raise(errc::empty_text, "no tokens in '" + text + "'");
    Embedding v{};
    for (const auto& t : tokens) v[fnv1a64(t) % kEmbeddingDim] += 1.0;
    double n2 = 0.0;
    for (const double c : v) n2 += c * c;
    const double inv = 1.0 / std::sqrt(n2);
    for (double& c : v) c *= inv;
    return v;
}

double cosine(const Embedding& a, const Embedding& b) {
    double s = 0.0;
    for (int i = 0; i < kEmbeddingDim; ++i) s += a[i] * b[i];
    return s;
}

AssetRepository AssetRepository::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(errc::config_error, "cannot open asset manifest '" + path + "'");
    json manifest;
    try {
        in >> manifest;
    } catch (const json::exception& e) {
        raise(errc::schema_error, "asset manifest '" + path + "' is not valid JSON: " + e.what());
    }
    return load_json(manifest);
}

AssetRepository AssetRepository::load_json(const json& manifest) {
    if (!manifest.is_object() || manifest.value("schema", 0) != 1)
        raise(errc::schema_error, "asset manifest must declare \"schema\": 1");
    AssetRepository repo;
    std::set<std::string> seen;
    for (const auto& ja : manifest.value("assets", json::array())) {
        AssetRecord r;
        r.asset_id = ja.at("id").get<std::string>();
        if (!seen.insert(r.asset_id).second)
            raise(errc::schema_error, "duplicate asset id '" + r.asset_id + "'");
        r.description = ja.at("description").get<std::string>();
        for (const auto& t : ja.value("tags", json::array())) r.tags.push_back(t.get<std::string>());
        const auto& dims = ja.at("dims");
        if (!dims.is_array() || dims.size() != 3) raise(errc::schema_error, "dims must be [x,y,z]");
        r.canonical_dims = {dims[0].get<double>(), dims[1].get<double>(), dims[2].get<double>()};
        if (!(r.canonical_dims.x > 0 && r.canonical_dims.y > 0 && r.canonical_dims.z > 0))
            raise(errc::schema_error, "asset '" + r.asset_id + "' has non-positive dims");
        r.category = ja.value("category", "");
        if (ja.contains("support_surface") && !ja.at("support_surface").is_null())
            r.support_surface = ja.at("support_surface").get<double>();
        r.embedding = embed_text(r.description);
        repo.records_.push_back(std::move(r));
    }
    return repo;
}

json AssetRepository::to_json() const {
    json assets = json::array();
    for (const auto& r : records_) {
        json tags = json::array();
        for (const auto& t : r.tags) tags.push_back(t);
        json ja{{"id", r.asset_id},
                {"description", r.description},
                {"tags", std::move(tags)},
                {"dims", json::array({r.canonical_dims.x, r.canonical_dims.y, r.canonical_dims.z})},
                {"category", r.category},
                {"support_surface", r.support_surface ? json(*r.support_surface) : json(nullptr)}};
        assets.push_back(std::move(ja));
    }
    return json{{"schema", 1}, {"assets", std::move(assets)}};
}

std::string AssetRepository::to_bytes() const { return canonical_bytes(to_json()); }

const AssetRecord* AssetRepository::find(const std::string& asset_id) const {
    for (const auto& r : records_)
        if (r.asset_id == asset_id) return &r;
    return nullptr;
}

std::vector<ScoredAsset> retrieve_top_k(const AssetRepository& repo, const std::string& query, int k) {
    if (repo.empty()) raise(errc::empty_repository, "retrieval over an empty repository");
    if (k < 1) raise(errc::config_error, "top-k requires k >= 1");
    const Embedding q = embed_text(query);
    std::vector<ScoredAsset> scored;
    scored.reserve(repo.size());
    for (const auto& r : repo.records()) scored.push_back({&r, cosine(q, r.embedding)});
    std::sort(scored.begin(), scored.end(), [](const ScoredAsset& a, const ScoredAsset& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.record->asset_id < b.record->asset_id;
    });
    if (static_cast<size_t>(k) < scored.size()) scored.resize(static_cast<size_t>(k));
    return scored;
}

} // namespace fyi
