#pragma once

// Asset storage and retrieval: a JSON manifest of retrievable assets, a
// deterministic feature-hash text embedder, and cosine top-k ranking.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fyi/geometry.hpp"
#include "fyi/instruction.hpp"

namespace fyi {

constexpr int kEmbeddingDim = 256;
using Embedding = std::array<double, kEmbeddingDim>;

struct AssetRecord {
    std::string asset_id;
    std::string description;
    std::vector<std::string> tags;
    Vec3 canonical_dims;  // extents along x, y, z in meters; z is up
    std::string category;
    std::optional<double> support_surface; // resting height above the asset's bottom, meters
    Embedding embedding{};                 // embed_text(description), unit norm
};

// Lowercase, split on non-alphanumeric boundaries.
std::vector<std::string> tokenize_lower(const std::string& text);

// Lowercase, split on non-alphanumeric boundaries, hash each token into one
// of 256 buckets (FNV-1a 64), count, L2-normalize. Identical text yields
// identical bytes on every platform. Raises empty_text when no token remains.
Embedding embed_text(const std::string& text);

double cosine(const Embedding& a, const Embedding& b);

struct ScoredAsset {
    const AssetRecord* record;
    double score;
};

class AssetRepository {
  public:
    static AssetRepository load_file(const std::string& path);
    static AssetRepository load_json(const json& manifest);

    json to_json() const;          // canonical manifest form; embeddings excluded
    std::string to_bytes() const;  // load -> to_bytes round-trips to identical bytes

    const std::vector<AssetRecord>& records() const { return records_; }
    bool empty() const { return records_.empty(); }
    size_t size() const { return records_.size(); }
    const AssetRecord* find(const std::string& asset_id) const;

  private:
    std::vector<AssetRecord> records_;
};

// The k records with the highest cosine against embed_text(query), scores
// descending, ties broken by ascending asset_id. k past the repository size
// returns everything. Raises empty_repository.
std::vector<ScoredAsset> retrieve_top_k(const AssetRepository& repo, const std::string& query, int k);

class GatewayHandle;

struct CollectConfig {
    int top_k = 3;
    double min_score = 0.05; // best cosine below this means the query resolves to nothing
};

// Turn an instruction into a validated, asset-resolved decomposition.
// Text goes through the gateway's collector role; explicit asset references
// skip both the gateway and retrieval and are attached verbatim.
SceneDecomposition collect(const AssetRepository& repo, const InstructionInput& input,
                           GatewayHandle& gateway, const CollectConfig& config = {});

} // namespace fyi
