#include "fyi/assets.hpp"
#include "fyi/gateway.hpp"

namespace fyi {

SceneDecomposition collect(const AssetRepository& repo, const InstructionInput& input,
                           GatewayHandle& gateway, const CollectConfig& config) {
    // Direct asset references skip both the backend and retrieval.
    if (!input.explicit_asset_ids.empty()) {
        SubScene scene;
        scene.description = input.text;
        std::map<std::string, int> counter;
        for (const auto& id : input.explicit_asset_ids) {
            if (!repo.find(id)) raise(errc::unresolvable_asset, "unknown asset id '" + id + "'");
            AssetRequest req;
            req.label = id + "_" + std::to_string(++counter[id]);
            req.query = id;
            req.resolved_id = id;
            scene.assets.push_back(std::move(req));
        }
        SceneDecomposition d;
        d.sub_scenes.push_back(std::move(scene));
        d.validate();
        return d;
    }

    if (input.text.empty()) raise(errc::empty_text, "instruction is empty");

    StructuredRequest req;
    req.role = RoleTag::collector;
    req.expected_schema = SchemaId::scene_decomposition;
    req.prompt = "Decompose this scene instruction into assets, spatial constraints and explicit "
                 "positions: " + input.text;
    req.context = json{{"instruction", input.text}};

    SceneDecomposition d = SceneDecomposition::from_json(gateway.send(req));
    d.validate();

    for (auto& scene : d.sub_scenes) {
        for (auto& asset : scene.assets) {
            if (!asset.resolved_id.empty()) continue;
            const auto ranked = retrieve_top_k(repo, asset.query, config.top_k);
            if (ranked.empty() || ranked.front().score < config.min_score)
                raise(errc::unresolvable_asset,
                      "query '" + asset.query + "' matches nothing in the repository");
            asset.resolved_id = ranked.front().record->asset_id;
        }
    }
    return d;
}

} // namespace fyi
