#pragma once

// Structured scene instructions: the decomposition a collector backend
// returns for a text instruction, and the closed set of spatial predicates
// the layout and judge reason about.

#include <optional>
#include <string>
#include <vector>

#include "fyi/canonical_json.hpp"
#include "fyi/geometry.hpp"

namespace fyi {

enum class Predicate { on, above, left_of, right_of, in_front_of, behind, near, inside };

const char* predicate_name(Predicate p);
std::optional<Predicate> predicate_from_name(const std::string& name);

struct SpatialConstraint {
    Predicate predicate = Predicate::on;
    std::string subject;   // label of the constrained object
    std::string reference; // label of the anchor object
    std::optional<double> param; // meters; used by `near`
    // Horizontal predicates (left_of, right_of, in_front_of, behind) are
    // anchored to the axes of one declared camera, recorded here.
    int reference_view = 0;

    json to_json() const;
    static SpatialConstraint from_json(const json& j);
};

std::string constraint_text(const SpatialConstraint& c); // "on(cup_1, table_1)"

// One object the instruction asks for. `label` is unique within the
// decomposition and becomes the instance id; `query` is the retrieval text.
struct AssetRequest {
    std::string label;
    std::string query;
    std::string resolved_id;           // filled by collect()
    std::optional<double> yaw_deg;     // backend-proposed orientation
    std::optional<double> scale;       // backend-proposed uniform scale
};

struct ExplicitPlacement {
    std::string label;
    Vec3 target; // requested bottom-center position, world meters
};

struct SubScene {
    std::string description;
    std::vector<AssetRequest> assets;
    std::vector<SpatialConstraint> constraints;
    std::vector<ExplicitPlacement> placements;
};

struct SceneDecomposition {
    std::vector<SubScene> sub_scenes;

    json to_json() const;
    static SceneDecomposition from_json(const json& j);

    // Invariant checks: at least one sub-scene, unique labels, placements and
    // constraints referencing declared labels. Raises schema_error.
    void validate() const;
};

struct InstructionInput {
    std::string text;
    // Direct asset references. When non-empty, retrieval is skipped and these
    // ids are attached verbatim.
    std::vector<std::string> explicit_asset_ids;
};

} // namespace fyi
