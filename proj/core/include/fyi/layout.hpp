#pragma once

// Scene layout: object instantiation from assets, instructed and automatic
// placement over an occupancy grid, support surfaces (cup-on-table), and 2D
// projection of placed objects.
//
// An instance's transform translation is its bottom-center point, so placing
// at z means "the object's underside rests at height z".

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fyi/assets.hpp"
#include "fyi/instruction.hpp"
#include "fyi/occupancy.hpp"

namespace fyi {

enum class PlacedBy { instructed, automatic };

struct ObjectInstance {
    std::string instance_id;
    std::string asset_id;
    std::string description;
    Obb obb;             // local frame, bottom face at z=0
    Transform transform; // translation = world bottom-center
    PlacedBy placed_by = PlacedBy::automatic;
    Poly2 footprint;     // world ground-plane hull of the transformed box
    std::optional<double> support_surface; // canonical resting height of THIS object's top surface

    std::array<Vec3, 8> world_corners() const { return obb_world_corners(obb, transform); }
    Vec3 bottom_center() const { return obb_bottom_center(obb, transform); }
    // World height other objects rest at, when this object is a support.
    std::optional<double> support_top() const {
        if (!support_surface) return std::nullopt;
        return transform.translation.z + *support_surface * transform.scale.z;
    }
};

struct SupportEntry {
    std::string parent_id;
    double height; // world z of the resting surface
};

struct OverlapWarning {
    std::string subject;
    std::string other;
};

// Bounding box of an asset scaled to its canonical dimensions, sitting on
// its local origin: bottom-center at (0,0,0), center at (0,0,h/2).
Obb instantiate(const AssetRecord& asset, const std::string& description);

struct Placement {
    std::optional<Vec3> target; // exact bottom-center position; empty = automatic
};

struct LayoutParams {
    double extent = 6.0;     // square scene, centered on the origin, meters
    double cell_size = 0.05;
    double clearance = 0.05;
};

class SceneLayout {
  public:
    SceneLayout() : SceneLayout(LayoutParams{}) {}
    explicit SceneLayout(const LayoutParams& params);

    // Instantiate + place + compose + mark. Automatic placement honors an
    // `on` constraint by searching the support's surface region; instructed
    // placement lands exactly on `target` and only records overlaps.
    ObjectInstance& insert(const AssetRecord& asset, const std::string& instance_id,
                           const std::string& description, const Placement& placement,
                           const Rotation& rotation = Rotation::identity(),
                           const Vec3& scale = {1.0, 1.0, 1.0});

    // Move an existing instance's bottom-center to exactly `target`
    // (instructed placement applied to a live object).
    void place_instructed(const std::string& instance_id, const Vec3& target);

    // Move laterally to the first free region of the instance's own grid,
    // ordered around `focus`; z is preserved unless the instance rests on a
    // support, in which case it snaps to the support height.
    // Returns false when no free region exists.
    bool relocate_free(const std::string& instance_id, const Vec2& focus);

    // Set just the height of an instance's bottom-center.
    void set_bottom_height(const std::string& instance_id, double z);

    void remove(const std::string& instance_id);

    const ObjectInstance& instance(const std::string& instance_id) const;
    ObjectInstance* find(const std::string& instance_id);
    const ObjectInstance* find(const std::string& instance_id) const;
    // 1-based render ordinal, 0 when absent.
    int ordinal_of(const std::string& instance_id) const;

    // The `on`/`inside` constraint naming `instance_id` as subject, if any.
    const SpatialConstraint* support_constraint_of(const std::string& instance_id) const;

    // World bounding box over all instances; falls back to a unit box at the
    // origin for an empty scene.
    std::pair<Vec3, Vec3> world_bounds() const;

    std::vector<ObjectInstance> instances;
    OccupancyGrid grid; // ground-level objects
    std::vector<SpatialConstraint> constraints;
    std::map<std::string, SupportEntry> support_index;
    std::vector<OverlapWarning> diagnostics;

    double clearance() const { return params_.clearance; }
    const LayoutParams& params() const { return params_; }

  private:
    struct MarkRecord {
        std::string grid_key; // "" = ground grid, else support parent id
        std::vector<int32_t> cells;
    };

    OccupancyGrid& grid_for(const std::string& key);
    OccupancyGrid& ensure_support_grid(const ObjectInstance& parent);
    void mark_instance(ObjectInstance& inst, const std::string& grid_key);
    void unmark_instance(const std::string& instance_id);
    void record_overlaps(const ObjectInstance& inst);

    LayoutParams params_;
    std::map<std::string, OccupancyGrid> support_grids_;
    std::map<std::string, MarkRecord> marks_;

    friend class LayoutTestAccess;
};

// Ground-plane hull of the box under rotation+scale, relative to the
// bottom-center anchor (translation-free).
Poly2 footprint_shape(const Obb& obb, const Rotation& rotation, const Vec3& scale);

struct ProjectedObject {
    std::optional<PixelCoord> center; // projection of the bottom-center anchor
    double u0 = 0, v0 = 0, u1 = 0, v1 = 0; // rectangle over visible corners, clipped
    int visible_corners = 0;
};

// Rectangle + anchor pixel for one instance in one camera. Raises
// fully_behind_camera when no corner has positive depth.
ProjectedObject project_object(const SceneLayout& layout, const std::string& instance_id,
                               const CameraIntrinsics& K, const CameraPose& E);

// Build a layout from a resolved decomposition: dependency-ordered inserts
// (supports before the objects resting on them), explicit placements applied
// verbatim, automatic placement elsewhere.
struct BuildParams {
    LayoutParams layout;
    bool random_yaw = false;   // uniform yaw for auto-placed objects
    uint64_t seed = 0;
    double scale_min = 0.5, scale_max = 2.0; // clamp for backend-proposed scales
};

SceneLayout build_layout(const SceneDecomposition& decomposition, const AssetRepository& repo,
                         const BuildParams& params);

} // namespace fyi
