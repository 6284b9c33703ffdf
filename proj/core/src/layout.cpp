#include "fyi/layout.hpp"

#include <algorithm>

#include "fyi/rng.hpp"

namespace fyi {

Obb instantiate(const AssetRecord& asset, const std::string& description) {
    (void)description; // retained on the instance for judge prompts
    const Vec3 he = asset.canonical_dims * 0.5;
    return make_obb({0.0, 0.0, he.z}, he);
}

Poly2 footprint_shape(const Obb& obb, const Rotation& rotation, const Vec3& scale) {
    const Transform t{{0.0, 0.0, 0.0}, rotation, scale};
    std::vector<Vec2> pts;
    pts.reserve(8);
    for (const auto& c : obb_world_corners(obb, t)) pts.push_back(c.xy());
    return convex_hull(std::move(pts));
}

SceneLayout::SceneLayout(const LayoutParams& params) : params_(params) {
    const double h = params.extent * 0.5;
    grid = OccupancyGrid({-h, -h}, {h, h}, params.cell_size);
}

OccupancyGrid& SceneLayout::grid_for(const std::string& key) {
    if (key.empty()) return grid;
    const auto it = support_grids_.find(key);
    if (it == support_grids_.end())
        raise(errc::unknown_instance, "support grid for removed instance '" + key + "'");
    return it->second;
}

OccupancyGrid& SceneLayout::ensure_support_grid(const ObjectInstance& parent) {
    auto it = support_grids_.find(parent.instance_id);
    if (it != support_grids_.end()) return it->second;
    const Bounds2 b = poly_bounds(parent.footprint);
    OccupancyGrid g(b.min, b.max, params_.cell_size);
    g.block_outside(parent.footprint);
    return support_grids_.emplace(parent.instance_id, std::move(g)).first->second;
}

const SpatialConstraint* SceneLayout::support_constraint_of(const std::string& instance_id) const {
    for (const auto& c : constraints)
        if (c.subject == instance_id && (c.predicate == Predicate::on || c.predicate == Predicate::inside))
            return &c;
    return nullptr;
}

void SceneLayout::mark_instance(ObjectInstance& inst, const std::string& grid_key) {
    auto& g = grid_for(grid_key);
    MarkRecord rec{grid_key, g.cells_under(inst.footprint, params_.clearance)};
    g.mark(rec.cells);
    marks_[inst.instance_id] = std::move(rec);
}

void SceneLayout::unmark_instance(const std::string& instance_id) {
    auto it = marks_.find(instance_id);
    if (it == marks_.end()) return;
    if (it->second.grid_key.empty()) {
        grid.unmark(it->second.cells);
    } else {
        // The support may have been removed first; its grid went with it.
        const auto g = support_grids_.find(it->second.grid_key);
        if (g != support_grids_.end()) g->second.unmark(it->second.cells);
    }
    marks_.erase(it);
}

void SceneLayout::record_overlaps(const ObjectInstance& inst) {
    const auto support = support_index.find(inst.instance_id);
    for (const auto& other : instances) {
        if (other.instance_id == inst.instance_id) continue;
        // An object and its declared support may overlap.
        if (support != support_index.end() && support->second.parent_id == other.instance_id) continue;
        const auto other_support = support_index.find(other.instance_id);
        if (other_support != support_index.end() && other_support->second.parent_id == inst.instance_id)
            continue;
        if (convex_overlap(inst.footprint, other.footprint))
            diagnostics.push_back({inst.instance_id, other.instance_id});
    }
}

ObjectInstance& SceneLayout::insert(const AssetRecord& asset, const std::string& instance_id,
                                    const std::string& description, const Placement& placement,
                                    const Rotation& rotation, const Vec3& scale) {
    if (find(instance_id)) raise(errc::config_error, "duplicate instance id '" + instance_id + "'");

    ObjectInstance inst;
    inst.instance_id = instance_id;
    inst.asset_id = asset.asset_id;
    inst.description = description;
    inst.obb = instantiate(asset, description);
    inst.support_surface = asset.support_surface;

    const Poly2 shape = footprint_shape(inst.obb, rotation, scale);

    // Supports first: an `on`/`inside` constraint decides which grid the
    // object lives in and what height it rests at.
    const SpatialConstraint* support_c = support_constraint_of(instance_id);
    const ObjectInstance* parent = nullptr;
    double rest_z = 0.0;
    std::string grid_key;
    if (support_c) {
        parent = find(support_c->reference);
        if (!parent)
            raise(errc::unknown_instance,
                  "support reference '" + support_c->reference + "' is not placed yet");
        if (support_c->predicate == Predicate::on) {
            const auto top = parent->support_top();
            rest_z = top ? *top : parent->transform.translation.z +
                                      parent->obb.half_extents.z * 2.0 * parent->transform.scale.z;
        } else { // inside: rest on the container's floor
            rest_z = parent->transform.translation.z;
        }
        ensure_support_grid(*parent);
        grid_key = parent->instance_id;
    }

    Vec3 position;
    if (placement.target) {
        if (!grid.contains(placement.target->xy()))
            raise(errc::out_of_extent, "target outside scene extent for '" + instance_id + "'");
        position = *placement.target;
        inst.placed_by = PlacedBy::instructed;
    } else {
        OccupancyGrid& g = grid_for(grid_key);
        // Directional hints (near/left_of/...) pull the search focus toward
        // the ideal spot; otherwise scan from the grid center outward.
        Vec2 focus = g.extent_center();
        for (const auto& c : constraints) {
            if (c.subject != instance_id) continue;
            const ObjectInstance* ref = find(c.reference);
            if (!ref) continue;
            const Vec2 ref_xy = ref->transform.translation.xy();
            switch (c.predicate) {
            case Predicate::near: focus = ref_xy; break;
            case Predicate::left_of: focus = {ref_xy.x - 1e-3, ref_xy.y}; break;
            case Predicate::right_of: focus = {ref_xy.x + 1e-3, ref_xy.y}; break;
            case Predicate::in_front_of: focus = {ref_xy.x, ref_xy.y - 1e-3}; break;
            case Predicate::behind: focus = {ref_xy.x, ref_xy.y + 1e-3}; break;
            default: break;
            }
        }
        const auto spot = g.find_free_region(shape, params_.clearance, focus);
        if (!spot) raise(errc::no_free_region, "no free region for '" + instance_id + "'");
        position = {spot->x, spot->y, rest_z};
        inst.placed_by = PlacedBy::automatic;
    }

    inst.transform = compose_transform(position, rotation, scale);
    inst.footprint = translated(shape, position.xy());

    if (support_c && parent) support_index[instance_id] = {parent->instance_id, rest_z};

    instances.push_back(std::move(inst));
    ObjectInstance& stored = instances.back();
    mark_instance(stored, grid_key);
    record_overlaps(stored);
    return stored;
}

void SceneLayout::place_instructed(const std::string& instance_id, const Vec3& target) {
    ObjectInstance* inst = find(instance_id);
    if (!inst) raise(errc::unknown_instance, instance_id);
    if (!grid.contains(target.xy())) raise(errc::out_of_extent, "target outside scene extent");
    const std::string grid_key = marks_.count(instance_id) ? marks_[instance_id].grid_key : std::string();
    unmark_instance(instance_id);
    const Poly2 shape = footprint_shape(inst->obb, inst->transform.rotation, inst->transform.scale);
    inst->transform.translation = target;
    inst->footprint = translated(shape, target.xy());
    inst->placed_by = PlacedBy::instructed;
    mark_instance(*inst, grid_key);
    record_overlaps(*inst);
}

bool SceneLayout::relocate_free(const std::string& instance_id, const Vec2& focus) {
    ObjectInstance* inst = find(instance_id);
    if (!inst) raise(errc::unknown_instance, instance_id);
    const std::string grid_key = marks_.count(instance_id) ? marks_[instance_id].grid_key : std::string();
    unmark_instance(instance_id);
    const Poly2 shape = footprint_shape(inst->obb, inst->transform.rotation, inst->transform.scale);
    const auto spot = grid_for(grid_key).find_free_region(shape, params_.clearance, focus);
    if (!spot) {
        mark_instance(*inst, grid_key); // restore
        return false;
    }
    double z = inst->transform.translation.z;
    const auto sup = support_index.find(instance_id);
    if (sup != support_index.end()) z = sup->second.height;
    inst->transform.translation = {spot->x, spot->y, z};
    inst->footprint = translated(shape, *spot);
    mark_instance(*inst, grid_key);
    return true;
}

void SceneLayout::set_bottom_height(const std::string& instance_id, double z) {
    ObjectInstance* inst = find(instance_id);
    if (!inst) raise(errc::unknown_instance, instance_id);
    inst->transform.translation.z = z;
}

void SceneLayout::remove(const std::string& instance_id) {
    const auto it = std::find_if(instances.begin(), instances.end(),
                                 [&](const ObjectInstance& i) { return i.instance_id == instance_id; });
    if (it == instances.end()) raise(errc::unknown_instance, instance_id);
    unmark_instance(instance_id);
    support_index.erase(instance_id);
    support_grids_.erase(instance_id); // children of a removed support keep their marks recorded
    instances.erase(it);
}

const ObjectInstance& SceneLayout::instance(const std::string& instance_id) const {
    const ObjectInstance* p = find(instance_id);
    if (!p) raise(errc::unknown_instance, instance_id);
    return *p;
}

ObjectInstance* SceneLayout::find(const std::string& instance_id) {
    for (auto& i : instances)
        if (i.instance_id == instance_id) return &i;
    return nullptr;
}

const ObjectInstance* SceneLayout::find(const std::string& instance_id) const {
    for (const auto& i : instances)
        if (i.instance_id == instance_id) return &i;
    return nullptr;
}

int SceneLayout::ordinal_of(const std::string& instance_id) const {
    for (size_t i = 0; i < instances.size(); ++i)
        if (instances[i].instance_id == instance_id) return static_cast<int>(i) + 1;
    return 0;
}

std::pair<Vec3, Vec3> SceneLayout::world_bounds() const {
    if (instances.empty()) return {{-0.5, -0.5, 0.0}, {0.5, 0.5, 1.0}};
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (const auto& inst : instances) {
        for (const auto& c : inst.world_corners()) {
            lo.x = std::min(lo.x, c.x);
            lo.y = std::min(lo.y, c.y);
            lo.z = std::min(lo.z, c.z);
            hi.x = std::max(hi.x, c.x);
            hi.y = std::max(hi.y, c.y);
            hi.z = std::max(hi.z, c.z);
        }
    }
    return {lo, hi};
}

ProjectedObject project_object(const SceneLayout& layout, const std::string& instance_id,
                               const CameraIntrinsics& K, const CameraPose& E) {
    const ObjectInstance& inst = layout.instance(instance_id);
    ProjectedObject out;
    double u0 = 1e300, v0 = 1e300, u1 = -1e300, v1 = -1e300;
    for (const auto& c : inst.world_corners()) {
        const auto px = try_project(K, E, c);
        if (!px) continue;
        ++out.visible_corners;
        u0 = std::min(u0, px->u);
        v0 = std::min(v0, px->v);
        u1 = std::max(u1, px->u);
        v1 = std::max(v1, px->v);
    }
    if (out.visible_corners == 0)
        raise(errc::fully_behind_camera, "instance '" + instance_id + "' is behind the camera");
    out.u0 = std::clamp(u0, 0.0, static_cast<double>(K.width));
    out.v0 = std::clamp(v0, 0.0, static_cast<double>(K.height));
    out.u1 = std::clamp(u1, 0.0, static_cast<double>(K.width));
    out.v1 = std::clamp(v1, 0.0, static_cast<double>(K.height));
    out.center = try_project(K, E, inst.transform.translation);
    return out;
}

// ---------------------------------------------------------------------------

SceneLayout build_layout(const SceneDecomposition& decomposition, const AssetRepository& repo,
                         const BuildParams& params) {
    decomposition.validate();
    SceneLayout layout(params.layout);

    struct Item {
        const SubScene* scene;
        const AssetRequest* request;
    };
    std::vector<Item> items;
    for (const auto& s : decomposition.sub_scenes) {
        for (const auto& a : s.assets) items.push_back({&s, &a});
        for (const auto& c : s.constraints) layout.constraints.push_back(c);
    }

    // Dependency order: anything referenced by a constraint goes before its
    // subject, so supports exist when children arrive. Stable within ties.
    std::map<std::string, std::vector<std::string>> deps; // subject -> references
    for (const auto& c : layout.constraints) deps[c.subject].push_back(c.reference);
    std::vector<Item> ordered;
    std::map<std::string, bool> placed;
    while (ordered.size() < items.size()) {
        bool progress = false;
        for (const auto& item : items) {
            if (placed[item.request->label]) continue;
            bool ready = true;
            for (const auto& ref : deps[item.request->label])
                if (!placed[ref]) ready = false;
            if (ready) {
                ordered.push_back(item);
                placed[item.request->label] = true;
                progress = true;
            }
        }
        if (!progress) { // constraint cycle: fall back to listed order
            for (const auto& item : items)
                if (!placed[item.request->label]) {
                    ordered.push_back(item);
                    placed[item.request->label] = true;
                }
        }
    }

    Rng rng(params.seed);
    for (const auto& item : ordered) {
        const AssetRequest& req = *item.request;
        const AssetRecord* asset = repo.find(req.resolved_id.empty() ? req.query : req.resolved_id);
        if (!asset) raise(errc::unresolvable_asset, "request '" + req.label + "' resolves to nothing");

        Rotation rot = Rotation::identity();
        if (req.yaw_deg) rot = Rotation::yaw(deg_to_rad(*req.yaw_deg));
        else if (params.random_yaw) rot = Rotation::yaw(rng.uniform(0.0, 2.0 * kPi));

        Vec3 scale{1.0, 1.0, 1.0};
        if (req.scale) {
            const double s = std::clamp(*req.scale, params.scale_min, params.scale_max);
            scale = {s, s, s};
        }

        Placement placement;
        for (const auto& p : item.scene->placements)
            if (p.label == req.label) placement.target = p.target;

        layout.insert(*asset, req.label, asset->description, placement, rot, scale);
    }
    return layout;
}

} // namespace fyi
