#include "fyi/instruction.hpp"

#include <set>

namespace fyi {

const char* predicate_name(Predicate p) {
    switch (p) {
    case Predicate::on: return "on";
    case Predicate::above: return "above";
    case Predicate::left_of: return "left_of";
    case Predicate::right_of: return "right_of";
    case Predicate::in_front_of: return "in_front_of";
    case Predicate::behind: return "behind";
    case Predicate::near: return "near";
    case Predicate::inside: return "inside";
    }
    return "on";
}

std::optional<Predicate> predicate_from_name(const std::string& name) {
    static const std::pair<const char*, Predicate> table[] = {
        {"on", Predicate::on},
        {"above", Predicate::above},
        {"left_of", Predicate::left_of},
        {"right_of", Predicate::right_of},
        {"in_front_of", Predicate::in_front_of},
        {"behind", Predicate::behind},
        {"near", Predicate::near},
        {"inside", Predicate::inside},
    };
    for (const auto& [n, p] : table)
        if (name == n) return p;
    return std::nullopt;
}

json SpatialConstraint::to_json() const {
    json j{{"predicate", predicate_name(predicate)},
           {"subject", subject},
           {"reference", reference},
           {"view", reference_view}};
    if (param) j["param"] = *param;
    return j;
}

SpatialConstraint SpatialConstraint::from_json(const json& j) {
    SpatialConstraint c;
    const auto p = predicate_from_name(j.at("predicate").get<std::string>());
    if (!p) raise(errc::schema_error, "unknown predicate '" + j.at("predicate").get<std::string>() + "'");
    c.predicate = *p;
    c.subject = j.at("subject").get<std::string>();
    c.reference = j.at("reference").get<std::string>();
    if (j.contains("param") && !j.at("param").is_null()) c.param = j.at("param").get<double>();
    if (j.contains("view")) c.reference_view = j.at("view").get<int>();
    return c;
}

std::string constraint_text(const SpatialConstraint& c) {
    std::string s = std::string(predicate_name(c.predicate)) + "(" + c.subject + ", " + c.reference;
    if (c.param) s += ", " + format_double(*c.param);
    s += ")";
    return s;
}

static json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

static Vec3 vec3_from(const json& j) {
    if (!j.is_array() || j.size() != 3) raise(errc::schema_error, "expected [x,y,z] array");
    return Vec3{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json SceneDecomposition::to_json() const {
    json scenes = json::array();
    for (const auto& s : sub_scenes) {
        json assets = json::array();
        for (const auto& a : s.assets) {
            json ja{{"label", a.label}, {"query", a.query}};
            if (!a.resolved_id.empty()) ja["resolved_id"] = a.resolved_id;
            if (a.yaw_deg) ja["yaw_deg"] = *a.yaw_deg;
            if (a.scale) ja["scale"] = *a.scale;
            assets.push_back(std::move(ja));
        }
        json constraints = json::array();
        for (const auto& c : s.constraints) constraints.push_back(c.to_json());
        json placements = json::array();
        for (const auto& p : s.placements)
            placements.push_back(json{{"label", p.label}, {"target", vec3_json(p.target)}});
        scenes.push_back(json{{"description", s.description},
                              {"assets", std::move(assets)},
                              {"constraints", std::move(constraints)},
                              {"placements", std::move(placements)}});
    }
    return json{{"sub_scenes", std::move(scenes)}};
}

SceneDecomposition SceneDecomposition::from_json(const json& j) {
    SceneDecomposition d;
    if (!j.is_object() || !j.contains("sub_scenes") || !j.at("sub_scenes").is_array())
        raise(errc::schema_error, "decomposition must contain a sub_scenes array");
    for (const auto& js : j.at("sub_scenes")) {
        SubScene s;
        s.description = js.value("description", "");
        for (const auto& ja : js.value("assets", json::array())) {
            AssetRequest a;
            a.label = ja.at("label").get<std::string>();
            a.query = ja.at("query").get<std::string>();
            if (ja.contains("resolved_id")) a.resolved_id = ja.at("resolved_id").get<std::string>();
            if (ja.contains("yaw_deg")) a.yaw_deg = ja.at("yaw_deg").get<double>();
            if (ja.contains("scale")) a.scale = ja.at("scale").get<double>();
            s.assets.push_back(std::move(a));
        }
        for (const auto& jc : js.value("constraints", json::array()))
            s.constraints.push_back(SpatialConstraint::from_json(jc));
        for (const auto& jp : js.value("placements", json::array()))
            s.placements.push_back(ExplicitPlacement{jp.at("label").get<std::string>(),
                                                     vec3_from(jp.at("target"))});
        d.sub_scenes.push_back(std::move(s));
    }
    return d;
}

void SceneDecomposition::validate() const {
    if (sub_scenes.empty()) raise(errc::schema_error, "decomposition has no sub-scenes");
    std::set<std::string> labels;
    for (const auto& s : sub_scenes)
        for (const auto& a : s.assets) {
            if (a.label.empty() || a.query.empty())
                raise(errc::schema_error, "asset request needs a label and a query");
            if (!labels.insert(a.label).second)
                raise(errc::schema_error, "duplicate asset label '" + a.label + "'");
        }
    for (const auto& s : sub_scenes) {
        for (const auto& c : s.constraints) {
            if (c.subject == c.reference)
                raise(errc::schema_error, "constraint subject equals reference: " + c.subject);
            if (!labels.count(c.subject) || !labels.count(c.reference))
                raise(errc::schema_error, "constraint references undeclared label in " + constraint_text(c));
        }
        for (const auto& p : s.placements) {
            if (!labels.count(p.label))
                raise(errc::schema_error, "placement references undeclared label '" + p.label + "'");
            if (!p.target.finite()) raise(errc::schema_error, "placement target must be finite");
        }
    }
}

} // namespace fyi
