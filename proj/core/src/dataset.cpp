#include "fyi/dataset.hpp"

#include <cctype>
#include <cstring>
#include <fstream>

#include <openssl/evp.h>

namespace fyi {

// --- scene ---------------------------------------------------------------------

json scene_to_json(const SceneLayout& layout) {
    json instances = json::array();
    for (const auto& inst : layout.instances) {
        const Transform& t = inst.transform;
        instances.push_back(json{
            {"id", inst.instance_id},
            {"asset_id", inst.asset_id},
            {"position", json::array({t.translation.x, t.translation.y, t.translation.z})},
            {"rotation", json::array({t.rotation.w, t.rotation.x, t.rotation.y, t.rotation.z})},
            {"scale", json::array({t.scale.x, t.scale.y, t.scale.z})},
            {"bbox", json::array({inst.obb.half_extents.x * 2.0, inst.obb.half_extents.y * 2.0,
                                  inst.obb.half_extents.z * 2.0})}});
    }
    json constraints = json::array();
    for (const auto& c : layout.constraints) constraints.push_back(c.to_json());
    const double h = layout.params().extent * 0.5;
    return json{{"schema", 1},
                {"extent", json::array({-h, -h, h, h})},
                {"instances", std::move(instances)},
                {"constraints", std::move(constraints)}};
}

std::string export_scene(const SceneLayout& layout) { return canonical_bytes(scene_to_json(layout)); }

SceneLayout scene_from_json(const json& j, const AssetRepository& repo, const LayoutParams& params) {
    if (j.value("schema", 0) != 1) raise(errc::schema_error, "scene.json must declare \"schema\": 1");
    SceneLayout layout(params);
    for (const auto& jc : j.value("constraints", json::array()))
        layout.constraints.push_back(SpatialConstraint::from_json(jc));
    for (const auto& ji : j.value("instances", json::array())) {
        const std::string asset_id = ji.at("asset_id").get<std::string>();
        const AssetRecord* asset = repo.find(asset_id);
        if (!asset) raise(errc::unresolvable_asset, "scene references unknown asset '" + asset_id + "'");
        const auto& p = ji.at("position");
        const auto& r = ji.at("rotation");
        const auto& s = ji.at("scale");
        layout.insert(*asset, ji.at("id").get<std::string>(), asset->description,
                      Placement{Vec3{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()}},
                      Rotation(r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                               r[3].get<double>()),
                      Vec3{s[0].get<double>(), s[1].get<double>(), s[2].get<double>()});
    }
    return layout;
}

// --- images ----------------------------------------------------------------------

std::string export_depth(const RenderedView& view) {
    const int W = view.width(), H = view.height();
    std::string out = "Pf\n" + std::to_string(W) + " " + std::to_string(H) + "\n-1.0\n";
    out.reserve(out.size() + static_cast<size_t>(W) * H * 4);
    // Bottom row first, little-endian (the -1.0 scale declares the byte order).
    for (int r = H - 1; r >= 0; --r) {
        for (int c = 0; c < W; ++c) {
            const double d = view.depth_at(r, c);
            const float f = std::isfinite(d) ? static_cast<float>(d) : 0.0f;
            char bytes[4];
            std::memcpy(bytes, &f, 4);
            out.append(bytes, 4);
        }
    }
    return out;
}

namespace {

// Reads one whitespace-delimited header token starting at `pos`.
std::string next_token(const std::string& s, size_t& pos) {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    const size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    return s.substr(start, pos - start);
}

} // namespace

PfmImage read_pfm(const std::string& bytes) {
    size_t pos = 0;
    if (next_token(bytes, pos) != "Pf") raise(errc::schema_error, "not a grayscale PFM");
    PfmImage img;
    img.width = std::stoi(next_token(bytes, pos));
    img.height = std::stoi(next_token(bytes, pos));
    const double scale = std::stod(next_token(bytes, pos));
    if (scale >= 0.0) raise(errc::schema_error, "big-endian PFM not supported");
    ++pos; // single whitespace after the scale
    const size_t n = static_cast<size_t>(img.width) * img.height;
    if (bytes.size() - pos < n * 4) raise(errc::schema_error, "PFM payload truncated");
    img.pixels.resize(n);
    for (int r = img.height - 1; r >= 0; --r) {
        for (int c = 0; c < img.width; ++c) {
            float f;
            std::memcpy(&f, bytes.data() + pos, 4);
            pos += 4;
            img.pixels[static_cast<size_t>(r) * img.width + c] = f;
        }
    }
    return img;
}

std::string export_mask(const RenderedView& view) {
    if (view.solo_coverage.size() > 255)
        raise(errc::too_many_instances, "PGM masks carry at most 255 instances");
    const int W = view.width(), H = view.height();
    std::string out = "P5\n" + std::to_string(W) + " " + std::to_string(H) + "\n255\n";
    out.reserve(out.size() + static_cast<size_t>(W) * H);
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c) out.push_back(static_cast<char>(view.instance_at(r, c)));
    return out;
}

PgmImage read_pgm(const std::string& bytes) {
    size_t pos = 0;
    if (next_token(bytes, pos) != "P5") raise(errc::schema_error, "not a binary PGM");
    PgmImage img;
    img.width = std::stoi(next_token(bytes, pos));
    img.height = std::stoi(next_token(bytes, pos));
    const int maxval = std::stoi(next_token(bytes, pos));
    if (maxval != 255) raise(errc::schema_error, "only 8-bit PGM supported");
    ++pos;
    const size_t n = static_cast<size_t>(img.width) * img.height;
    if (bytes.size() - pos < n) raise(errc::schema_error, "PGM payload truncated");
    img.pixels.assign(bytes.begin() + pos, bytes.begin() + pos + n);
    return img;
}

// --- trajectories --------------------------------------------------------------------

json trajectory_json(const FrameSequence& seq, const CameraIntrinsics& K) {
    json out = json::array();
    for (size_t i = 0; i < seq.frames.size(); ++i) {
        const auto m = seq.frames[i].camera.to_matrix4();
        json ext = json::array();
        for (const double v : m) ext.push_back(v);
        out.push_back(json{{"frame", static_cast<int>(i)},
                           {"time_s", seq.frames[i].time_s},
                           {"extrinsic", std::move(ext)},
                           {"intrinsic", json{{"fx", K.fx}, {"fy", K.fy}, {"cx", K.cx}, {"cy", K.cy}}}});
    }
    return out;
}

json poses_json(const FrameSequence& seq) {
    json out = json::array();
    for (size_t i = 0; i < seq.frames.size(); ++i) {
        json objects = json::array();
        for (const auto& [id, t] : seq.frames[i].actors) {
            objects.push_back(json{
                {"id", id},
                {"position", json::array({t.translation.x, t.translation.y, t.translation.z})},
                {"rotation", json::array({t.rotation.w, t.rotation.x, t.rotation.y, t.rotation.z})}});
        }
        out.push_back(json{{"frame", static_cast<int>(i)},
                           {"time_s", seq.frames[i].time_s},
                           {"objects", std::move(objects)}});
    }
    return out;
}

// --- bundle -----------------------------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

void atomic_write(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::create_directories(path.parent_path());
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) raise(errc::config_error, "cannot write '" + tmp.string() + "'");
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) raise(errc::config_error, "short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace fyi
