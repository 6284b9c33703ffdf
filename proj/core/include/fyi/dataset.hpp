#pragma once

// Dataset serialization, bit-exact: canonical scene/plan/report JSON, PFM
// depth maps, binary PGM instance masks, camera trajectories and per-frame
// object poses, plus the end-to-end pipeline that produces a bundle.

#include <filesystem>
#include <string>

#include "fyi/config.hpp"
#include "fyi/optimize.hpp"
#include "fyi/plan.hpp"
#include "fyi/render.hpp"

namespace fyi {

// --- scene -------------------------------------------------------------------

json scene_to_json(const SceneLayout& layout);
std::string export_scene(const SceneLayout& layout); // canonical bytes

// Rebuilds instances, constraints and grid marks from scene.json. Assets are
// looked up by id for support surfaces.
SceneLayout scene_from_json(const json& j, const AssetRepository& repo, const LayoutParams& params);

// --- images ------------------------------------------------------------------

// Grayscale PFM: "Pf\n{W} {H}\n-1.0\n" then H*W little-endian float32,
// bottom row first. Background (+inf) is encoded as 0.
std::string export_depth(const RenderedView& view);

struct PfmImage {
    int width = 0, height = 0;
    std::vector<float> pixels; // row-major, top row first
};
PfmImage read_pfm(const std::string& bytes);

// Binary PGM (P5), one byte per pixel: the instance ordinal, 0 background.
// Raises too_many_instances past 255.
std::string export_mask(const RenderedView& view);

struct PgmImage {
    int width = 0, height = 0;
    std::vector<uint8_t> pixels;
};
PgmImage read_pgm(const std::string& bytes);

// --- trajectories ---------------------------------------------------------------

// [{"frame", "time_s", "extrinsic": [16 row-major world-to-camera floats],
//   "intrinsic": {"fx","fy","cx","cy"}}]
json trajectory_json(const FrameSequence& seq, const CameraIntrinsics& K);

// [{"frame", "time_s", "objects": [{"id", "position": [3], "rotation": [4]}]}]
json poses_json(const FrameSequence& seq);

// --- bundle ---------------------------------------------------------------------

std::string sha256_hex(const std::string& bytes);

// Write-temp-then-rename; creates parent directories.
void atomic_write(const std::filesystem::path& path, const std::string& bytes);

struct PipelineOptions {
    uint64_t seed = 0;
    std::string scene_name = "scene_0000";
    bool live = false; // use the HTTP gateway instead of the rule-table mocks
    int views = 0;     // 0 = take from config
    double threshold = 0.0; // 0 = take from config
};

// Exit codes shared by the pipeline and the CLI.
enum ExitCode : int {
    exit_ok = 0,
    exit_optimization_failed = 2,
    exit_refinement_nonconvergent = 3,
    exit_gateway_error = 4,
    exit_config_error = 5,
};

struct PipelineResult {
    int exit_code = exit_ok;
    json scene_manifest; // files of this scene with hashes
    bool optimization_passed = false;
    bool refinement_converged = false;
    int frames = 0;
    std::string error;
};

// collect -> layout -> optimize -> plan -> refine -> render+export one scene
// into out_dir/<scene_name>/. The returned manifest entry lists every file
// with byte length and content hash.
PipelineResult run_pipeline(const PipelineConfig& config, const std::string& config_hash,
                            const AssetRepository& repo, const PipelineOptions& options,
                            const std::filesystem::path& out_dir);

// Full bundle: runs `seeds.size()` scenes (scene index i uses seeds[i]) and
// writes out_dir/manifest.json. Scenes run concurrently up to `concurrency`.
json run_bundle(const PipelineConfig& config, const std::string& config_bytes,
                const std::vector<uint64_t>& seeds, const std::filesystem::path& out_dir,
                bool live = false, int concurrency = 0);

} // namespace fyi
