#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "forge/asset_catalog.hpp"
#include "forge/camera_raster.hpp"
#include "forge/caption_grammar.hpp"
#include "forge/scene_sampler.hpp"

namespace forge {

inline constexpr int kManifestFormatVersion = 1;
inline constexpr const char* kManifestFile = "manifest.jsonl";
inline constexpr const char* kManifestHeaderFile = "manifest_header.json";

struct ManifestRecord {
    std::string sample_id;
    int video_id = 0;
    int frame_index = 0;
    int camera_id = 0;
    std::string rgb, depth, instance_mask, category_mask, metadata;  // relative to the dataset root
    std::string caption;
    std::uint64_t caption_seed = 0;
    bool operator==(const ManifestRecord&) const = default;
};

struct FailedVideo {
    int video = 0;
    std::string reason;
};

struct ManifestHeader {
    int format_version = kManifestFormatVersion;
    std::uint64_t master_seed = 0;
    std::string config_digest;
    std::string catalog_digest;
    int videos = 0;  // successfully generated
    int frames = 0;
    std::size_t samples = 0;
    std::vector<FailedVideo> failed_videos;
};

struct DatasetManifest {
    ManifestHeader header;
    std::vector<ManifestRecord> records;
};

class GenerationAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GenerateOptions {
    int workers = 1;
    std::string config_digest;  // digest of the config bytes as read
};

/// Worker count from FORGE_WORKERS, else 1.
int default_worker_count();

/// The viewpoints_per_frame camera ids rendered at frame t, sampled without replacement (ascending).
std::vector<int> pick_viewpoints(const GenerationConfig& cfg, const SceneInstance& scene, int t);

std::uint64_t caption_seed_for(const GenerationConfig& cfg, int video, int frame, int camera);

/// Metadata for one rendered view; only instances at or above the visibility threshold are listed.
FrameMetadata build_frame_metadata(const GenerationConfig& cfg, const AssetCatalog& catalog, const SceneInstance& scene,
                                   const FrameState& frame, const Camera& camera, const FrameBuffers& buffers,
                                   const RelationSet& relations);

/// sample → settle → advance → rasterize → extract → caption → write. Manifest files are written last.
DatasetManifest generate_dataset(const GenerationConfig& cfg, const AssetCatalog& catalog,
                                 const std::filesystem::path& out_dir, const GenerateOptions& options = {});

/// Accepts the dataset directory or the manifest.jsonl path.
DatasetManifest load_manifest(const std::filesystem::path& path);
std::filesystem::path dataset_root(const std::filesystem::path& manifest_path);

struct DatasetStats {
    std::size_t samples = 0;
    std::size_t videos = 0;
    std::map<std::string, std::size_t> colors, materials, sizes, predicates, actions;
    int min_objects = 0, max_objects = 0, min_humans = 0, max_humans = 0;
    std::vector<std::string> missing_files;
};

DatasetStats dataset_stats(const std::filesystem::path& manifest_path);
std::string stats_to_text(const DatasetStats& stats);
std::string stats_to_json(const DatasetStats& stats);

/// Re-runs the grammar on stored metadata. Unset arguments fall back to the stored values.
CaptionDoc recaption(const std::filesystem::path& metadata_path, std::optional<CaptionMode> mode = {},
                     std::optional<StatementWeights> weights = {}, std::optional<std::uint64_t> seed = {});

}  // namespace forge
