#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "forge/asset_catalog.hpp"
#include "forge/camera_raster.hpp"
#include "forge/geometry.hpp"

namespace forge {

struct CountRange {
    int lo = 0;
    int hi = 0;
    bool operator==(const CountRange&) const = default;
};

enum class CaptionMode { full, sampled };
std::string_view to_string(CaptionMode m);
std::optional<CaptionMode> parse_caption_mode(std::string_view s);

/// Keep probabilities per statement category; only `relation` and `clothing` are sampled.
struct StatementWeights {
    double prefix_enumeration = 1.0;
    double scene = 1.0;
    double relation = 0.5;
    double action = 1.0;
    double clothing = 0.7;
    bool operator==(const StatementWeights&) const = default;
};

struct GenerationConfig {
    std::uint64_t seed = 0;
    CountRange n_object_range{1, 8};
    CountRange n_human_range{0, 4};
    CountRange n_camera_range{4, 12};
    int viewpoints_per_frame = 4;
    int frames_per_video = 1500;
    int n_videos = 1;
    bool randomize_color = true;
    bool randomize_size = true;
    bool randomize_material = true;
    bool physics_enabled = true;
    bool multi_human_enabled = true;
    ClothingSource clothing_source = ClothingSource::multigarment;
    CaptionMode caption_mode = CaptionMode::full;
    StatementWeights statement_weights;
    int max_place_attempts = 64;
    int image_width = 128;
    int image_height = 128;
    double vertical_fov = kPi / 3;

    /// Empty when valid; otherwise one message per violated invariant.
    std::vector<std::string> problems() const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses a JSON config document; unknown keys are rejected. Missing keys keep defaults.
GenerationConfig parse_generation_config(std::string_view bytes);
std::string generation_config_to_json(const GenerationConfig& cfg);

struct PlacedObject {
    int instance_id = 0;
    std::size_t object_index = 0;
    std::size_t material_index = 0;
    std::size_t color_index = 0;
    double scale = 1.0;
    Vec3 extent;    // base_extent * scale
    Vec3 position;  // box centre
    double yaw = 0;

    Aabb collider() const { return yawed_box_bounds(position, extent * 0.5, yaw); }
    bool operator==(const PlacedObject&) const = default;
};

struct PlacedHuman {
    int instance_id = 0;
    std::size_t template_index = 0;
    std::size_t clothing_index = 0;
    std::size_t motion_index = 0;
    Vec3 start_position;  // root on the floor
    double start_heading = 0;
    int motion_start_frame = 0;
    bool operator==(const PlacedHuman&) const = default;
};

struct SceneInstance {
    int scene_id = 0;  // video index
    std::size_t env_index = 0;
    std::vector<PlacedObject> objects;
    std::vector<PlacedHuman> humans;
    CameraRig cameras;
    std::uint64_t rng_trace_seed = 0;
    bool physics_enabled = true;
    int max_place_attempts = 64;
    int frames_per_video = 1;
    bool operator==(const SceneInstance&) const = default;
};

struct HumanPose {
    int instance_id = 0;
    Vec3 position;
    double heading = 0;
    int clip_frame = 0;
    std::string action;
    bool frozen = false;
    bool operator==(const HumanPose&) const = default;
};

struct FrameState {
    int scene_id = 0;
    int frame_index = 0;
    std::vector<HumanPose> humans;
    bool operator==(const FrameState&) const = default;
};

class PlacementFailure : public std::runtime_error {
public:
    PlacementFailure(int scene_id, const std::string& what)
        : std::runtime_error("scene " + std::to_string(scene_id) + ": " + what), scene_id(scene_id) {}
    int scene_id;
};

/// Raw sample for video `video_index`: counts, identities, attributes and unsettled poses.
/// Every randomized aspect uses its own substream keyed by (seed, video, entity, aspect).
SceneInstance sample_scene(const GenerationConfig& cfg, const AssetCatalog& catalog, int video_index);

/// Drops objects to the floor and re-samples overlapping entities. Identity when physics is off.
SceneInstance settle_physics(const SceneInstance& scene, const AssetCatalog& catalog);

/// Union of capsule bounds for a human at the given root pose.
Aabb human_collider(const HumanTemplate& tmpl, const Vec3& position, double heading);
std::vector<Capsule> human_capsules(const HumanTemplate& tmpl, const Vec3& position, double heading);

/// Unclipped pose of a human at frame t: start pose composed with the (wrapped) clip sample.
HumanPose raw_human_pose(const PlacedHuman& human, const AssetCatalog& catalog, int t);

/// Per human in scene order, the frame at which it freezes after touching an object, if any.
struct MotionPlan {
    std::vector<std::optional<int>> freeze_frame;
};
MotionPlan plan_motion(const SceneInstance& scene, const AssetCatalog& catalog);

FrameState advance_frame(const SceneInstance& scene, const AssetCatalog& catalog, const MotionPlan& plan, int t);
FrameState advance_frame(const SceneInstance& scene, const AssetCatalog& catalog, int t);

/// Renderable proxies for one frame: a yawed box per object, the collider capsules per human.
FramePrimitives build_primitives(const SceneInstance& scene, const FrameState& frame, const AssetCatalog& catalog);

}  // namespace forge
