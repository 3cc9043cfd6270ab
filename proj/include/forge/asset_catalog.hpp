#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "forge/geometry.hpp"

namespace forge {

enum class SizeClass { small, medium, large };
enum class MaterialFamily { metal, cardboard, wood, ceramic, glass };
enum class Gender { male, female, neutral };
enum class ClothingSource { plain_color, surreal, multigarment };
enum class EnvKind { indoor, outdoor };

std::string_view to_string(SizeClass v);
std::string_view to_string(MaterialFamily v);
std::string_view to_string(Gender v);
std::string_view to_string(ClothingSource v);
std::string_view to_string(EnvKind v);

std::optional<SizeClass> parse_size_class(std::string_view s);
std::optional<MaterialFamily> parse_material_family(std::string_view s);
std::optional<ClothingSource> parse_clothing_source(std::string_view s);

/// small < 0.3 m max extent, medium < 1.0 m, else large.
SizeClass size_class_for(const Vec3& extent);

struct ObjectModel {
    std::string id;
    std::string noun;
    std::string category_label;
    SizeClass size_class = SizeClass::medium;
    Vec3 base_extent;  // (width, height, depth) metres
    std::vector<MaterialFamily> allowed_material_families;
    std::string default_color;
    std::size_t default_color_index = 0;
};

struct MaterialDef {
    std::string id;
    MaterialFamily family = MaterialFamily::wood;
    std::string name;
};

struct ColorDef {
    std::string id;
    std::string name;
    Vec3 rgb;
};

struct ColliderPart {
    std::string part;
    Capsule capsule;  // body frame: feet at y = 0, facing +z
};

struct HumanTemplate {
    Gender gender = Gender::neutral;
    Vec3 body_extent;
    std::vector<ColliderPart> collider_parts;
};

struct ClothingTexture {
    std::string id;
    ClothingSource source = ClothingSource::plain_color;
    std::vector<std::string> description_sentences;
    Vec3 tint;
};

struct ActionSegment {
    int start = 0;  // inclusive
    int end = 0;    // exclusive
    std::string action;
};

struct RootSample {
    Vec3 position;
    double heading = 0;
};

struct MotionClip {
    std::string id;
    double fps = 30;
    int n_frames = 0;
    std::vector<ActionSegment> action_segments;
    std::vector<RootSample> root_trajectory;

    /// Segment containing `frame`, or nullptr when uncovered.
    const ActionSegment* segment_at(int frame) const;
};

struct SceneEnv {
    std::string id;
    EnvKind kind = EnvKind::indoor;
    std::string description;
    FloorRect floor_extent;
    FloorRect spawn_region;
};

class CatalogError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Immutable after construction; share freely across threads by const reference.
struct AssetCatalog {
    std::vector<ObjectModel> objects;
    std::vector<MaterialDef> materials;
    std::vector<ColorDef> colors;
    std::vector<HumanTemplate> human_templates;
    std::vector<ClothingTexture> clothing_textures;
    std::vector<MotionClip> motion_clips;
    std::vector<SceneEnv> scene_envs;

    std::string digest;  // fnv1a64 of the source bytes

    std::optional<std::size_t> color_index(std::string_view id) const;

    /// Catalog-order indices of the materials in any of `families`.
    std::vector<std::size_t> materials_in(const std::vector<MaterialFamily>& families) const;
    /// First catalog material of the object's first allowed family.
    std::optional<std::size_t> default_material(const ObjectModel& obj) const;

    /// Category ids: sorted distinct object category labels get 1..K, "person" gets K+1
    /// (or its existing slot if an object already uses that label).
    std::vector<std::string> category_labels() const;
    int category_id(std::string_view label) const;
    int person_category_id() const;
};

struct Finding {
    std::string subject;
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
};

/// Structural parse and cross-linking only. Throws CatalogError on malformed JSON (with
/// the line number), schema errors, duplicate ids, and dangling references.
AssetCatalog parse_catalog(std::string_view bytes);

/// Checks every type invariant on an already-linked catalog.
ValidationReport validate_catalog(const AssetCatalog& catalog);

/// parse_catalog + validate_catalog; any finding is raised as CatalogError.
AssetCatalog load_catalog(const std::filesystem::path& path);

std::string read_file_bytes(const std::filesystem::path& path);
std::string digest_hex(std::string_view bytes);

}  // namespace forge
