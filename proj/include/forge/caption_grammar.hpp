#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "forge/camera_raster.hpp"
#include "forge/relation_extractor.hpp"
#include "forge/rng.hpp"
#include "forge/scene_sampler.hpp"

namespace forge {

struct FrameRef {
    int video = 0;
    int frame_index = 0;
    int camera = 0;
    bool operator==(const FrameRef&) const = default;
};

struct ObjectEntry {
    int instance_id = 0;
    std::string object_id;
    std::string noun;
    std::string category;
    std::string color;
    std::string size;
    std::string material;
    Vec3 position;
    // Whether each attribute is spoken; false only when its randomization is off.
    bool show_size = true;
    bool show_color = true;
    bool show_material = true;
    std::size_t pixels = 0;
    bool operator==(const ObjectEntry&) const = default;
};

struct HumanEntry {
    int instance_id = 0;
    int ordinal = 1;  // 1..k in instance order
    std::string gender;
    std::string clothing_id;
    std::string action;
    std::vector<std::string> clothing;
    Vec3 position;
    std::size_t pixels = 0;
    bool operator==(const HumanEntry&) const = default;
};

/// Structured per-frame record. Lists only instances that pass the visibility threshold;
/// `scene_objects` / `scene_humans` give the full scene counts.
struct FrameMetadata {
    FrameRef frame;
    std::string env_id;
    std::string scene_description;
    std::vector<ObjectEntry> objects;
    std::vector<HumanEntry> humans;
    RelationSet relations;
    Camera camera;
    int scene_objects = 0;
    int scene_humans = 0;
    std::uint64_t caption_seed = 0;
    CaptionMode caption_mode = CaptionMode::full;
    StatementWeights statement_weights;
    bool operator==(const FrameMetadata&) const = default;
};

std::string frame_metadata_to_json(const FrameMetadata& md);
FrameMetadata frame_metadata_from_json(std::string_view text);

enum class StatementCategory { prefix_enumeration, scene, relation, action, clothing };
std::string_view to_string(StatementCategory c);

struct Statement {
    StatementCategory category;
    std::string sentence;
    bool operator==(const Statement&) const = default;
};

struct CaptionDoc {
    std::vector<Statement> statements;
    std::string full_text;
    bool operator==(const CaptionDoc&) const = default;
};

/// "an" iff the first character (case-folded) is a vowel letter.
std::string_view indefinite_article(std::string_view phrase);
/// 1..4 -> "first".."fourth".
std::string_view ordinal(int n);
/// "<size> <color> <material> <noun>", skipping attributes that are not shown.
std::string object_noun_phrase(const ObjectEntry& obj);
/// Sentence form used for relation endpoints: "a red chair" / "the second person".
std::string entity_phrase(const FrameMetadata& md, int instance_id);

/// Dense caption. Relation sentences are shuffled (Fisher-Yates) with `stream`; in sampled
/// mode each relation/clothing statement is then kept with probability min(1, weight).
CaptionDoc compose_caption(const FrameMetadata& md, RandomStream& stream, CaptionMode mode,
                           const StatementWeights& weights);

inline constexpr std::string_view kCaptionPrefix = "This scene contains";
inline constexpr std::string_view kPromptPrefix = "Please describe a scene containing";
inline constexpr std::string_view kPromptSuffix = "In this scene, we can see";
inline constexpr int kParaphraseTokenBudget = 150;

struct ParaphrasePrompt {
    std::string text;
    int max_new_tokens = kParaphraseTokenBudget;
};

/// Throws std::invalid_argument if the caption does not start with the caption prefix.
ParaphrasePrompt build_paraphrase_prompt(std::string_view full_text);
ParaphrasePrompt build_paraphrase_prompt(const CaptionDoc& doc);
/// Inverse of build_paraphrase_prompt.
std::string caption_from_prompt(std::string_view prompt);

}  // namespace forge
