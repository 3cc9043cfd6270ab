#pragma once

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "forge/asset_catalog.hpp"
#include "forge/caption_grammar.hpp"
#include "forge/rng.hpp"
#include "forge/scene_sampler.hpp"

namespace forge::test {

inline std::filesystem::path data_dir() { return FORGE_DATA_DIR; }
inline std::filesystem::path demo_catalog_path() { return data_dir() / "demo_catalog.json"; }

inline const AssetCatalog& demo_catalog() {
    static const AssetCatalog catalog = load_catalog(demo_catalog_path());
    return catalog;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("forge_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::permissions(path_, std::filesystem::perms::owner_all, ec);
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

/// A random but well-formed FrameMetadata record: up to 8 objects, up to 4 humans, and an
/// antisymmetric relation set over some of the entity pairs.
inline FrameMetadata random_metadata(std::uint64_t seed) {
    static const char* kNouns[] = {"chair", "apple", "table", "ice bucket", "umbrella", "vase", "owl figurine", "box"};
    static const char* kColors[] = {"red", "orange", "blue", "ivory", "green", "amber"};
    static const char* kSizes[] = {"small", "medium", "large"};
    static const char* kMaterials[] = {"oak", "aluminum", "glass", "porcelain", "cardboard"};
    static const char* kEnvs[] = {"living room", "empty kitchen with tiled floors", "open park", "attic"};
    static const char* kActions[] = {"walks forward", "waves with the right hand", "stands still", "jogs forward"};
    static const char* kClothing[] = {"wears a red shirt", "has short hair", "wears blue jeans", "has a beard"};

    RandomStream rs(seed, {"test-metadata"});
    FrameMetadata md;
    md.env_id = "env";
    md.scene_description = kEnvs[rs.index(4)];
    int next_id = 1;
    const int n_obj = static_cast<int>(rs.uniform_int(1, 8));
    for (int i = 0; i < n_obj; ++i) {
        ObjectEntry o;
        o.instance_id = next_id++;
        o.object_id = "obj_" + std::to_string(i);
        o.noun = kNouns[rs.index(8)];
        o.category = o.noun;
        o.color = kColors[rs.index(6)];
        o.size = kSizes[rs.index(3)];
        o.material = kMaterials[rs.index(5)];
        o.show_size = rs.bernoulli(0.7);
        o.show_color = rs.bernoulli(0.7);
        o.show_material = rs.bernoulli(0.7);
        o.pixels = 25 + rs.index(1000);
        md.objects.push_back(o);
    }
    const int n_hum = static_cast<int>(rs.uniform_int(0, 4));
    for (int k = 0; k < n_hum; ++k) {
        HumanEntry h;
        h.instance_id = next_id++;
        h.ordinal = k + 1;
        h.gender = "neutral";
        h.clothing_id = "cl";
        h.action = kActions[rs.index(4)];
        const auto n_cloth = rs.index(3);
        for (std::size_t c = 0; c < n_cloth; ++c) h.clothing.push_back(kClothing[rs.index(4)]);
        h.pixels = 25 + rs.index(1000);
        md.humans.push_back(h);
    }
    md.scene_objects = n_obj;
    md.scene_humans = n_hum;
    for (int a = 1; a < next_id; ++a) {
        for (int b = a + 1; b < next_id; ++b) {
            const auto lr = rs.index(3);  // 0: none, 1: a left of b, 2: b left of a
            if (lr == 1) md.relations.relations.push_back({a, Predicate::left_of, b}), md.relations.relations.push_back({b, Predicate::right_of, a});
            if (lr == 2) md.relations.relations.push_back({b, Predicate::left_of, a}), md.relations.relations.push_back({a, Predicate::right_of, b});
            const auto fb = rs.index(3);
            if (fb == 1) md.relations.relations.push_back({a, Predicate::in_front_of, b}), md.relations.relations.push_back({b, Predicate::behind, a});
            if (fb == 2) md.relations.relations.push_back({b, Predicate::in_front_of, a}), md.relations.relations.push_back({a, Predicate::behind, b});
        }
    }
    std::sort(md.relations.relations.begin(), md.relations.relations.end());
    md.caption_seed = rs.next_u64();
    return md;
}

struct RandomFrame {
    SceneInstance scene;
    FrameState state;
    FramePrimitives primitives;
    Camera camera;
};

/// A settled demo-catalog scene at a random frame seen from one of its rig cameras.
/// Scenes that fail placement are skipped by advancing the video index.
inline RandomFrame random_frame(std::uint64_t seed, int index, int size = 128) {
    GenerationConfig cfg;
    cfg.seed = seed;
    cfg.frames_per_video = 30;
    cfg.image_width = cfg.image_height = size;
    const AssetCatalog& cat = demo_catalog();
    for (int v = index;; v += 100000) {
        try {
            RandomFrame f;
            f.scene = settle_physics(sample_scene(cfg, cat, v), cat);
            RandomStream pick(seed, {"test-frame", v});
            const int t = static_cast<int>(pick.index(static_cast<std::size_t>(cfg.frames_per_video)));
            f.state = advance_frame(f.scene, cat, t);
            f.primitives = build_primitives(f.scene, f.state, cat);
            f.camera = f.scene.cameras.cameras[pick.index(f.scene.cameras.cameras.size())];
            return f;
        } catch (const PlacementFailure&) {
        }
    }
}

}  // namespace forge::test
