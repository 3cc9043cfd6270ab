#include "forge/scene_sampler.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <set>

#include "json.hpp"

namespace forge {

using nlohmann::json;

namespace {

constexpr double kSizeScaleMin = 0.7;
constexpr double kSizeScaleMax = 1.3;
constexpr double kMaxDropHeight = 1.5;
constexpr double kRigCenterHeight = 0.6;

std::optional<double> sample_interval(RandomStream& rs, double lo, double hi) {
    if (hi < lo) return std::nullopt;
    return rs.uniform(lo, hi);
}

// Samples (x, z) for a body whose floor footprint, relative to its reference point, is
// [off_lo, off_hi]; returns nullopt when the footprint cannot fit in the region.
std::optional<std::pair<double, double>> sample_in_region(RandomStream& rs, const FloorRect& region, const Vec3& off_lo,
                                                          const Vec3& off_hi) {
    auto x = sample_interval(rs, region.x_min - off_lo.x, region.x_max - off_hi.x);
    auto z = sample_interval(rs, region.z_min - off_lo.z, region.z_max - off_hi.z);
    if (!x || !z) return std::nullopt;
    return std::pair{*x, *z};
}

CountRange effective_human_range(const GenerationConfig& cfg) {
    if (cfg.multi_human_enabled) return cfg.n_human_range;
    return {std::min(cfg.n_human_range.lo, 1), std::min(cfg.n_human_range.hi, 1)};
}

Aabb human_frame0_collider(const PlacedHuman& h, const AssetCatalog& catalog) {
    const HumanPose p = raw_human_pose(h, catalog, 0);
    return human_collider(catalog.human_templates[h.template_index], p.position, p.heading);
}

CountRange range_from_json(const json& j, const char* key) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ConfigError(std::string(key) + " must be [lo, hi] integers");
    return {j[0].get<int>(), j[1].get<int>()};
}

}  // namespace

std::string_view to_string(CaptionMode m) { return m == CaptionMode::full ? "full" : "sampled"; }

std::optional<CaptionMode> parse_caption_mode(std::string_view s) {
    if (s == "full") return CaptionMode::full;
    if (s == "sampled") return CaptionMode::sampled;
    return std::nullopt;
}

std::vector<std::string> GenerationConfig::problems() const {
    std::vector<std::string> out;
    auto check_range = [&](const CountRange& r, int lo, int hi, const char* name) {
        if (r.lo > r.hi) out.push_back(std::string(name) + ": lo > hi");
        if (r.lo < lo || r.hi > hi)
            out.push_back(std::string(name) + " must lie within [" + std::to_string(lo) + "," + std::to_string(hi) + "]");
    };
    check_range(n_object_range, 1, 8, "n_object_range");
    check_range(n_human_range, 0, 4, "n_human_range");
    check_range(n_camera_range, 4, 12, "n_camera_range");
    if (viewpoints_per_frame < 1 || viewpoints_per_frame > n_camera_range.lo)
        out.push_back("viewpoints_per_frame must be in [1, n_camera_range.lo]");
    if (frames_per_video < 1) out.push_back("frames_per_video must be >= 1");
    if (n_videos < 1) out.push_back("n_videos must be >= 1");
    if (max_place_attempts < 1) out.push_back("max_place_attempts must be >= 1");
    if (image_width < 16 || image_height < 16) out.push_back("image size must be at least 16x16");
    if (!(vertical_fov > 0 && vertical_fov < kPi)) out.push_back("vertical_fov must be in (0, pi)");
    for (double w : {statement_weights.prefix_enumeration, statement_weights.scene, statement_weights.relation,
                     statement_weights.action, statement_weights.clothing})
        if (!(std::isfinite(w) && w >= 0)) {
            out.push_back("statement weights must be finite and >= 0");
            break;
        }
    return out;
}

GenerationConfig parse_generation_config(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");
    GenerationConfig cfg;
    auto get_bool = [](const json& v, const std::string& k) {
        if (!v.is_boolean()) throw ConfigError(k + " must be a boolean");
        return v.get<bool>();
    };
    auto get_int = [](const json& v, const std::string& k) {
        if (!v.is_number_integer()) throw ConfigError(k + " must be an integer");
        return v.get<int>();
    };
    for (const auto& [key, v] : root.items()) {
        if (key == "seed") {
            if (!v.is_number_integer()) throw ConfigError("seed must be an integer");
            cfg.seed = v.is_number_unsigned() ? v.get<std::uint64_t>() : static_cast<std::uint64_t>(v.get<std::int64_t>());
        } else if (key == "n_object_range") cfg.n_object_range = range_from_json(v, "n_object_range");
        else if (key == "n_human_range") cfg.n_human_range = range_from_json(v, "n_human_range");
        else if (key == "n_camera_range") cfg.n_camera_range = range_from_json(v, "n_camera_range");
        else if (key == "viewpoints_per_frame") cfg.viewpoints_per_frame = get_int(v, key);
        else if (key == "frames_per_video") cfg.frames_per_video = get_int(v, key);
        else if (key == "n_videos") cfg.n_videos = get_int(v, key);
        else if (key == "randomize_color") cfg.randomize_color = get_bool(v, key);
        else if (key == "randomize_size") cfg.randomize_size = get_bool(v, key);
        else if (key == "randomize_material") cfg.randomize_material = get_bool(v, key);
        else if (key == "physics_enabled") cfg.physics_enabled = get_bool(v, key);
        else if (key == "multi_human_enabled") cfg.multi_human_enabled = get_bool(v, key);
        else if (key == "clothing_source") {
            auto src = v.is_string() ? parse_clothing_source(v.get<std::string>()) : std::nullopt;
            if (!src) throw ConfigError("clothing_source must be plain_color, surreal or multigarment");
            cfg.clothing_source = *src;
        } else if (key == "caption_mode") {
            auto mode = v.is_string() ? parse_caption_mode(v.get<std::string>()) : std::nullopt;
            if (!mode) throw ConfigError("caption_mode must be full or sampled");
            cfg.caption_mode = *mode;
        } else if (key == "statement_weights") {
            if (!v.is_object()) throw ConfigError("statement_weights must be an object");
            for (const auto& [cat, w] : v.items()) {
                if (!w.is_number()) throw ConfigError("statement weight " + cat + " must be a number");
                const double x = w.get<double>();
                if (cat == "prefix_enumeration") cfg.statement_weights.prefix_enumeration = x;
                else if (cat == "scene") cfg.statement_weights.scene = x;
                else if (cat == "relation") cfg.statement_weights.relation = x;
                else if (cat == "action") cfg.statement_weights.action = x;
                else if (cat == "clothing") cfg.statement_weights.clothing = x;
                else throw ConfigError("unknown statement category '" + cat + "'");
            }
        } else if (key == "max_place_attempts") cfg.max_place_attempts = get_int(v, key);
        else if (key == "image_width") cfg.image_width = get_int(v, key);
        else if (key == "image_height") cfg.image_height = get_int(v, key);
        else if (key == "vertical_fov") {
            if (!v.is_number()) throw ConfigError("vertical_fov must be a number");
            cfg.vertical_fov = v.get<double>();
        } else throw ConfigError("unknown config key '" + key + "'");
    }
    return cfg;
}

std::string generation_config_to_json(const GenerationConfig& c) {
    json j = {
        {"seed", c.seed},
        {"n_object_range", {c.n_object_range.lo, c.n_object_range.hi}},
        {"n_human_range", {c.n_human_range.lo, c.n_human_range.hi}},
        {"n_camera_range", {c.n_camera_range.lo, c.n_camera_range.hi}},
        {"viewpoints_per_frame", c.viewpoints_per_frame},
        {"frames_per_video", c.frames_per_video},
        {"n_videos", c.n_videos},
        {"randomize_color", c.randomize_color},
        {"randomize_size", c.randomize_size},
        {"randomize_material", c.randomize_material},
        {"physics_enabled", c.physics_enabled},
        {"multi_human_enabled", c.multi_human_enabled},
        {"clothing_source", std::string(to_string(c.clothing_source))},
        {"caption_mode", std::string(to_string(c.caption_mode))},
        {"statement_weights",
         {{"prefix_enumeration", c.statement_weights.prefix_enumeration},
          {"scene", c.statement_weights.scene},
          {"relation", c.statement_weights.relation},
          {"action", c.statement_weights.action},
          {"clothing", c.statement_weights.clothing}}},
        {"max_place_attempts", c.max_place_attempts},
        {"image_width", c.image_width},
        {"image_height", c.image_height},
        {"vertical_fov", c.vertical_fov},
    };
    return j.dump(2);
}

std::vector<Capsule> human_capsules(const HumanTemplate& tmpl, const Vec3& position, double heading) {
    std::vector<Capsule> out;
    out.reserve(tmpl.collider_parts.size());
    for (const auto& part : tmpl.collider_parts)
        out.push_back({position + rotate_yaw(part.capsule.p0, heading), position + rotate_yaw(part.capsule.p1, heading),
                       part.capsule.radius});
    return out;
}

Aabb human_collider(const HumanTemplate& tmpl, const Vec3& position, double heading) {
    Aabb box;
    for (const auto& c : human_capsules(tmpl, position, heading)) box.expand(capsule_bounds(c));
    return box;
}

HumanPose raw_human_pose(const PlacedHuman& human, const AssetCatalog& catalog, int t) {
    const MotionClip& clip = catalog.motion_clips[human.motion_index];
    const int f = static_cast<int>((static_cast<long long>(human.motion_start_frame) + t) % clip.n_frames);
    const RootSample& s = clip.root_trajectory[static_cast<std::size_t>(f)];
    HumanPose pose;
    pose.instance_id = human.instance_id;
    pose.position = human.start_position + rotate_yaw(s.position, human.start_heading);
    pose.heading = human.start_heading + s.heading;
    pose.clip_frame = f;
    if (const ActionSegment* seg = clip.segment_at(f)) pose.action = seg->action;
    return pose;
}

SceneInstance sample_scene(const GenerationConfig& cfg, const AssetCatalog& catalog, int video_index) {
    const std::uint64_t seed = cfg.seed;
    const int v = video_index;
    SceneInstance scene;
    scene.scene_id = v;
    scene.physics_enabled = cfg.physics_enabled;
    scene.max_place_attempts = cfg.max_place_attempts;
    scene.frames_per_video = cfg.frames_per_video;
    scene.rng_trace_seed = derive_seed(seed, {"settle", v});

    RandomStream layout(seed, {"scene", v});
    scene.env_index = layout.index(catalog.scene_envs.size());
    const int n_objects = static_cast<int>(layout.uniform_int(cfg.n_object_range.lo, cfg.n_object_range.hi));
    const CountRange hr = effective_human_range(cfg);
    const int n_humans = static_cast<int>(layout.uniform_int(hr.lo, hr.hi));
    const int n_cameras = static_cast<int>(layout.uniform_int(cfg.n_camera_range.lo, cfg.n_camera_range.hi));
    const FloorRect& region = catalog.scene_envs[scene.env_index].spawn_region;

    for (int i = 0; i < n_objects; ++i) {
        PlacedObject po;
        po.instance_id = i + 1;
        po.object_index = RandomStream(seed, {"object", v, i, "identity"}).index(catalog.objects.size());
        const ObjectModel& model = catalog.objects[po.object_index];

        if (cfg.randomize_material) {
            const auto candidates = catalog.materials_in(model.allowed_material_families);
            if (candidates.empty()) throw PlacementFailure(v, "object '" + model.id + "' has no usable material");
            po.material_index = candidates[RandomStream(seed, {"object", v, i, "material"}).index(candidates.size())];
        } else {
            auto m = catalog.default_material(model);
            if (!m) throw PlacementFailure(v, "object '" + model.id + "' has no default material");
            po.material_index = *m;
        }
        po.color_index = cfg.randomize_color
                             ? RandomStream(seed, {"object", v, i, "color"}).index(catalog.colors.size())
                             : model.default_color_index;
        po.scale = cfg.randomize_size ? RandomStream(seed, {"object", v, i, "size"}).uniform(kSizeScaleMin, kSizeScaleMax)
                                      : 1.0;
        po.extent = model.base_extent * po.scale;

        RandomStream pose(seed, {"object", v, i, "pose"});
        po.yaw = pose.uniform(0.0, 2.0 * kPi);
        const Aabb local = yawed_box_bounds({0, 0, 0}, po.extent * 0.5, po.yaw);
        auto xz = sample_in_region(pose, region, local.lo, local.hi);
        if (!xz) throw PlacementFailure(v, "object '" + model.id + "' does not fit in the spawn region");
        po.position = {xz->first, 0.5 * po.extent.y + pose.uniform(0.0, kMaxDropHeight), xz->second};
        scene.objects.push_back(po);
    }

    std::vector<std::size_t> wardrobe;
    for (std::size_t k = 0; k < catalog.clothing_textures.size(); ++k)
        if (catalog.clothing_textures[k].source == cfg.clothing_source) wardrobe.push_back(k);
    if (n_humans > 0 && wardrobe.empty())
        throw PlacementFailure(v, "catalog has no clothing textures of source '" +
                                      std::string(to_string(cfg.clothing_source)) + "'");

    for (int j = 0; j < n_humans; ++j) {
        PlacedHuman ph;
        ph.instance_id = n_objects + j + 1;
        ph.template_index = RandomStream(seed, {"human", v, j, "template"}).index(catalog.human_templates.size());
        ph.clothing_index = wardrobe[RandomStream(seed, {"human", v, j, "clothing"}).index(wardrobe.size())];
        RandomStream motion(seed, {"human", v, j, "motion"});
        ph.motion_index = motion.index(catalog.motion_clips.size());
        ph.motion_start_frame =
            static_cast<int>(motion.uniform_int(0, catalog.motion_clips[ph.motion_index].n_frames - 1));
        RandomStream pose(seed, {"human", v, j, "pose"});
        ph.start_heading = pose.uniform(0.0, 2.0 * kPi);
        const Aabb local = human_frame0_collider(ph, catalog);  // start_position is still the origin
        auto xz = sample_in_region(pose, region, local.lo, local.hi);
        if (!xz) throw PlacementFailure(v, "human does not fit in the spawn region");
        ph.start_position = {xz->first, 0.0, xz->second};
        scene.humans.push_back(ph);
    }

    RandomStream cams(seed, {"cameras", v});
    scene.cameras = place_camera_ring({region.cx(), kRigCenterHeight, region.cz()}, n_cameras, cams, cfg.image_width,
                                      cfg.image_height, cfg.vertical_fov);
    return scene;
}

SceneInstance settle_physics(const SceneInstance& scene, const AssetCatalog& catalog) {
    if (!scene.physics_enabled) return scene;
    SceneInstance out = scene;
    const FloorRect& region = catalog.scene_envs[scene.env_index].spawn_region;
    std::vector<Aabb> settled;

    auto collides = [&](const Aabb& box) {
        return std::any_of(settled.begin(), settled.end(), [&](const Aabb& other) { return interpenetrates(box, other); });
    };

    for (std::size_t j = 0; j < out.humans.size(); ++j) {
        PlacedHuman& h = out.humans[j];
        h.start_position.y = 0.0;
        Aabb box = human_frame0_collider(h, catalog);
        for (int attempt = 0; collides(box); ++attempt) {
            if (attempt >= scene.max_place_attempts)
                throw PlacementFailure(scene.scene_id, "could not place human " + std::to_string(h.instance_id) +
                                                           " without overlap");
            RandomStream rs(scene.rng_trace_seed, {"human", j, attempt});
            const Vec3 off_lo = box.lo - h.start_position, off_hi = box.hi - h.start_position;
            auto xz = sample_in_region(rs, region, off_lo, off_hi);
            if (!xz) throw PlacementFailure(scene.scene_id, "human does not fit in the spawn region");
            h.start_position = {xz->first, 0.0, xz->second};
            box = human_frame0_collider(h, catalog);
        }
        settled.push_back(box);
    }

    std::vector<std::size_t> order(out.objects.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return out.objects[a].extent.x * out.objects[a].extent.z > out.objects[b].extent.x * out.objects[b].extent.z;
    });
    for (const std::size_t i : order) {
        PlacedObject& o = out.objects[i];
        o.position.y = 0.5 * o.extent.y;  // resting on the floor
        Aabb box = o.collider();
        for (int attempt = 0; collides(box); ++attempt) {
            if (attempt >= scene.max_place_attempts)
                throw PlacementFailure(scene.scene_id, "could not place object " + std::to_string(o.instance_id) +
                                                           " without overlap");
            RandomStream rs(scene.rng_trace_seed, {"object", i, attempt});
            const Aabb local = yawed_box_bounds({0, 0, 0}, o.extent * 0.5, o.yaw);
            auto xz = sample_in_region(rs, region, local.lo, local.hi);
            if (!xz) throw PlacementFailure(scene.scene_id, "object does not fit in the spawn region");
            o.position.x = xz->first;
            o.position.z = xz->second;
            box = o.collider();
        }
        settled.push_back(box);
    }
    return out;
}

MotionPlan plan_motion(const SceneInstance& scene, const AssetCatalog& catalog) {
    MotionPlan plan;
    std::vector<Aabb> obstacles;
    for (const auto& o : scene.objects) obstacles.push_back(o.collider());
    for (const auto& h : scene.humans) {
        const HumanTemplate& tmpl = catalog.human_templates[h.template_index];
        std::optional<int> freeze;
        for (int k = 0; k < scene.frames_per_video && !freeze; ++k) {
            const HumanPose p = raw_human_pose(h, catalog, k);
            const Aabb box = human_collider(tmpl, p.position, p.heading);
            for (const auto& ob : obstacles)
                if (interpenetrates(box, ob)) {
                    freeze = std::max(k - 1, 0);  // last pose before contact
                    break;
                }
        }
        plan.freeze_frame.push_back(freeze);
    }
    return plan;
}

FrameState advance_frame(const SceneInstance& scene, const AssetCatalog& catalog, const MotionPlan& plan, int t) {
    FrameState fs;
    fs.scene_id = scene.scene_id;
    fs.frame_index = t;
    for (std::size_t j = 0; j < scene.humans.size(); ++j) {
        const PlacedHuman& h = scene.humans[j];
        HumanPose pose = raw_human_pose(h, catalog, t);
        const auto& freeze = plan.freeze_frame[j];
        if (freeze && t >= *freeze) {
            const HumanPose held = raw_human_pose(h, catalog, *freeze);
            pose.position = held.position;
            pose.heading = held.heading;
            pose.frozen = true;
        }
        fs.humans.push_back(std::move(pose));
    }
    return fs;
}

FrameState advance_frame(const SceneInstance& scene, const AssetCatalog& catalog, int t) {
    return advance_frame(scene, catalog, plan_motion(scene, catalog), t);
}

FramePrimitives build_primitives(const SceneInstance& scene, const FrameState& frame, const AssetCatalog& catalog) {
    FramePrimitives out;
    const auto labels = catalog.category_labels();
    auto category_of = [&](const std::string& label) {
        return static_cast<int>(std::find(labels.begin(), labels.end(), label) - labels.begin()) + 1;
    };
    const int person = category_of("person");

    for (const auto& o : scene.objects) {
        const ObjectModel& model = catalog.objects[o.object_index];
        const int cat = category_of(model.category_label);
        out.primitives.push_back({o.instance_id, cat, BoxShape{o.position, o.extent * 0.5, o.yaw},
                                  catalog.colors[o.color_index].rgb,
                                  family_gloss(catalog.materials[o.material_index].family)});
        out.instances.push_back({o.instance_id, cat, o.position, false});
    }
    for (std::size_t j = 0; j < scene.humans.size(); ++j) {
        const PlacedHuman& h = scene.humans[j];
        const HumanPose& pose = frame.humans[j];
        const HumanTemplate& tmpl = catalog.human_templates[h.template_index];
        Aabb bounds;
        for (const auto& cap : human_capsules(tmpl, pose.position, pose.heading)) {
            out.primitives.push_back({h.instance_id, person, cap, catalog.clothing_textures[h.clothing_index].tint, 0.0});
            bounds.expand(capsule_bounds(cap));
        }
        out.instances.push_back({h.instance_id, person, bounds.center(), true});
    }
    return out;
}

}  // namespace forge
