#include "forge/dataset_pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "forge/image_io.hpp"
#include "forge/relation_extractor.hpp"
#include "json.hpp"

namespace forge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string padded(int value, int width) {
    std::string s = std::to_string(value);
    return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

struct VideoResult {
    std::vector<ManifestRecord> records;
    std::optional<FailedVideo> failure;
};

VideoResult generate_video(const GenerationConfig& cfg, const AssetCatalog& catalog, const fs::path& root, int v) {
    VideoResult result;
    SceneInstance scene;
    try {
        scene = settle_physics(sample_scene(cfg, catalog, v), catalog);
    } catch (const PlacementFailure& e) {
        result.failure = FailedVideo{v, e.what()};
        return result;
    }
    const MotionPlan plan = plan_motion(scene, catalog);
    const std::string video_dir = "videos/v" + padded(v, 5);
    fs::create_directories(root / video_dir);

    for (int t = 0; t < cfg.frames_per_video; ++t) {
        const FrameState frame = advance_frame(scene, catalog, plan, t);
        const FramePrimitives prims = build_primitives(scene, frame, catalog);
        for (int cam_id : pick_viewpoints(cfg, scene, t)) {
            const Camera& camera = scene.cameras.cameras[static_cast<std::size_t>(cam_id)];
            const FrameBuffers buffers = rasterize_frame(prims, camera);
            const RelationSet relations = extract_relations(prims, camera, buffers);
            const FrameMetadata md = build_frame_metadata(cfg, catalog, scene, frame, camera, buffers, relations);
            RandomStream caption_stream(md.caption_seed);
            const CaptionDoc doc = compose_caption(md, caption_stream, cfg.caption_mode, cfg.statement_weights);

            ManifestRecord rec;
            rec.sample_id = "v" + padded(v, 5) + "_f" + padded(t, 6) + "_c" + padded(cam_id, 2);
            rec.video_id = v;
            rec.frame_index = t;
            rec.camera_id = cam_id;
            const std::string stem = video_dir + "/f" + padded(t, 6) + "_c" + padded(cam_id, 2);
            rec.rgb = stem + ".rgb.ppm";
            rec.depth = stem + ".depth.f32";
            rec.instance_mask = stem + ".instance.pgm";
            rec.category_mask = stem + ".category.pgm";
            rec.metadata = stem + ".meta.json";
            rec.caption = doc.full_text;
            rec.caption_seed = md.caption_seed;

            write_bytes(root / rec.rgb, encode_ppm(buffers.width, buffers.height, buffers.rgb));
            write_bytes(root / rec.depth, encode_depth(buffers.width, buffers.height, buffers.depth));
            write_bytes(root / rec.instance_mask, encode_pgm16(buffers.width, buffers.height, buffers.instance_mask));
            write_bytes(root / rec.category_mask, encode_pgm16(buffers.width, buffers.height, buffers.category_mask));
            write_bytes(root / rec.metadata, frame_metadata_to_json(md));
            result.records.push_back(std::move(rec));
        }
    }
    return result;
}

json record_json(const ManifestRecord& r) {
    return {{"sample_id", r.sample_id},   {"video_id", r.video_id},
            {"frame_index", r.frame_index}, {"camera_id", r.camera_id},
            {"rgb", r.rgb},               {"depth", r.depth},
            {"instance_mask", r.instance_mask}, {"category_mask", r.category_mask},
            {"metadata", r.metadata},     {"caption", r.caption},
            {"caption_seed", r.caption_seed}};
}

ManifestRecord record_from(const json& j) {
    ManifestRecord r;
    r.sample_id = j.at("sample_id").get<std::string>();
    r.video_id = j.at("video_id").get<int>();
    r.frame_index = j.at("frame_index").get<int>();
    r.camera_id = j.at("camera_id").get<int>();
    r.rgb = j.at("rgb").get<std::string>();
    r.depth = j.at("depth").get<std::string>();
    r.instance_mask = j.at("instance_mask").get<std::string>();
    r.category_mask = j.at("category_mask").get<std::string>();
    r.metadata = j.at("metadata").get<std::string>();
    r.caption = j.at("caption").get<std::string>();
    r.caption_seed = j.at("caption_seed").get<std::uint64_t>();
    return r;
}

json header_json(const ManifestHeader& h, const GenerationConfig& cfg) {
    json failed = json::array();
    for (const auto& f : h.failed_videos) failed.push_back({{"video", f.video}, {"reason", f.reason}});
    return {{"format_version", h.format_version},
            {"master_seed", h.master_seed},
            {"config_digest", h.config_digest},
            {"catalog_digest", h.catalog_digest},
            {"counts", {{"videos", h.videos}, {"frames", h.frames}, {"samples", h.samples}}},
            {"failed_videos", failed},
            {"config", json::parse(generation_config_to_json(cfg))}};
}

void write_atomically(const fs::path& path, const std::string& bytes) {
    fs::path tmp = path;
    tmp += ".tmp";
    write_bytes(tmp, bytes);
    fs::rename(tmp, path);
}

void ensure_writable(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw OutputError("cannot create output directory " + dir.string() + ": " + ec.message());
    const fs::path probe = dir / ".forge_write_probe";
    {
        std::ofstream out(probe, std::ios::binary);
        if (!out || !(out << "probe")) throw OutputError("output directory " + dir.string() + " is not writable");
    }
    fs::remove(probe, ec);
}

}  // namespace

int default_worker_count() {
    if (const char* env = std::getenv("FORGE_WORKERS")) {
        try {
            const int n = std::stoi(env);
            if (n >= 1) return n;
        } catch (const std::exception&) {
        }
    }
    return 1;
}

std::vector<int> pick_viewpoints(const GenerationConfig& cfg, const SceneInstance& scene, int t) {
    std::vector<int> ids(scene.cameras.cameras.size());
    std::iota(ids.begin(), ids.end(), 0);
    const std::size_t k = std::min(ids.size(), static_cast<std::size_t>(cfg.viewpoints_per_frame));
    RandomStream rs(cfg.seed, {"viewpoints", scene.scene_id, t});
    for (std::size_t i = 0; i < k; ++i) {
        const auto j = static_cast<std::size_t>(rs.uniform_int(static_cast<std::int64_t>(i),
                                                               static_cast<std::int64_t>(ids.size() - 1)));
        std::swap(ids[i], ids[j]);
    }
    ids.resize(k);
    std::sort(ids.begin(), ids.end());
    return ids;
}

std::uint64_t caption_seed_for(const GenerationConfig& cfg, int video, int frame, int camera) {
    return derive_seed(cfg.seed, {"caption", video, frame, camera});
}

FrameMetadata build_frame_metadata(const GenerationConfig& cfg, const AssetCatalog& catalog, const SceneInstance& scene,
                                   const FrameState& frame, const Camera& camera, const FrameBuffers& buffers,
                                   const RelationSet& relations) {
    FrameMetadata md;
    md.frame = {scene.scene_id, frame.frame_index, camera.camera_id};
    const SceneEnv& env = catalog.scene_envs[scene.env_index];
    md.env_id = env.id;
    md.scene_description = env.description;
    md.camera = camera;
    md.scene_objects = static_cast<int>(scene.objects.size());
    md.scene_humans = static_cast<int>(scene.humans.size());
    md.caption_seed = caption_seed_for(cfg, scene.scene_id, frame.frame_index, camera.camera_id);
    md.caption_mode = cfg.caption_mode;
    md.statement_weights = cfg.statement_weights;
    md.relations = relations;

    const auto coverage = coverage_by_instance(buffers);
    auto pixels_of = [&](int id) -> std::size_t {
        auto it = coverage.find(id);
        return it == coverage.end() ? 0 : it->second.count;
    };

    for (const auto& o : scene.objects) {
        const std::size_t px = pixels_of(o.instance_id);
        if (px < kVisibilityThreshold) continue;
        const ObjectModel& model = catalog.objects[o.object_index];
        ObjectEntry e;
        e.instance_id = o.instance_id;
        e.object_id = model.id;
        e.noun = model.noun;
        e.category = model.category_label;
        e.color = catalog.colors[o.color_index].name;
        e.size = std::string(to_string(size_class_for(o.extent)));
        e.material = catalog.materials[o.material_index].name;
        e.position = o.position;
        e.show_size = cfg.randomize_size;
        e.show_color = cfg.randomize_color;
        e.show_material = cfg.randomize_material;
        e.pixels = px;
        md.objects.push_back(std::move(e));
    }
    int next_ordinal = 1;
    for (std::size_t j = 0; j < scene.humans.size(); ++j) {
        const PlacedHuman& h = scene.humans[j];
        const std::size_t px = pixels_of(h.instance_id);
        if (px < kVisibilityThreshold) continue;
        const ClothingTexture& tex = catalog.clothing_textures[h.clothing_index];
        HumanEntry e;
        e.instance_id = h.instance_id;
        e.ordinal = next_ordinal++;
        e.gender = std::string(to_string(catalog.human_templates[h.template_index].gender));
        e.clothing_id = tex.id;
        e.action = frame.humans[j].action;
        e.clothing = tex.description_sentences;
        e.position = frame.humans[j].position;
        e.pixels = px;
        md.humans.push_back(std::move(e));
    }
    return md;
}

DatasetManifest generate_dataset(const GenerationConfig& cfg, const AssetCatalog& catalog, const fs::path& out_dir,
                                 const GenerateOptions& options) {
    if (auto problems = cfg.problems(); !problems.empty()) {
        std::string msg = "invalid generation config:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ConfigError(msg);
    }
    ensure_writable(out_dir);

    const int n = cfg.n_videos;
    std::vector<VideoResult> results(static_cast<std::size_t>(n));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (int v = next++; v < n; v = next++) {
            try {
                results[static_cast<std::size_t>(v)] = generate_video(cfg, catalog, out_dir, v);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next = n;
            }
        }
    };
    const int workers = std::clamp(options.workers, 1, std::max(1, n));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);

    DatasetManifest manifest;
    ManifestHeader& h = manifest.header;
    h.master_seed = cfg.seed;
    h.config_digest = options.config_digest;
    h.catalog_digest = catalog.digest;
    for (int v = 0; v < n; ++v) {
        auto& r = results[static_cast<std::size_t>(v)];
        if (r.failure) {
            h.failed_videos.push_back(*r.failure);
            continue;
        }
        ++h.videos;
        h.frames += cfg.frames_per_video;
        for (auto& rec : r.records) manifest.records.push_back(std::move(rec));
    }
    h.samples = manifest.records.size();
    if (h.failed_videos.size() * 10 > static_cast<std::size_t>(n)) {
        std::string msg = std::to_string(h.failed_videos.size()) + " of " + std::to_string(n) +
                          " videos failed placement (limit 10%)";
        for (const auto& f : h.failed_videos) msg += "\n  " + f.reason;
        throw GenerationAbort(msg);
    }

    std::string lines;
    for (const auto& rec : manifest.records) lines += record_json(rec).dump() + "\n";
    write_atomically(out_dir / kManifestFile, lines);
    write_atomically(out_dir / kManifestHeaderFile, header_json(h, cfg).dump(2) + "\n");
    return manifest;
}

fs::path dataset_root(const fs::path& manifest_path) {
    return fs::is_directory(manifest_path) ? manifest_path : manifest_path.parent_path();
}

DatasetManifest load_manifest(const fs::path& path) {
    const fs::path root = dataset_root(path);
    const fs::path jsonl = fs::is_directory(path) ? root / kManifestFile : path;
    DatasetManifest m;
    try {
        const json hj = json::parse(read_file_bytes(root / kManifestHeaderFile));
        m.header.format_version = hj.at("format_version").get<int>();
        m.header.master_seed = hj.at("master_seed").get<std::uint64_t>();
        m.header.config_digest = hj.at("config_digest").get<std::string>();
        m.header.catalog_digest = hj.at("catalog_digest").get<std::string>();
        m.header.videos = hj.at("counts").at("videos").get<int>();
        m.header.frames = hj.at("counts").at("frames").get<int>();
        m.header.samples = hj.at("counts").at("samples").get<std::size_t>();
        for (const auto& f : hj.at("failed_videos"))
            m.header.failed_videos.push_back({f.at("video").get<int>(), f.at("reason").get<std::string>()});
        std::istringstream lines(read_file_bytes(jsonl));
        for (std::string line; std::getline(lines, line);)
            if (!line.empty()) m.records.push_back(record_from(json::parse(line)));
    } catch (const json::exception& e) {
        throw std::runtime_error("manifest parse error: " + std::string(e.what()));
    }
    return m;
}

DatasetStats dataset_stats(const fs::path& manifest_path) {
    const DatasetManifest m = load_manifest(manifest_path);
    const fs::path root = dataset_root(manifest_path);
    DatasetStats s;
    std::set<int> videos;
    bool first = true;
    for (const auto& rec : m.records) {
        ++s.samples;
        videos.insert(rec.video_id);
        for (const std::string* p : {&rec.rgb, &rec.depth, &rec.instance_mask, &rec.category_mask, &rec.metadata})
            if (!fs::exists(root / *p)) s.missing_files.push_back(*p);
        if (!fs::exists(root / rec.metadata)) continue;
        const FrameMetadata md = frame_metadata_from_json(read_file_bytes(root / rec.metadata));
        for (const auto& o : md.objects) {
            ++s.colors[o.color];
            ++s.materials[o.material];
            ++s.sizes[o.size];
        }
        for (const auto& h : md.humans) ++s.actions[h.action];
        for (const auto& r : md.relations.relations) ++s.predicates[std::string(to_string(r.predicate))];
        if (first) {
            s.min_objects = s.max_objects = md.scene_objects;
            s.min_humans = s.max_humans = md.scene_humans;
            first = false;
        }
        s.min_objects = std::min(s.min_objects, md.scene_objects);
        s.max_objects = std::max(s.max_objects, md.scene_objects);
        s.min_humans = std::min(s.min_humans, md.scene_humans);
        s.max_humans = std::max(s.max_humans, md.scene_humans);
    }
    s.videos = videos.size();
    return s;
}

std::string stats_to_json(const DatasetStats& s) {
    json j = {{"samples", s.samples},
              {"videos", s.videos},
              {"colors", s.colors},
              {"materials", s.materials},
              {"sizes", s.sizes},
              {"predicates", s.predicates},
              {"actions", s.actions},
              {"objects_per_scene", {{"min", s.min_objects}, {"max", s.max_objects}}},
              {"humans_per_scene", {{"min", s.min_humans}, {"max", s.max_humans}}},
              {"missing_files", s.missing_files}};
    return j.dump(2) + "\n";
}

std::string stats_to_text(const DatasetStats& s) {
    std::ostringstream out;
    out << "samples: " << s.samples << "\nvideos: " << s.videos << "\n";
    auto section = [&](const char* name, const std::map<std::string, std::size_t>& counts) {
        out << name << ":\n";
        for (const auto& [k, v] : counts) out << "  " << k << ": " << v << "\n";
    };
    section("colors", s.colors);
    section("materials", s.materials);
    section("sizes", s.sizes);
    section("predicates", s.predicates);
    section("actions", s.actions);
    out << "objects per scene: " << s.min_objects << ".." << s.max_objects << "\n";
    out << "humans per scene: " << s.min_humans << ".." << s.max_humans << "\n";
    if (!s.missing_files.empty()) {
        out << "missing files (" << s.missing_files.size() << "):\n";
        for (const auto& f : s.missing_files) out << "  " << f << "\n";
    }
    return out.str();
}

CaptionDoc recaption(const fs::path& metadata_path, std::optional<CaptionMode> mode,
                     std::optional<StatementWeights> weights, std::optional<std::uint64_t> seed) {
    const FrameMetadata md = frame_metadata_from_json(read_file_bytes(metadata_path));
    RandomStream stream(seed.value_or(md.caption_seed));
    return compose_caption(md, stream, mode.value_or(md.caption_mode), weights.value_or(md.statement_weights));
}

}  // namespace forge
