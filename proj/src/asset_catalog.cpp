#include "forge/asset_catalog.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "forge/rng.hpp"
#include "json.hpp"

namespace forge {

using nlohmann::json;

namespace {

// ---- enum names ---------------------------------------------------------

template <typename E, std::size_t N>
std::optional<E> lookup(std::string_view s, const std::pair<E, std::string_view> (&table)[N]) {
    for (const auto& [value, name] : table)
        if (name == s) return value;
    return std::nullopt;
}

template <typename E, std::size_t N>
std::string_view name_of(E v, const std::pair<E, std::string_view> (&table)[N]) {
    for (const auto& [value, name] : table)
        if (value == v) return name;
    return "?";
}

constexpr std::pair<SizeClass, std::string_view> kSizeNames[] = {
    {SizeClass::small, "small"}, {SizeClass::medium, "medium"}, {SizeClass::large, "large"}};
constexpr std::pair<MaterialFamily, std::string_view> kFamilyNames[] = {
    {MaterialFamily::metal, "metal"},
    {MaterialFamily::cardboard, "cardboard"},
    {MaterialFamily::wood, "wood"},
    {MaterialFamily::ceramic, "ceramic"},
    {MaterialFamily::glass, "glass"}};
constexpr std::pair<Gender, std::string_view> kGenderNames[] = {
    {Gender::male, "male"}, {Gender::female, "female"}, {Gender::neutral, "neutral"}};
constexpr std::pair<ClothingSource, std::string_view> kClothingNames[] = {
    {ClothingSource::plain_color, "plain_color"},
    {ClothingSource::surreal, "surreal"},
    {ClothingSource::multigarment, "multigarment"}};
constexpr std::pair<EnvKind, std::string_view> kEnvNames[] = {{EnvKind::indoor, "indoor"},
                                                               {EnvKind::outdoor, "outdoor"}};

// ---- schema helpers -----------------------------------------------------

[[noreturn]] void schema_error(const std::string& where, const std::string& what) {
    throw CatalogError("catalog schema error at " + where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) schema_error(where, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) schema_error(where, std::string("missing field '") + key + "'");
    return *it;
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_string()) schema_error(where + "." + key, "expected a string");
    return v.get<std::string>();
}

double get_number(const json& v, const std::string& where) {
    if (!v.is_number()) schema_error(where, "expected a number");
    return v.get<double>();
}

double get_number(const json& obj, const char* key, const std::string& where) {
    return get_number(field(obj, key, where), where + "." + key);
}

int get_int(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number_integer()) schema_error(where + "." + key, "expected an integer");
    return v.get<int>();
}

Vec3 get_vec3(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) schema_error(where, "expected an array of 3 numbers");
    return {get_number(v[0], where + "[0]"), get_number(v[1], where + "[1]"), get_number(v[2], where + "[2]")};
}

Vec3 get_vec3(const json& obj, const char* key, const std::string& where) {
    return get_vec3(field(obj, key, where), where + "." + key);
}

FloorRect get_rect(const json& obj, const char* key, const std::string& where) {
    const json& r = field(obj, key, where);
    const std::string w = where + "." + key;
    return {get_number(r, "x_min", w), get_number(r, "z_min", w), get_number(r, "x_max", w),
            get_number(r, "z_max", w)};
}

const json& get_array(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_array()) schema_error(where + "." + key, "expected an array");
    return v;
}

template <typename E, std::size_t N>
E get_enum(const json& obj, const char* key, const std::string& where,
           const std::pair<E, std::string_view> (&table)[N]) {
    const std::string s = get_string(obj, key, where);
    auto v = lookup(s, table);
    if (!v) schema_error(where + "." + key, "unknown value '" + s + "'");
    return *v;
}

std::size_t line_of_offset(std::string_view bytes, std::size_t offset) {
    offset = std::min(offset, bytes.size());
    return 1 + static_cast<std::size_t>(std::count(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

template <typename T>
void check_unique_ids(const std::vector<T>& items, const char* kind) {
    std::set<std::string> seen;
    for (const auto& item : items)
        if (!seen.insert(item.id).second)
            throw CatalogError(std::string("duplicate id '") + item.id + "' in " + kind);
}

// ---- per-type parsers ---------------------------------------------------

ObjectModel parse_object(const json& j, const std::string& w) {
    ObjectModel o;
    o.id = get_string(j, "id", w);
    o.noun = get_string(j, "noun", w);
    o.category_label = get_string(j, "category_label", w);
    o.size_class = get_enum(j, "size_class", w, kSizeNames);
    o.base_extent = get_vec3(j, "base_extent", w);
    const json& fams = get_array(j, "allowed_material_families", w);
    for (std::size_t i = 0; i < fams.size(); ++i) {
        const std::string fw = w + ".allowed_material_families[" + std::to_string(i) + "]";
        if (!fams[i].is_string()) schema_error(fw, "expected a string");
        auto f = lookup(fams[i].get<std::string>(), kFamilyNames);
        if (!f) schema_error(fw, "unknown material family '" + fams[i].get<std::string>() + "'");
        o.allowed_material_families.push_back(*f);
    }
    o.default_color = get_string(j, "default_color", w);
    return o;
}

MaterialDef parse_material(const json& j, const std::string& w) {
    return {get_string(j, "id", w), get_enum(j, "family", w, kFamilyNames), get_string(j, "name", w)};
}

ColorDef parse_color(const json& j, const std::string& w) {
    return {get_string(j, "id", w), get_string(j, "name", w), get_vec3(j, "rgb", w)};
}

HumanTemplate parse_template(const json& j, const std::string& w) {
    HumanTemplate t;
    t.gender = get_enum(j, "gender", w, kGenderNames);
    t.body_extent = get_vec3(j, "body_extent", w);
    const json& parts = get_array(j, "collider_parts", w);
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const std::string pw = w + ".collider_parts[" + std::to_string(i) + "]";
        ColliderPart part;
        part.part = get_string(parts[i], "part", pw);
        const json& cap = field(parts[i], "capsule", pw);
        part.capsule.p0 = get_vec3(cap, "p0", pw + ".capsule");
        part.capsule.p1 = get_vec3(cap, "p1", pw + ".capsule");
        part.capsule.radius = get_number(cap, "radius", pw + ".capsule");
        t.collider_parts.push_back(std::move(part));
    }
    return t;
}

ClothingTexture parse_clothing(const json& j, const std::string& w) {
    ClothingTexture c;
    c.id = get_string(j, "id", w);
    c.source = get_enum(j, "source", w, kClothingNames);
    const json& sentences = get_array(j, "description_sentences", w);
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        if (!sentences[i].is_string())
            schema_error(w + ".description_sentences[" + std::to_string(i) + "]", "expected a string");
        c.description_sentences.push_back(sentences[i].get<std::string>());
    }
    c.tint = get_vec3(j, "tint", w);
    return c;
}

MotionClip parse_clip(const json& j, const std::string& w) {
    MotionClip m;
    m.id = get_string(j, "id", w);
    m.fps = get_number(j, "fps", w);
    m.n_frames = get_int(j, "n_frames", w);
    const json& segs = get_array(j, "action_segments", w);
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const std::string sw = w + ".action_segments[" + std::to_string(i) + "]";
        m.action_segments.push_back({get_int(segs[i], "start", sw), get_int(segs[i], "end", sw),
                                     get_string(segs[i], "action", sw)});
    }
    const json& traj = get_array(j, "root_trajectory", w);
    m.root_trajectory.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const std::string tw = w + ".root_trajectory[" + std::to_string(i) + "]";
        m.root_trajectory.push_back({get_vec3(traj[i], "position", tw), get_number(traj[i], "heading", tw)});
    }
    return m;
}

SceneEnv parse_env(const json& j, const std::string& w) {
    SceneEnv e;
    e.id = get_string(j, "id", w);
    e.kind = get_enum(j, "kind", w, kEnvNames);
    e.description = get_string(j, "description", w);
    e.floor_extent = get_rect(j, "floor_extent", w);
    e.spawn_region = get_rect(j, "spawn_region", w);
    return e;
}

template <typename T, typename Fn>
std::vector<T> parse_list(const json& root, const char* key, Fn parse_one) {
    const json& arr = get_array(root, key, "catalog");
    std::vector<T> out;
    out.reserve(arr.size());
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(parse_one(arr[i], std::string(key) + "[" + std::to_string(i) + "]"));
    return out;
}

bool in_unit_range(const Vec3& v) {
    auto ok = [](double c) { return std::isfinite(c) && c >= 0.0 && c <= 1.0; };
    return ok(v.x) && ok(v.y) && ok(v.z);
}

bool positive_finite(const Vec3& v) {
    auto ok = [](double c) { return std::isfinite(c) && c > 0.0; };
    return ok(v.x) && ok(v.y) && ok(v.z);
}

std::string range_text(int a, int b) { return "[" + std::to_string(a) + "," + std::to_string(b) + ")"; }

}  // namespace

// ---- public API -----------------------------------------------------------

std::string_view to_string(SizeClass v) { return name_of(v, kSizeNames); }
std::string_view to_string(MaterialFamily v) { return name_of(v, kFamilyNames); }
std::string_view to_string(Gender v) { return name_of(v, kGenderNames); }
std::string_view to_string(ClothingSource v) { return name_of(v, kClothingNames); }
std::string_view to_string(EnvKind v) { return name_of(v, kEnvNames); }

std::optional<SizeClass> parse_size_class(std::string_view s) { return lookup(s, kSizeNames); }
std::optional<MaterialFamily> parse_material_family(std::string_view s) { return lookup(s, kFamilyNames); }
std::optional<ClothingSource> parse_clothing_source(std::string_view s) { return lookup(s, kClothingNames); }

SizeClass size_class_for(const Vec3& extent) {
    const double m = std::max({extent.x, extent.y, extent.z});
    if (m < 0.3) return SizeClass::small;
    if (m < 1.0) return SizeClass::medium;
    return SizeClass::large;
}

const ActionSegment* MotionClip::segment_at(int frame) const {
    for (const auto& seg : action_segments)
        if (frame >= seg.start && frame < seg.end) return &seg;
    return nullptr;
}

std::optional<std::size_t> AssetCatalog::color_index(std::string_view id) const {
    for (std::size_t i = 0; i < colors.size(); ++i)
        if (colors[i].id == id) return i;
    return std::nullopt;
}

std::vector<std::size_t> AssetCatalog::materials_in(const std::vector<MaterialFamily>& families) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < materials.size(); ++i)
        if (std::find(families.begin(), families.end(), materials[i].family) != families.end()) out.push_back(i);
    return out;
}

std::optional<std::size_t> AssetCatalog::default_material(const ObjectModel& obj) const {
    if (obj.allowed_material_families.empty()) return std::nullopt;
    for (std::size_t i = 0; i < materials.size(); ++i)
        if (materials[i].family == obj.allowed_material_families.front()) return i;
    return std::nullopt;
}

std::vector<std::string> AssetCatalog::category_labels() const {
    std::set<std::string> labels;
    for (const auto& o : objects) labels.insert(o.category_label);
    std::vector<std::string> out(labels.begin(), labels.end());
    if (!labels.contains("person")) out.push_back("person");
    return out;
}

int AssetCatalog::category_id(std::string_view label) const {
    const auto labels = category_labels();
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label) return static_cast<int>(i) + 1;
    return 0;
}

int AssetCatalog::person_category_id() const { return category_id("person"); }

std::string digest_hex(std::string_view bytes) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
    return buf;
}

std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AssetCatalog parse_catalog(std::string_view bytes) {
    json root;
    try {
        root = json::parse(bytes.begin(), bytes.end());
    } catch (const json::parse_error& e) {
        throw CatalogError("catalog parse error at line " + std::to_string(line_of_offset(bytes, e.byte)) + ": " +
                           e.what());
    }
    if (!root.is_object()) schema_error("catalog", "top level must be an object");
    const json& version = field(root, "catalog_version", "catalog");
    if (!version.is_number_integer() || version.get<int>() != 1)
        schema_error("catalog.catalog_version", "expected 1");

    AssetCatalog cat;
    cat.objects = parse_list<ObjectModel>(root, "objects", parse_object);
    cat.materials = parse_list<MaterialDef>(root, "materials", parse_material);
    cat.colors = parse_list<ColorDef>(root, "colors", parse_color);
    cat.human_templates = parse_list<HumanTemplate>(root, "human_templates", parse_template);
    cat.clothing_textures = parse_list<ClothingTexture>(root, "clothing_textures", parse_clothing);
    cat.motion_clips = parse_list<MotionClip>(root, "motion_clips", parse_clip);
    cat.scene_envs = parse_list<SceneEnv>(root, "scene_envs", parse_env);

    check_unique_ids(cat.objects, "objects");
    check_unique_ids(cat.materials, "materials");
    check_unique_ids(cat.colors, "colors");
    check_unique_ids(cat.clothing_textures, "clothing_textures");
    check_unique_ids(cat.motion_clips, "motion_clips");
    check_unique_ids(cat.scene_envs, "scene_envs");

    for (auto& o : cat.objects) {
        auto ci = cat.color_index(o.default_color);
        if (!ci)
            throw CatalogError("dangling reference: object '" + o.id + "' default_color '" + o.default_color +
                               "' is not a catalog color");
        o.default_color_index = *ci;
    }
    cat.digest = digest_hex(bytes);
    return cat;
}

ValidationReport validate_catalog(const AssetCatalog& cat) {
    ValidationReport report;
    auto add = [&](std::string subject, std::string message) {
        report.findings.push_back({std::move(subject), std::move(message)});
    };
    auto dup_check = [&](const auto& items, const char* kind) {
        std::set<std::string> seen;
        for (const auto& item : items)
            if (!seen.insert(item.id).second) add(std::string(kind) + " '" + item.id + "'", "duplicate id");
    };
    dup_check(cat.objects, "object");
    dup_check(cat.materials, "material");
    dup_check(cat.colors, "color");
    dup_check(cat.clothing_textures, "clothing texture");
    dup_check(cat.motion_clips, "motion clip");
    dup_check(cat.scene_envs, "scene env");

    for (const auto& o : cat.objects) {
        const std::string s = "object '" + o.id + "'";
        if (!positive_finite(o.base_extent)) add(s, "base_extent components must be positive and finite");
        else if (size_class_for(o.base_extent) != o.size_class)
            add(s, "size_class '" + std::string(to_string(o.size_class)) + "' disagrees with max extent (expected '" +
                       std::string(to_string(size_class_for(o.base_extent))) + "')");
        if (o.allowed_material_families.empty()) add(s, "allowed_material_families is empty");
        for (auto fam : o.allowed_material_families)
            if (cat.materials_in({fam}).empty())
                add(s, "no catalog material in allowed family '" + std::string(to_string(fam)) + "'");
        if (o.default_color_index >= cat.colors.size() || cat.colors[o.default_color_index].id != o.default_color)
            add(s, "default_color '" + o.default_color + "' does not resolve");
        if (o.noun.empty()) add(s, "noun is empty");
    }
    for (const auto& m : cat.materials)
        if (m.name.empty()) add("material '" + m.id + "'", "name is empty");
    for (const auto& c : cat.colors)
        if (!in_unit_range(c.rgb)) add("color '" + c.id + "'", "rgb components must lie in [0,1]");

    if (cat.human_templates.size() != 3)
        add("human_templates", "expected exactly 3 templates, found " + std::to_string(cat.human_templates.size()));
    std::set<Gender> genders;
    for (const auto& t : cat.human_templates) {
        const std::string s = "human template '" + std::string(to_string(t.gender)) + "'";
        if (!genders.insert(t.gender).second) add(s, "duplicate gender");
        if (!positive_finite(t.body_extent)) add(s, "body_extent components must be positive and finite");
        if (t.collider_parts.empty()) add(s, "collider_parts is empty");
        for (const auto& p : t.collider_parts) {
            if (!(std::isfinite(p.capsule.radius) && p.capsule.radius > 0))
                add(s + " part '" + p.part + "'", "capsule radius must be positive");
            if (!is_finite(p.capsule.p0) || !is_finite(p.capsule.p1))
                add(s + " part '" + p.part + "'", "capsule endpoints must be finite");
        }
    }

    for (const auto& c : cat.clothing_textures) {
        const std::string s = "clothing texture '" + c.id + "'";
        if (c.source == ClothingSource::multigarment && c.description_sentences.empty())
            add(s, "multigarment texture needs description_sentences");
        if (!in_unit_range(c.tint)) add(s, "tint components must lie in [0,1]");
    }

    for (const auto& m : cat.motion_clips) {
        const std::string s = "motion clip '" + m.id + "'";
        if (!(std::isfinite(m.fps) && m.fps > 0)) add(s, "fps must be positive");
        if (m.n_frames <= 0) {
            add(s, "n_frames must be positive");
            continue;
        }
        if (static_cast<int>(m.root_trajectory.size()) != m.n_frames)
            add(s, "root_trajectory has " + std::to_string(m.root_trajectory.size()) + " samples, expected " +
                       std::to_string(m.n_frames));
        for (const auto& r : m.root_trajectory)
            if (!is_finite(r.position) || !std::isfinite(r.heading)) {
                add(s, "root_trajectory contains non-finite values");
                break;
            }
        std::vector<ActionSegment> segs = m.action_segments;
        std::sort(segs.begin(), segs.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
        int cursor = 0;
        for (const auto& seg : segs) {
            if (seg.start >= seg.end || seg.start < 0 || seg.end > m.n_frames) {
                add(s, "invalid segment " + range_text(seg.start, seg.end) + " '" + seg.action + "'");
                continue;
            }
            if (seg.start > cursor) add(s, "uncovered frames " + range_text(cursor, seg.start));
            if (seg.start < cursor) add(s, "overlapping segments over frames " + range_text(seg.start, std::min(cursor, seg.end)));
            if (seg.action.empty()) add(s, "segment " + range_text(seg.start, seg.end) + " has an empty action");
            cursor = std::max(cursor, seg.end);
        }
        if (cursor < m.n_frames) add(s, "uncovered frames " + range_text(cursor, m.n_frames));
    }

    for (const auto& e : cat.scene_envs) {
        const std::string s = "scene env '" + e.id + "'";
        if (!(e.floor_extent.x_min < e.floor_extent.x_max && e.floor_extent.z_min < e.floor_extent.z_max))
            add(s, "floor_extent is degenerate");
        if (!(e.spawn_region.x_min < e.spawn_region.x_max && e.spawn_region.z_min < e.spawn_region.z_max))
            add(s, "spawn_region is degenerate");
        if (!e.floor_extent.contains(e.spawn_region)) add(s, "spawn_region is not inside floor_extent");
    }
    return report;
}

AssetCatalog load_catalog(const std::filesystem::path& path) {
    AssetCatalog cat = parse_catalog(read_file_bytes(path));
    const auto report = validate_catalog(cat);
    if (!report.ok()) {
        std::string msg = "catalog " + path.string() + " failed validation:";
        for (const auto& f : report.findings) msg += "\n  " + f.subject + ": " + f.message;
        throw CatalogError(msg);
    }
    return cat;
}

}  // namespace forge
