#include "forge/caption_grammar.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "json.hpp"

namespace forge {

using nlohmann::json;

namespace {

std::string finish_sentence(std::string_view body) {
    std::size_t end = body.size();
    while (end > 0 && (body[end - 1] == '.' || std::isspace(static_cast<unsigned char>(body[end - 1])))) --end;
    std::size_t start = 0;
    while (start < end && std::isspace(static_cast<unsigned char>(body[start]))) ++start;
    return std::string(body.substr(start, end - start)) + ".";
}

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

json vec_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }
Vec3 vec_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()}; }

}  // namespace

std::string_view to_string(StatementCategory c) {
    switch (c) {
        case StatementCategory::prefix_enumeration: return "prefix_enumeration";
        case StatementCategory::scene: return "scene";
        case StatementCategory::relation: return "relation";
        case StatementCategory::action: return "action";
        case StatementCategory::clothing: return "clothing";
    }
    return "?";
}

std::string_view indefinite_article(std::string_view phrase) {
    if (phrase.empty()) throw std::invalid_argument("indefinite_article: empty phrase");
    switch (std::tolower(static_cast<unsigned char>(phrase.front()))) {
        case 'a': case 'e': case 'i': case 'o': case 'u': return "an";
        default: return "a";
    }
}

std::string_view ordinal(int n) {
    static constexpr std::string_view kWords[] = {"first", "second", "third", "fourth"};
    if (n < 1 || n > 4) throw std::out_of_range("ordinal: " + std::to_string(n) + " is outside 1..4");
    return kWords[n - 1];
}

std::string object_noun_phrase(const ObjectEntry& obj) {
    std::string out;
    auto add = [&](bool show, const std::string& word) {
        if (!show || word.empty()) return;
        out += word;
        out += ' ';
    };
    add(obj.show_size, obj.size);
    add(obj.show_color, obj.color);
    add(obj.show_material, obj.material);
    return out + obj.noun;
}

std::string entity_phrase(const FrameMetadata& md, int instance_id) {
    for (const auto& o : md.objects)
        if (o.instance_id == instance_id) {
            const std::string phrase = object_noun_phrase(o);
            return std::string(indefinite_article(phrase)) + " " + phrase;
        }
    for (const auto& h : md.humans)
        if (h.instance_id == instance_id) return "the " + std::string(ordinal(h.ordinal)) + " person";
    throw std::invalid_argument("instance " + std::to_string(instance_id) + " is not in the frame metadata");
}

CaptionDoc compose_caption(const FrameMetadata& md, RandomStream& stream, CaptionMode mode,
                           const StatementWeights& weights) {
    CaptionDoc doc;

    std::string enumeration(kCaptionPrefix);
    enumeration += ' ';
    for (const auto& o : md.objects) {
        const std::string phrase = object_noun_phrase(o);
        enumeration += std::string(indefinite_article(phrase)) + " " + phrase + ", ";
    }
    enumeration += "and " + std::to_string(md.humans.size()) + " humans";
    doc.statements.push_back({StatementCategory::prefix_enumeration, finish_sentence(enumeration)});

    doc.statements.push_back({StatementCategory::scene,
                              finish_sentence("They are in " + std::string(indefinite_article(md.scene_description)) +
                                              " " + md.scene_description)});

    std::vector<int> entities;
    for (const auto& o : md.objects) entities.push_back(o.instance_id);
    for (const auto& h : md.humans) entities.push_back(h.instance_id);

    std::vector<std::string> relations;
    auto sentence = [&](int subject, std::string_view verb, int object) {
        return finish_sentence(capitalize(entity_phrase(md, subject)) + " " + std::string(verb) + " " +
                               entity_phrase(md, object));
    };
    for (std::size_t i = 0; i < entities.size(); ++i) {
        for (std::size_t j = i + 1; j < entities.size(); ++j) {
            const int a = entities[i], b = entities[j];
            std::optional<std::pair<int, int>> lr, fb;
            if (md.relations.contains(a, Predicate::left_of, b)) lr = {a, b};
            else if (md.relations.contains(b, Predicate::left_of, a)) lr = {b, a};
            if (md.relations.contains(a, Predicate::in_front_of, b)) fb = {a, b};
            else if (md.relations.contains(b, Predicate::in_front_of, a)) fb = {b, a};
            if (lr) {
                relations.push_back(sentence(lr->first, "is to the left of", lr->second));
                relations.push_back(sentence(lr->second, "is to the right of", lr->first));
            }
            if (fb) {
                relations.push_back(sentence(fb->first, "is in front of", fb->second));
                relations.push_back(sentence(fb->second, "is behind", fb->first));
            }
        }
    }
    stream.shuffle(std::span<std::string>(relations));

    const bool sampled = mode == CaptionMode::sampled;
    const double keep_relation = std::min(1.0, weights.relation);
    const double keep_clothing = std::min(1.0, weights.clothing);
    for (auto& r : relations)
        if (!sampled || stream.bernoulli(keep_relation)) doc.statements.push_back({StatementCategory::relation, std::move(r)});

    for (const auto& h : md.humans) {
        const std::string who = "The " + std::string(ordinal(h.ordinal)) + " person ";
        doc.statements.push_back({StatementCategory::action, finish_sentence(who + h.action)});
        for (const auto& c : h.clothing)
            if (!sampled || stream.bernoulli(keep_clothing))
                doc.statements.push_back({StatementCategory::clothing, finish_sentence(who + c)});
    }

    for (const auto& s : doc.statements) {
        if (!doc.full_text.empty()) doc.full_text += ' ';
        doc.full_text += s.sentence;
    }
    return doc;
}

ParaphrasePrompt build_paraphrase_prompt(std::string_view full_text) {
    if (full_text.substr(0, kCaptionPrefix.size()) != kCaptionPrefix)
        throw std::invalid_argument("caption does not start with \"This scene contains\"");
    ParaphrasePrompt p;
    p.text = std::string(kPromptPrefix) + std::string(full_text.substr(kCaptionPrefix.size()));
    while (!p.text.empty() && std::isspace(static_cast<unsigned char>(p.text.back()))) p.text.pop_back();
    p.text += ' ';
    p.text += kPromptSuffix;
    return p;
}

ParaphrasePrompt build_paraphrase_prompt(const CaptionDoc& doc) { return build_paraphrase_prompt(doc.full_text); }

std::string caption_from_prompt(std::string_view prompt) {
    if (prompt.substr(0, kPromptPrefix.size()) != kPromptPrefix)
        throw std::invalid_argument("prompt does not start with the paraphrase prefix");
    const std::string suffix = " " + std::string(kPromptSuffix);
    if (prompt.size() < suffix.size() || prompt.substr(prompt.size() - suffix.size()) != suffix)
        throw std::invalid_argument("prompt does not end with the paraphrase suffix");
    std::string body(prompt.substr(kPromptPrefix.size(), prompt.size() - suffix.size() - kPromptPrefix.size()));
    return std::string(kCaptionPrefix) + body;
}

// ---- metadata JSON --------------------------------------------------------

std::string frame_metadata_to_json(const FrameMetadata& md) {
    json objects = json::array();
    for (const auto& o : md.objects)
        objects.push_back({{"instance_id", o.instance_id},
                           {"object_id", o.object_id},
                           {"noun", o.noun},
                           {"category", o.category},
                           {"color", o.color},
                           {"size", o.size},
                           {"material", o.material},
                           {"position", vec_json(o.position)},
                           {"show", {{"size", o.show_size}, {"color", o.show_color}, {"material", o.show_material}}},
                           {"pixels", o.pixels}});
    json humans = json::array();
    for (const auto& h : md.humans)
        humans.push_back({{"instance_id", h.instance_id},
                          {"ordinal", h.ordinal},
                          {"gender", h.gender},
                          {"clothing_id", h.clothing_id},
                          {"action", h.action},
                          {"clothing", h.clothing},
                          {"position", vec_json(h.position)},
                          {"pixels", h.pixels}});
    json relations = json::array();
    for (const auto& r : md.relations.relations)
        relations.push_back(json::array({r.subject, std::string(to_string(r.predicate)), r.object}));
    const auto& w = md.statement_weights;
    json j = {
        {"frame", {{"video", md.frame.video}, {"frame_index", md.frame.frame_index}, {"camera", md.frame.camera}}},
        {"scene", {{"env_id", md.env_id}, {"description", md.scene_description},
                   {"objects", md.scene_objects}, {"humans", md.scene_humans}}},
        {"objects", objects},
        {"humans", humans},
        {"relations", relations},
        {"camera",
         {{"camera_id", md.camera.camera_id},
          {"position", vec_json(md.camera.position)},
          {"look_at", vec_json(md.camera.look_at)},
          {"vertical_fov", md.camera.vertical_fov},
          {"width", md.camera.width},
          {"height", md.camera.height}}},
        {"caption",
         {{"seed", md.caption_seed},
          {"mode", std::string(to_string(md.caption_mode))},
          {"weights",
           {{"prefix_enumeration", w.prefix_enumeration},
            {"scene", w.scene},
            {"relation", w.relation},
            {"action", w.action},
            {"clothing", w.clothing}}}}},
    };
    return j.dump(1) + "\n";
}

FrameMetadata frame_metadata_from_json(std::string_view text) {
    try {
        const json j = json::parse(text.begin(), text.end());
        FrameMetadata md;
        const json& f = j.at("frame");
        md.frame = {f.at("video").get<int>(), f.at("frame_index").get<int>(), f.at("camera").get<int>()};
        const json& s = j.at("scene");
        md.env_id = s.at("env_id").get<std::string>();
        md.scene_description = s.at("description").get<std::string>();
        md.scene_objects = s.at("objects").get<int>();
        md.scene_humans = s.at("humans").get<int>();
        for (const auto& o : j.at("objects")) {
            ObjectEntry e;
            e.instance_id = o.at("instance_id").get<int>();
            e.object_id = o.at("object_id").get<std::string>();
            e.noun = o.at("noun").get<std::string>();
            e.category = o.at("category").get<std::string>();
            e.color = o.at("color").get<std::string>();
            e.size = o.at("size").get<std::string>();
            e.material = o.at("material").get<std::string>();
            e.position = vec_from(o.at("position"));
            e.show_size = o.at("show").at("size").get<bool>();
            e.show_color = o.at("show").at("color").get<bool>();
            e.show_material = o.at("show").at("material").get<bool>();
            e.pixels = o.at("pixels").get<std::size_t>();
            md.objects.push_back(std::move(e));
        }
        for (const auto& h : j.at("humans")) {
            HumanEntry e;
            e.instance_id = h.at("instance_id").get<int>();
            e.ordinal = h.at("ordinal").get<int>();
            e.gender = h.at("gender").get<std::string>();
            e.clothing_id = h.at("clothing_id").get<std::string>();
            e.action = h.at("action").get<std::string>();
            e.clothing = h.at("clothing").get<std::vector<std::string>>();
            e.position = vec_from(h.at("position"));
            e.pixels = h.at("pixels").get<std::size_t>();
            md.humans.push_back(std::move(e));
        }
        for (const auto& r : j.at("relations")) {
            auto p = parse_predicate(r.at(1).get<std::string>());
            if (!p) throw std::runtime_error("unknown predicate " + r.at(1).get<std::string>());
            md.relations.relations.push_back({r.at(0).get<int>(), *p, r.at(2).get<int>()});
        }
        std::sort(md.relations.relations.begin(), md.relations.relations.end());
        const json& c = j.at("camera");
        md.camera.camera_id = c.at("camera_id").get<int>();
        md.camera.position = vec_from(c.at("position"));
        md.camera.look_at = vec_from(c.at("look_at"));
        md.camera.vertical_fov = c.at("vertical_fov").get<double>();
        md.camera.width = c.at("width").get<int>();
        md.camera.height = c.at("height").get<int>();
        const json& cap = j.at("caption");
        md.caption_seed = cap.at("seed").get<std::uint64_t>();
        auto mode = parse_caption_mode(cap.at("mode").get<std::string>());
        if (!mode) throw std::runtime_error("unknown caption mode");
        md.caption_mode = *mode;
        const json& w = cap.at("weights");
        md.statement_weights = {w.at("prefix_enumeration").get<double>(), w.at("scene").get<double>(),
                                w.at("relation").get<double>(), w.at("action").get<double>(),
                                w.at("clothing").get<double>()};
        return md;
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("frame metadata parse error: ") + e.what());
    }
}

}  // namespace forge
