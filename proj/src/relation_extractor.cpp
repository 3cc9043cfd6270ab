#include "forge/relation_extractor.hpp"

#include <algorithm>
#include <cmath>

namespace forge {

std::string_view to_string(Predicate p) {
    switch (p) {
        case Predicate::left_of: return "left_of";
        case Predicate::right_of: return "right_of";
        case Predicate::in_front_of: return "in_front_of";
        case Predicate::behind: return "behind";
    }
    return "?";
}

std::optional<Predicate> parse_predicate(std::string_view s) {
    for (auto p : {Predicate::left_of, Predicate::right_of, Predicate::in_front_of, Predicate::behind})
        if (to_string(p) == s) return p;
    return std::nullopt;
}

bool RelationSet::contains(int subject, Predicate p, int object) const {
    return std::binary_search(relations.begin(), relations.end(), Relation{subject, p, object});
}

bool horizontally_aligned(const Coverage& a, const Coverage& b) {
    const int overlap = std::min(a.bbox.y1, b.bbox.y1) - std::max(a.bbox.y0, b.bbox.y0) + 1;
    return overlap >= kAlignmentOverlap * std::min(a.bbox.height(), b.bbox.height());
}

bool horizontally_aligned(const FrameBuffers& buffers, int a, int b) {
    const Coverage ca = pixel_coverage(buffers, a), cb = pixel_coverage(buffers, b);
    if (!ca.present()) throw AbsentInstance(a);
    if (!cb.present()) throw AbsentInstance(b);
    return horizontally_aligned(ca, cb);
}

std::optional<std::pair<int, int>> left_right(int a, const Coverage& ca, int b, const Coverage& cb) {
    if (ca.centroid_x < cb.centroid_x) return std::pair{a, b};
    if (cb.centroid_x < ca.centroid_x) return std::pair{b, a};
    return std::nullopt;
}

std::optional<std::pair<int, int>> left_right(const FrameBuffers& buffers, int a, int b) {
    const Coverage ca = pixel_coverage(buffers, a), cb = pixel_coverage(buffers, b);
    if (!ca.present()) throw AbsentInstance(a);
    if (!cb.present()) throw AbsentInstance(b);
    return left_right(a, ca, b, cb);
}

std::optional<std::pair<int, int>> front_back(const Camera& camera, int a, const Vec3& center_a, int b,
                                              const Vec3& center_b) {
    const Vec3 f = camera.basis().forward;
    const double za = dot(center_a - camera.position, f);
    const double zb = dot(center_b - camera.position, f);
    if (std::abs(za - zb) < kDepthDeadBand) return std::nullopt;
    return za < zb ? std::pair{a, b} : std::pair{b, a};
}

std::optional<std::pair<int, int>> front_back(const Camera& camera, const FramePrimitives& frame, int a, int b) {
    const InstanceInfo* ia = frame.find(a);
    const InstanceInfo* ib = frame.find(b);
    if (!ia) throw AbsentInstance(a);
    if (!ib) throw AbsentInstance(b);
    return front_back(camera, a, ia->center, b, ib->center);
}

std::map<int, Coverage> coverage_by_instance(const FrameBuffers& buffers) {
    std::map<int, Coverage> out;
    std::map<int, std::pair<double, double>> sums;
    for (int y = 0; y < buffers.height; ++y) {
        for (int x = 0; x < buffers.width; ++x) {
            const int id = buffers.instance_mask[buffers.index(x, y)];
            if (id == 0) continue;
            auto [it, fresh] = out.try_emplace(id);
            Coverage& c = it->second;
            if (fresh) c.bbox = {x, y, x, y};
            ++c.count;
            sums[id].first += x;
            sums[id].second += y;
            c.bbox.x0 = std::min(c.bbox.x0, x);
            c.bbox.y0 = std::min(c.bbox.y0, y);
            c.bbox.x1 = std::max(c.bbox.x1, x);
            c.bbox.y1 = std::max(c.bbox.y1, y);
        }
    }
    for (auto& [id, c] : out) {
        c.centroid_x = sums[id].first / static_cast<double>(c.count);
        c.centroid_y = sums[id].second / static_cast<double>(c.count);
    }
    return out;
}

RelationSet extract_relations(const FramePrimitives& frame, const Camera& camera, const FrameBuffers& buffers) {
    const auto coverage = coverage_by_instance(buffers);
    std::vector<std::pair<int, const Coverage*>> visible;
    for (const auto& [id, c] : coverage)
        if (c.count >= kVisibilityThreshold && frame.find(id)) visible.emplace_back(id, &c);

    RelationSet set;
    for (std::size_t i = 0; i < visible.size(); ++i) {
        for (std::size_t j = i + 1; j < visible.size(); ++j) {
            const auto [a, ca] = visible[i];
            const auto [b, cb] = visible[j];
            if (horizontally_aligned(*ca, *cb)) {
                if (auto lr = left_right(a, *ca, b, *cb)) {
                    set.relations.push_back({lr->first, Predicate::left_of, lr->second});
                    set.relations.push_back({lr->second, Predicate::right_of, lr->first});
                }
            }
            if (auto fb = front_back(camera, frame, a, b)) {
                set.relations.push_back({fb->first, Predicate::in_front_of, fb->second});
                set.relations.push_back({fb->second, Predicate::behind, fb->first});
            }
        }
    }
    std::sort(set.relations.begin(), set.relations.end());
    return set;
}

std::optional<std::string> check_relation_set(const RelationSet& set) {
    for (const auto& r : set.relations) {
        if (r.subject == r.object) return "self relation on instance " + std::to_string(r.subject);
        Predicate inverse = r.predicate;
        switch (r.predicate) {
            case Predicate::left_of: inverse = Predicate::right_of; break;
            case Predicate::right_of: inverse = Predicate::left_of; break;
            case Predicate::in_front_of: inverse = Predicate::behind; break;
            case Predicate::behind: inverse = Predicate::in_front_of; break;
        }
        if (!set.contains(r.object, inverse, r.subject))
            return "missing inverse of " + std::to_string(r.subject) + " " + std::string(to_string(r.predicate)) + " " +
                   std::to_string(r.object);
    }
    return std::nullopt;
}

}  // namespace forge
