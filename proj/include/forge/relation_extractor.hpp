#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <utility>
#include <vector>

#include "forge/camera_raster.hpp"

namespace forge {

enum class Predicate { left_of, right_of, in_front_of, behind };
std::string_view to_string(Predicate p);
std::optional<Predicate> parse_predicate(std::string_view s);

struct Relation {
    int subject = 0;
    Predicate predicate = Predicate::left_of;
    int object = 0;
    auto operator<=>(const Relation&) const = default;
};

struct RelationSet {
    std::vector<Relation> relations;  // sorted
    bool contains(int subject, Predicate p, int object) const;
    bool operator==(const RelationSet&) const = default;
};

inline constexpr std::size_t kVisibilityThreshold = 25;  // mask pixels
inline constexpr double kAlignmentOverlap = 0.5;         // fraction of the shorter bbox height
inline constexpr double kDepthDeadBand = 0.05;           // metres

class AbsentInstance : public std::runtime_error {
public:
    explicit AbsentInstance(int id) : std::runtime_error("instance " + std::to_string(id) + " is not in the mask"), id(id) {}
    int id;
};

bool horizontally_aligned(const Coverage& a, const Coverage& b);
bool horizontally_aligned(const FrameBuffers& buffers, int a, int b);

/// (left, right) by mask centroid x; nullopt on equal centroids.
std::optional<std::pair<int, int>> left_right(const FrameBuffers& buffers, int a, int b);
std::optional<std::pair<int, int>> left_right(int a, const Coverage& ca, int b, const Coverage& cb);

/// (front, back) by camera-space z of instance centres; nullopt inside the dead band.
std::optional<std::pair<int, int>> front_back(const Camera& camera, const FramePrimitives& frame, int a, int b);
std::optional<std::pair<int, int>> front_back(const Camera& camera, int a, const Vec3& center_a, int b,
                                              const Vec3& center_b);

/// Camera-space coverage for every non-background instance id present in the mask.
std::map<int, Coverage> coverage_by_instance(const FrameBuffers& buffers);

RelationSet extract_relations(const FramePrimitives& frame, const Camera& camera, const FrameBuffers& buffers);

/// Antisymmetry and no-self checks; returns a description of the first violation.
std::optional<std::string> check_relation_set(const RelationSet& set);

}  // namespace forge
