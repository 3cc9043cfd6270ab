#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "forge/asset_catalog.hpp"
#include "forge/geometry.hpp"
#include "forge/rng.hpp"

namespace forge {

// Camera frame: +z looks from position towards look_at, +x is image right, +y is
// image up (world up projected). Pixel (0,0) is the top-left corner; pixel
// centres sit at half-integer coordinates.

struct CameraBasis {
    Vec3 right, up, forward;
};

struct Camera {
    int camera_id = 0;
    Vec3 position;
    Vec3 look_at{0, 0, 1};
    double vertical_fov = kPi / 3;
    int width = 128;
    int height = 128;

    CameraBasis basis() const;
    /// Focal length in pixels, from the vertical field of view.
    double focal_px() const;
    bool operator==(const Camera&) const = default;
};

struct CameraRig {
    Vec3 center;
    std::vector<Camera> cameras;
    bool operator==(const CameraRig&) const = default;
};

inline constexpr double kRingRadiusMin = 2.5;
inline constexpr double kRingRadiusMax = 5.0;
inline constexpr double kRingHeightMin = 1.2;
inline constexpr double kRingHeightMax = 2.0;

/// n cameras at azimuth phase + 2πk/n; per-camera radius and height drawn from the ring ranges.
CameraRig place_camera_ring(const Vec3& center, int n, RandomStream& stream, int width = 128, int height = 128,
                            double vertical_fov = kPi / 3);

struct Projection {
    double x = 0, y = 0;  // continuous pixel coordinates
    double depth = 0;     // camera-space z
};

/// nullopt means the point is behind (or on) the camera plane.
std::optional<Projection> project(const Camera& camera, const Vec3& world);
Vec3 unproject(const Camera& camera, double x, double y, double depth);

struct Ray {
    Vec3 origin;
    Vec3 direction;  // camera-forward component is exactly 1, so ray parameter == depth
};

Ray pixel_ray(const Camera& camera, double x, double y);

struct BoxShape {
    Vec3 center;
    Vec3 half;
    double yaw = 0;
};

struct Primitive {
    int instance_id = 0;
    int category_id = 0;
    std::variant<BoxShape, Capsule> shape;
    Vec3 tint;
    double gloss = 0;
};

struct InstanceInfo {
    int instance_id = 0;
    int category_id = 0;
    Vec3 center;  // world-space centre used for front/back ordering
    bool human = false;
};

struct FramePrimitives {
    std::vector<Primitive> primitives;
    std::vector<InstanceInfo> instances;  // ascending instance_id
    Vec3 background{0.62, 0.70, 0.78};
    Vec3 floor_tint{0.45, 0.42, 0.38};

    const InstanceInfo* find(int instance_id) const;
};

struct Hit {
    double t = 0;
    Vec3 normal;
};

std::optional<Hit> intersect(const Ray& ray, const BoxShape& box);
std::optional<Hit> intersect(const Ray& ray, const Capsule& capsule);
std::optional<Hit> intersect(const Ray& ray, const Primitive& prim);
Aabb primitive_bounds(const Primitive& prim);

/// Specular weight per material family, used by the flat shader.
double family_gloss(MaterialFamily family);

inline constexpr float kDepthBackground = std::numeric_limits<float>::infinity();

struct FrameBuffers {
    int width = 0;
    int height = 0;
    std::vector<float> rgb;  // interleaved, row-major, in [0,1]
    std::vector<float> depth;
    std::vector<std::uint16_t> instance_mask;
    std::vector<std::uint16_t> category_mask;

    FrameBuffers() = default;
    FrameBuffers(int w, int h);
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width + x; }
};

FrameBuffers rasterize_frame(const FramePrimitives& frame, const Camera& camera);

struct PixelBox {
    int x0 = 0, y0 = 0, x1 = -1, y1 = -1;  // inclusive
    int height() const { return y1 - y0 + 1; }
};

struct Coverage {
    std::size_t count = 0;
    double centroid_x = 0, centroid_y = 0;
    PixelBox bbox;
    bool present() const { return count > 0; }
};

Coverage pixel_coverage(const FrameBuffers& buffers, int instance_id);

}  // namespace forge
