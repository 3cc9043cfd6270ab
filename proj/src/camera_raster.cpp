#include "forge/camera_raster.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace forge {

namespace {

constexpr double kHitEps = 1e-9;
const Vec3 kLightDir = normalized(Vec3{-0.35, 0.85, -0.40});  // towards the light
constexpr double kAmbient = 0.3;

double shade_channel(double tint, double ndl, double gloss) {
    return std::clamp(tint * (kAmbient + (1.0 - kAmbient) * ndl) + gloss * ndl * ndl, 0.0, 1.0);
}

// First positive root of |o + t d - center|^2 = r^2.
std::optional<double> sphere_entry(const Vec3& o, const Vec3& d, const Vec3& center, double r) {
    const Vec3 oc = o - center;
    const double a = dot(d, d);
    const double b = dot(oc, d);
    const double c = dot(oc, oc) - r * r;
    const double disc = b * b - a * c;
    if (disc < 0) return std::nullopt;
    const double t = (-b - std::sqrt(disc)) / a;
    if (t > kHitEps) return t;
    return std::nullopt;
}

}  // namespace

CameraBasis Camera::basis() const {
    const Vec3 f = normalized(look_at - position);
    Vec3 r = cross(Vec3{0, 1, 0}, f);
    if (norm(r) < 1e-9) r = cross(Vec3{0, 0, 1}, f);
    r = normalized(r);
    return {r, cross(f, r), f};
}

double Camera::focal_px() const { return 0.5 * height / std::tan(0.5 * vertical_fov); }

CameraRig place_camera_ring(const Vec3& center, int n, RandomStream& stream, int width, int height,
                            double vertical_fov) {
    if (n < 4 || n > 12) throw std::invalid_argument("camera ring size must be in [4,12], got " + std::to_string(n));
    CameraRig rig;
    rig.center = center;
    const double phase = stream.uniform(0.0, 2.0 * kPi);
    for (int k = 0; k < n; ++k) {
        const double azimuth = phase + 2.0 * kPi * k / n;
        const double radius = stream.uniform(kRingRadiusMin, kRingRadiusMax);
        const double h = stream.uniform(kRingHeightMin, kRingHeightMax);
        Camera cam;
        cam.camera_id = k;
        cam.position = {center.x + radius * std::cos(azimuth), h, center.z + radius * std::sin(azimuth)};
        cam.look_at = center;
        cam.vertical_fov = vertical_fov;
        cam.width = width;
        cam.height = height;
        rig.cameras.push_back(cam);
    }
    return rig;
}

std::optional<Projection> project(const Camera& camera, const Vec3& world) {
    const CameraBasis b = camera.basis();
    const Vec3 d = world - camera.position;
    const double z = dot(d, b.forward);
    if (!(z > 0)) return std::nullopt;
    const double f = camera.focal_px();
    return Projection{0.5 * camera.width + f * dot(d, b.right) / z, 0.5 * camera.height - f * dot(d, b.up) / z, z};
}

Vec3 unproject(const Camera& camera, double x, double y, double depth) {
    const CameraBasis b = camera.basis();
    const double f = camera.focal_px();
    const double xc = (x - 0.5 * camera.width) * depth / f;
    const double yc = -(y - 0.5 * camera.height) * depth / f;
    return camera.position + b.right * xc + b.up * yc + b.forward * depth;
}

Ray pixel_ray(const Camera& camera, double x, double y) {
    const CameraBasis b = camera.basis();
    const double f = camera.focal_px();
    return {camera.position,
            b.right * ((x - 0.5 * camera.width) / f) + b.up * (-(y - 0.5 * camera.height) / f) + b.forward};
}

const InstanceInfo* FramePrimitives::find(int instance_id) const {
    for (const auto& info : instances)
        if (info.instance_id == instance_id) return &info;
    return nullptr;
}

std::optional<Hit> intersect(const Ray& ray, const BoxShape& box) {
    // Slab test in the box's local frame.
    const Vec3 o = rotate_yaw(ray.origin - box.center, -box.yaw);
    const Vec3 d = rotate_yaw(ray.direction, -box.yaw);
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    int near_axis = -1, far_axis = -1;
    for (int axis = 0; axis < 3; ++axis) {
        const double oa = o[axis], da = d[axis], h = box.half[axis];
        if (std::abs(da) < 1e-15) {
            if (oa < -h || oa > h) return std::nullopt;
            continue;
        }
        double t1 = (-h - oa) / da, t2 = (h - oa) / da;
        if (t1 > t2) std::swap(t1, t2);
        if (t1 > t_near) { t_near = t1; near_axis = axis; }
        if (t2 < t_far) { t_far = t2; far_axis = axis; }
    }
    if (t_far < t_near) return std::nullopt;
    double t = 0;
    int axis = 0;
    if (t_near > kHitEps) { t = t_near; axis = near_axis; }
    else if (t_far > kHitEps) { t = t_far; axis = far_axis; }
    else return std::nullopt;
    Vec3 n{0, 0, 0};
    const double sign = d[axis] > 0 ? -1.0 : 1.0;
    (axis == 0 ? n.x : axis == 1 ? n.y : n.z) = t == t_near ? sign : -sign;
    return Hit{t, rotate_yaw(n, box.yaw)};
}

std::optional<Hit> intersect(const Ray& ray, const Capsule& cap) {
    // Capsule = finite cylinder body ∪ two end spheres; the first entry is the minimum over parts.
    const Vec3& o = ray.origin;
    const Vec3& d = ray.direction;
    const Vec3 axis = cap.p1 - cap.p0;
    const double len2 = dot(axis, axis);
    std::optional<double> best;
    Vec3 normal;
    auto consider = [&](double t, const Vec3& n) {
        if (!best || t < *best) { best = t; normal = n; }
    };
    if (len2 > 1e-18) {
        const Vec3 oa = o - cap.p0;
        const double dd = dot(d, d), da = dot(d, axis), oaa = dot(oa, axis);
        const double a = len2 * dd - da * da;
        const double b = len2 * dot(oa, d) - oaa * da;
        const double c = len2 * dot(oa, oa) - oaa * oaa - cap.radius * cap.radius * len2;
        if (a > 1e-18) {
            const double disc = b * b - a * c;
            if (disc >= 0) {
                const double t = (-b - std::sqrt(disc)) / a;
                const double s = oaa + t * da;  // axial coordinate * len2
                if (t > kHitEps && s > 0 && s < len2) {
                    const Vec3 q = o + d * t;
                    consider(t, normalized(q - (cap.p0 + axis * (s / len2))));
                }
            }
        }
    }
    for (const Vec3* c : {&cap.p0, &cap.p1}) {
        if (auto t = sphere_entry(o, d, *c, cap.radius)) consider(*t, normalized(o + d * *t - *c));
    }
    if (!best) return std::nullopt;
    return Hit{*best, normal};
}

std::optional<Hit> intersect(const Ray& ray, const Primitive& prim) {
    return std::visit([&](const auto& shape) { return intersect(ray, shape); }, prim.shape);
}

Aabb primitive_bounds(const Primitive& prim) {
    if (const auto* box = std::get_if<BoxShape>(&prim.shape)) return yawed_box_bounds(box->center, box->half, box->yaw);
    return capsule_bounds(std::get<Capsule>(prim.shape));
}

double family_gloss(MaterialFamily family) {
    switch (family) {
        case MaterialFamily::metal: return 0.35;
        case MaterialFamily::glass: return 0.25;
        case MaterialFamily::ceramic: return 0.15;
        case MaterialFamily::wood: return 0.05;
        case MaterialFamily::cardboard: return 0.0;
    }
    return 0.0;
}

FrameBuffers::FrameBuffers(int w, int h)
    : width(w),
      height(h),
      rgb(static_cast<std::size_t>(w) * h * 3, 0.0f),
      depth(static_cast<std::size_t>(w) * h, kDepthBackground),
      instance_mask(static_cast<std::size_t>(w) * h, 0),
      category_mask(static_cast<std::size_t>(w) * h, 0) {}

FrameBuffers rasterize_frame(const FramePrimitives& frame, const Camera& camera) {
    const int W = camera.width, H = camera.height;
    FrameBuffers out(W, H);

    // Screen rectangle per primitive (conservative); full screen if any corner is behind the camera.
    struct Rect { int x0, y0, x1, y1; };
    std::vector<Rect> rects;
    rects.reserve(frame.primitives.size());
    for (const auto& prim : frame.primitives) {
        const Aabb b = primitive_bounds(prim);
        Rect r{W, H, -1, -1};
        bool behind = false;
        for (int corner = 0; corner < 8 && !behind; ++corner) {
            const Vec3 p{corner & 1 ? b.hi.x : b.lo.x, corner & 2 ? b.hi.y : b.lo.y, corner & 4 ? b.hi.z : b.lo.z};
            auto proj = project(camera, p);
            if (!proj) { behind = true; break; }
            r.x0 = std::min(r.x0, static_cast<int>(std::floor(proj->x)) - 1);
            r.y0 = std::min(r.y0, static_cast<int>(std::floor(proj->y)) - 1);
            r.x1 = std::max(r.x1, static_cast<int>(std::ceil(proj->x)) + 1);
            r.y1 = std::max(r.y1, static_cast<int>(std::ceil(proj->y)) + 1);
        }
        if (behind) r = {0, 0, W - 1, H - 1};
        rects.push_back({std::max(r.x0, 0), std::max(r.y0, 0), std::min(r.x1, W - 1), std::min(r.y1, H - 1)});
    }

    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            const Ray ray = pixel_ray(camera, x + 0.5, y + 0.5);
            const Primitive* winner = nullptr;
            Hit best;
            for (std::size_t i = 0; i < frame.primitives.size(); ++i) {
                const Rect& r = rects[i];
                if (x < r.x0 || x > r.x1 || y < r.y0 || y > r.y1) continue;
                const Primitive& prim = frame.primitives[i];
                auto hit = intersect(ray, prim);
                if (!hit) continue;
                if (!winner || hit->t < best.t || (hit->t == best.t && prim.instance_id < winner->instance_id)) {
                    winner = &prim;
                    best = *hit;
                }
            }
            const std::size_t idx = out.index(x, y);
            Vec3 color;
            if (winner) {
                out.depth[idx] = static_cast<float>(best.t);
                out.instance_mask[idx] = static_cast<std::uint16_t>(winner->instance_id);
                out.category_mask[idx] = static_cast<std::uint16_t>(winner->category_id);
                const double ndl = std::max(0.0, dot(best.normal, kLightDir));
                color = {shade_channel(winner->tint.x, ndl, winner->gloss), shade_channel(winner->tint.y, ndl, winner->gloss),
                         shade_channel(winner->tint.z, ndl, winner->gloss)};
            } else if (ray.direction.y < 0) {
                const double ndl = std::max(0.0, kLightDir.y);
                color = {shade_channel(frame.floor_tint.x, ndl, 0), shade_channel(frame.floor_tint.y, ndl, 0),
                         shade_channel(frame.floor_tint.z, ndl, 0)};
            } else {
                color = frame.background;
            }
            out.rgb[3 * idx + 0] = static_cast<float>(color.x);
            out.rgb[3 * idx + 1] = static_cast<float>(color.y);
            out.rgb[3 * idx + 2] = static_cast<float>(color.z);
        }
    }
    return out;
}

Coverage pixel_coverage(const FrameBuffers& buffers, int instance_id) {
    Coverage cov;
    cov.bbox = {buffers.width, buffers.height, -1, -1};
    double sx = 0, sy = 0;
    for (int y = 0; y < buffers.height; ++y) {
        for (int x = 0; x < buffers.width; ++x) {
            if (buffers.instance_mask[buffers.index(x, y)] != instance_id) continue;
            ++cov.count;
            sx += x;
            sy += y;
            cov.bbox.x0 = std::min(cov.bbox.x0, x);
            cov.bbox.y0 = std::min(cov.bbox.y0, y);
            cov.bbox.x1 = std::max(cov.bbox.x1, x);
            cov.bbox.y1 = std::max(cov.bbox.y1, y);
        }
    }
    if (cov.count == 0) return Coverage{};
    cov.centroid_x = sx / static_cast<double>(cov.count);
    cov.centroid_y = sy / static_cast<double>(cov.count);
    return cov;
}

}  // namespace forge
