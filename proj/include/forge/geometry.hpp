#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace forge {

// World frame: y is up, the floor is the plane y = 0. Yaw rotates about +y.
struct Vec3 {
    double x = 0, y = 0, z = 0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr bool operator==(const Vec3&) const = default;
    constexpr double operator[](int axis) const { return axis == 0 ? x : axis == 1 ? y : z; }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }
constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(const Vec3& v) { return v / norm(v); }
constexpr Vec3 cwise_min(const Vec3& a, const Vec3& b) {
    return {std::min(a.x, b.x), std::min(a.y, b.y), std::min(a.z, b.z)};
}
constexpr Vec3 cwise_max(const Vec3& a, const Vec3& b) {
    return {std::max(a.x, b.x), std::max(a.y, b.y), std::max(a.z, b.z)};
}
inline bool is_finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

/// Rotation by `yaw` radians about +y: x' = x cos + z sin, z' = -x sin + z cos.
inline Vec3 rotate_yaw(const Vec3& v, double yaw) {
    const double c = std::cos(yaw), s = std::sin(yaw);
    return {c * v.x + s * v.z, v.y, -s * v.x + c * v.z};
}

struct Aabb {
    Vec3 lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
            std::numeric_limits<double>::infinity()};
    Vec3 hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
            -std::numeric_limits<double>::infinity()};

    bool empty() const { return lo.x > hi.x || lo.y > hi.y || lo.z > hi.z; }
    Vec3 center() const { return (lo + hi) * 0.5; }
    void expand(const Vec3& p) { lo = cwise_min(lo, p); hi = cwise_max(hi, p); }
    void expand(const Aabb& b) { lo = cwise_min(lo, b.lo); hi = cwise_max(hi, b.hi); }
};

/// Positive-volume intersection. Boxes that only touch (within `tol`) do not count.
inline bool interpenetrates(const Aabb& a, const Aabb& b, double tol = 1e-9) {
    for (int axis = 0; axis < 3; ++axis) {
        if (std::min(a.hi[axis], b.hi[axis]) - std::max(a.lo[axis], b.lo[axis]) <= tol) return false;
    }
    return true;
}

/// Bounds of a box with half-extents `half`, yawed and centred at `center`.
inline Aabb yawed_box_bounds(const Vec3& center, const Vec3& half, double yaw) {
    const double c = std::abs(std::cos(yaw)), s = std::abs(std::sin(yaw));
    const Vec3 r{c * half.x + s * half.z, half.y, s * half.x + c * half.z};
    return {center - r, center + r};
}

struct Capsule {
    Vec3 p0;
    Vec3 p1;
    double radius = 0;
};

inline Aabb capsule_bounds(const Capsule& c) {
    const Vec3 r{c.radius, c.radius, c.radius};
    return {cwise_min(c.p0, c.p1) - r, cwise_max(c.p0, c.p1) + r};
}

/// Axis-aligned rectangle in the floor plane (x, z).
struct FloorRect {
    double x_min = 0, z_min = 0, x_max = 0, z_max = 0;

    bool contains(const FloorRect& o) const {
        return o.x_min >= x_min && o.z_min >= z_min && o.x_max <= x_max && o.z_max <= z_max;
    }
    double cx() const { return 0.5 * (x_min + x_max); }
    double cz() const { return 0.5 * (z_min + z_max); }
};

constexpr double kPi = 3.14159265358979323846;

}  // namespace forge
