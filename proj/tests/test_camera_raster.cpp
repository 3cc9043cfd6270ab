#include <cmath>
#include <map>

#include "doctest.h"
#include "forge/camera_raster.hpp"
#include "oracles/ray_oracle.hpp"
#include "support.hpp"

using namespace forge;

namespace {

Camera axis_camera(double fov, int w, int h) {
    Camera c;
    c.position = {0, 0, 0};
    c.look_at = {0, 0, 1};
    c.vertical_fov = fov;
    c.width = w;
    c.height = h;
    return c;
}

Primitive box_prim(int id, const Vec3& center, const Vec3& half, double yaw = 0) {
    Primitive p;
    p.instance_id = id;
    p.category_id = id + 10;
    p.shape = BoxShape{center, half, yaw};
    p.tint = {0.5, 0.5, 0.5};
    return p;
}

FramePrimitives frame_of(std::vector<Primitive> prims) {
    FramePrimitives f;
    f.primitives = std::move(prims);
    for (const auto& p : f.primitives)
        if (!f.find(p.instance_id)) f.instances.push_back({p.instance_id, p.category_id, primitive_bounds(p).center(), false});
    std::sort(f.instances.begin(), f.instances.end(),
              [](const InstanceInfo& a, const InstanceInfo& b) { return a.instance_id < b.instance_id; });
    return f;
}

}  // namespace

TEST_CASE("projection examples") {
    const Camera cam = axis_camera(kPi / 2, 100, 100);
    auto p = project(cam, {0, 0, 1});
    REQUIRE(p);
    CHECK(p->x == doctest::Approx(50.0));
    CHECK(p->y == doctest::Approx(50.0));
    CHECK(p->depth == doctest::Approx(1.0));
    CHECK_FALSE(project(cam, {0, 0, -1}));
    CHECK_FALSE(project(cam, {1, 0, 0}));
    p = project(cam, {1, 0, 1});
    REQUIRE(p);
    CHECK(p->x == doctest::Approx(100.0));
    CHECK(p->depth == doctest::Approx(1.0));
    p = project(cam, {0, 1, 1});
    CHECK(p->y == doctest::Approx(0.0));  // image y grows downwards
}

TEST_CASE("projection round trip inside the frustum") {
    RandomStream rs(77);
    for (int i = 0; i < 2000; ++i) {
        Camera cam;
        cam.position = {rs.uniform(-5, 5), rs.uniform(0.5, 3), rs.uniform(-5, 5)};
        cam.look_at = {rs.uniform(-1, 1), rs.uniform(0, 1), rs.uniform(-1, 1)};
        cam.vertical_fov = rs.uniform(0.5, 1.5);
        const Projection target{rs.uniform(0, cam.width), rs.uniform(0, cam.height), rs.uniform(0.2, 20)};
        const Vec3 w = unproject(cam, target.x, target.y, target.depth);
        const auto p = project(cam, w);
        REQUIRE(p);
        CHECK(std::abs(p->x - target.x) < 1e-6);
        CHECK(std::abs(p->depth - target.depth) < 1e-6);
        CHECK(norm(unproject(cam, p->x, p->y, p->depth) - w) < 1e-6);
        // independent view matrix agrees on camera depth
        CHECK(oracle::to_camera(cam, w)[2] == doctest::Approx(target.depth).epsilon(1e-9));
    }
}

TEST_CASE("camera ring construction") {
    RandomStream a(3), b(3);
    const CameraRig rig = place_camera_ring({0.5, 0.6, -0.2}, 4, a);
    CHECK(rig == place_camera_ring({0.5, 0.6, -0.2}, 4, b));
    REQUIRE(rig.cameras.size() == 4);
    auto azimuth = [&](const Camera& c) { return std::atan2(c.position.z - rig.center.z, c.position.x - rig.center.x); };
    for (int k = 0; k < 4; ++k) {
        double diff = azimuth(rig.cameras[(k + 1) % 4]) - azimuth(rig.cameras[k]);
        diff = std::remainder(diff, 2 * kPi);
        CHECK(diff == doctest::Approx(kPi / 2).epsilon(1e-9));
    }
    for (int n = 4; n <= 12; ++n) {
        RandomStream rs(static_cast<std::uint64_t>(n));
        for (const auto& c : place_camera_ring({0, 0.6, 0}, n, rs).cameras) {
            const double r = std::hypot(c.position.x, c.position.z);
            CHECK(r >= kRingRadiusMin);
            CHECK(r <= kRingRadiusMax);
            CHECK(c.position.y >= kRingHeightMin);
            CHECK(c.position.y <= kRingHeightMax);
            CHECK(c.look_at == Vec3{0, 0.6, 0});
        }
    }
    CHECK_THROWS(place_camera_ring({}, 3, a));
    CHECK_THROWS(place_camera_ring({}, 13, a));
}

TEST_CASE("empty scene renders background") {
    const FrameBuffers fb = rasterize_frame(FramePrimitives{}, axis_camera(kPi / 3, 32, 24));
    CHECK(fb.width == 32);
    CHECK(fb.height == 24);
    for (std::size_t i = 0; i < fb.depth.size(); ++i) {
        CHECK(fb.instance_mask[i] == 0);
        CHECK(std::isinf(fb.depth[i]));
        CHECK(fb.depth[i] > 0);
    }
}

TEST_CASE("unit cube two metres ahead") {
    const Camera cam = axis_camera(kPi / 3, 64, 64);
    const FrameBuffers fb = rasterize_frame(frame_of({box_prim(7, {0, 0, 2}, {0.5, 0.5, 0.5})}), cam);
    const auto c = fb.index(32, 32);
    CHECK(fb.instance_mask[c] == 7);
    CHECK(fb.category_mask[c] == 17);
    CHECK(fb.depth[c] == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(fb.instance_mask[fb.index(0, 0)] == 0);
}

TEST_CASE("nearer box wins overlapping pixels") {
    const Camera cam = axis_camera(kPi / 3, 64, 64);
    const auto frame = frame_of({box_prim(2, {0.8, 0, 4}, {1.0, 1.0, 0.5}), box_prim(1, {0, 0, 2}, {0.4, 0.4, 0.4})});
    const FrameBuffers fb = rasterize_frame(frame, cam);
    int overlap = 0;
    for (int y = 0; y < 64; y += 2)
        for (int x = 0; x < 64; x += 2) {
            const auto truth = oracle::trace_pixel(frame, cam, x + 0.5, y + 0.5);
            const auto i = fb.index(x, y);
            REQUIRE(fb.instance_mask[i] == truth.instance_id);
            if (truth.instance_id) CHECK(std::abs(fb.depth[i] - truth.depth) <= 1e-4);
            const bool both = oracle::box_face_hit(oracle::camera_ray(cam, x + 0.5, y + 0.5),
                                                   std::get<BoxShape>(frame.primitives[0].shape)) &&
                              truth.instance_id == 1;
            overlap += both;
        }
    CHECK(overlap > 0);
    CHECK(fb.instance_mask[fb.index(32, 32)] == 1);
    CHECK(fb.depth[fb.index(32, 32)] == doctest::Approx(1.6).epsilon(1e-6));
}

TEST_CASE("depth ties go to the lower instance id") {
    const Camera cam = axis_camera(kPi / 3, 16, 16);
    const FrameBuffers fb =
        rasterize_frame(frame_of({box_prim(5, {0, 0, 3}, {0.5, 0.5, 0.5}), box_prim(3, {0, 0, 3}, {0.5, 0.5, 0.5})}), cam);
    CHECK(fb.instance_mask[fb.index(8, 8)] == 3);
}

TEST_CASE("capsule intersection matches the oracle") {
    RandomStream rs(41);
    for (int i = 0; i < 300; ++i) {
        Capsule cap{{rs.uniform(-1, 1), rs.uniform(0, 1), rs.uniform(3, 5)},
                    {rs.uniform(-1, 1), rs.uniform(0, 2), rs.uniform(3, 5)},
                    rs.uniform(0.05, 0.5)};
        Primitive p;
        p.instance_id = 1;
        p.shape = cap;
        const Camera cam = axis_camera(kPi / 2, 24, 24);
        const FrameBuffers fb = rasterize_frame(frame_of({p}), cam);
        for (int y = 0; y < 24; ++y)
            for (int x = 0; x < 24; ++x) {
                const auto truth = oracle::trace_pixel(frame_of({p}), cam, x + 0.5, y + 0.5);
                REQUIRE(fb.instance_mask[fb.index(x, y)] == truth.instance_id);
                if (truth.instance_id) REQUIRE(std::abs(fb.depth[fb.index(x, y)] - truth.depth) <= 1e-4);
            }
    }
}

TEST_CASE("yawed boxes match the face-plane oracle") {
    RandomStream rs(43);
    for (int i = 0; i < 200; ++i) {
        const auto frame = frame_of({box_prim(1, {rs.uniform(-1, 1), rs.uniform(-0.5, 0.5), rs.uniform(2.5, 5)},
                                              {rs.uniform(0.05, 0.8), rs.uniform(0.05, 0.8), rs.uniform(0.05, 0.8)},
                                              rs.uniform(0, 2 * kPi))});
        Camera cam = axis_camera(kPi / 2, 24, 24);
        cam.position = {rs.uniform(-0.5, 0.5), rs.uniform(-0.5, 0.5), 0};
        const FrameBuffers fb = rasterize_frame(frame, cam);
        for (int y = 0; y < 24; ++y)
            for (int x = 0; x < 24; ++x) {
                const auto truth = oracle::trace_pixel(frame, cam, x + 0.5, y + 0.5);
                REQUIRE(fb.instance_mask[fb.index(x, y)] == truth.instance_id);
                if (truth.instance_id) REQUIRE(std::abs(fb.depth[fb.index(x, y)] - truth.depth) <= 1e-4);
            }
    }
}

TEST_CASE("random demo frames: oracle agreement and buffer invariants") {
    for (int k = 0; k < 20; ++k) {
        const test::RandomFrame f = test::random_frame(500, k);
        const FrameBuffers fb = rasterize_frame(f.primitives, f.camera);
        const int W = fb.width, H = fb.height;
        std::map<int, int> cat_of;
        for (const auto& inst : f.primitives.instances) cat_of[inst.instance_id] = inst.category_id;
        std::size_t covered = 0;
        for (const auto& inst : f.primitives.instances) covered += pixel_coverage(fb, inst.instance_id).count;
        std::size_t background = 0;
        for (std::size_t i = 0; i < fb.instance_mask.size(); ++i) {
            const int id = fb.instance_mask[i];
            background += id == 0;
            CHECK((id != 0) == std::isfinite(fb.depth[i]));
            CHECK(fb.category_mask[i] == (id ? cat_of.at(id) : 0));
        }
        CHECK(covered + background == static_cast<std::size_t>(W * H));
        for (int gy = 0; gy < 32; ++gy)
            for (int gx = 0; gx < 32; ++gx) {
                const int x = gx * W / 32 + 1, y = gy * H / 32 + 2;
                const auto truth = oracle::trace_pixel(f.primitives, f.camera, x + 0.5, y + 0.5);
                REQUIRE(fb.instance_mask[fb.index(x, y)] == truth.instance_id);
                if (truth.instance_id) CHECK(std::abs(fb.depth[fb.index(x, y)] - truth.depth) <= 1e-4);
            }
    }
}

TEST_CASE("pixel coverage") {
    FrameBuffers fb(20, 20);
    CHECK_FALSE(pixel_coverage(fb, 5).present());
    fb.instance_mask[fb.index(10, 10)] = 5;
    fb.instance_mask[fb.index(12, 10)] = 5;
    const Coverage c = pixel_coverage(fb, 5);
    CHECK(c.count == 2);
    CHECK(c.centroid_x == 11.0);
    CHECK(c.centroid_y == 10.0);
    CHECK(c.bbox.x0 == 10);
    CHECK(c.bbox.x1 == 12);
    CHECK(c.bbox.height() == 1);
}

TEST_CASE("shading stays in range and glass is glossier than cardboard") {
    CHECK(family_gloss(MaterialFamily::cardboard) < family_gloss(MaterialFamily::glass));
    const test::RandomFrame f = test::random_frame(9, 1);
    const FrameBuffers fb = rasterize_frame(f.primitives, f.camera);
    for (float v : fb.rgb) {
        CHECK(v >= 0.0f);
        CHECK(v <= 1.0f);
    }
}
