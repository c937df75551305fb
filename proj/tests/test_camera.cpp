#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "dogfit/camera.hpp"
#include "dogfit/nn.hpp"
#include "dogfit/raster.hpp"
#include "dogfit/synth.hpp"

using namespace dogfit;

namespace {

Camera simple_cam() {
    Camera cam;
    cam.id = "c";
    cam.fx = cam.fy = 100.0;
    cam.cx = cam.cy = 50.0;
    cam.width = cam.height = 101;
    return cam;  // world == camera frame
}

}  // namespace

TEST_CASE("pinhole projection") {
    const Camera cam = simple_cam();
    const Projected<double> p0 = project(cam, Vec3<double>{0, 0, 1});
    CHECK(p0.valid);
    CHECK(p0.pixel.x == Catch::Approx(50.0));
    CHECK(p0.pixel.y == Catch::Approx(50.0));

    const Projected<double> p1 = project(cam, Vec3<double>{0.5, 0, 1});
    CHECK(p1.pixel.x == Catch::Approx(100.0));
    CHECK(p1.pixel.y == Catch::Approx(50.0));

    CHECK_FALSE(project(cam, Vec3<double>{0, 0, -1}).valid);
    CHECK_FALSE(project(cam, Vec3<double>{0, 0, 0}).valid);
}

TEST_CASE("project/backproject round trip") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g(0.0, 1.0);
    SynthSpec spec;
    const CameraRig rig = make_ring_rig(spec);
    for (const Camera& cam : rig.cameras)
        for (int rep = 0; rep < 30; ++rep) {
            const Vec3<double> x{0.5 * g(rng), 0.5 * g(rng), 0.4 + 0.2 * g(rng)};
            const Projected<double> p = project(cam, x);
            if (!p.valid) continue;
            const Vec3<double> back = backproject_pixel(cam, p.pixel.x, p.pixel.y, p.depth);
            CHECK(norm(back - x) < 1e-9);
        }
}

TEST_CASE("backproject masked depth") {
    const Camera cam = simple_cam();
    SECTION("all-zero mask gives an empty set") {
        MaskImage mask(cam.width, cam.height, 0);
        DepthImage depth(cam.width, cam.height, 1000);
        CHECK(backproject(cam, depth, mask).empty());
    }
    SECTION("single principal-point pixel lies on the optical axis") {
        MaskImage mask(cam.width, cam.height, 0);
        DepthImage depth(cam.width, cam.height, 0);
        mask.at(50, 50) = 255;
        depth.at(50, 50) = 2000;  // 2 m at depth_unit 0.001
        const auto pts = backproject(cam, depth, mask);
        REQUIRE(pts.size() == 1);
        CHECK(std::abs(pts[0].x) < 1e-12);
        CHECK(std::abs(pts[0].y) < 1e-12);
        CHECK(pts[0].z == Catch::Approx(2.0));
    }
    SECTION("dimension mismatch is an error") {
        MaskImage mask(10, 10, 255);
        DepthImage depth(11, 10, 1);
        CHECK_THROWS_AS(backproject(cam, depth, mask), CameraError);
    }
}

TEST_CASE("backprojected synthetic render lies on the mesh surface") {
    SynthSpec spec;
    spec.frame_count = 2;
    spec.image_width = 320;
    spec.image_height = 240;
    spec.focal_px = 260;
    const TemplateAssets assets = make_template(spec.seed, spec.size_class);
    const CameraRig rig = make_ring_rig(spec);
    const BodyState gt = synth_motion(assets, spec);
    const PosedMesh<double> mesh = pose_mesh(assets, gt, 0);
    const Camera& cam = rig.cameras[1];
    const DepthImage depth = render_depth(mesh, cam);
    const MaskImage mask = rasterize_silhouette(mesh, cam);
    const auto cloud = backproject(cam, depth, mask);
    REQUIRE(cloud.size() > 200);

    // distance to the densely sampled surface as the point-to-mesh oracle
    const auto surf = sample_surface(mesh, assets.leg_faces, 60000, 1.0, 7);
    const Grid3 grid(surf);
    double worst = 0.0;
    for (const auto& p : cloud) {
        const int j = grid.nearest(p);
        worst = std::max(worst, norm(p - surf[static_cast<std::size_t>(j)]));
    }
    // quantization is 2 * depth_unit; sparse sampling adds a small slack
    CHECK(worst < 2.0 * cam.depth_unit + 0.01);
}

TEST_CASE("rasterizer") {
    Camera cam = simple_cam();

    SECTION("mesh fully behind the camera renders nothing") {
        PosedMesh<double> mesh;
        mesh.vertices = {{0, 0, -1}, {1, 0, -1}, {0, 1, -1}};
        std::vector<std::array<int, 3>> faces = {{0, 1, 2}};
        mesh.faces = &faces;
        const MaskImage sil = rasterize_silhouette(mesh, cam);
        for (auto v : sil.data) CHECK(v == 0);
    }

    SECTION("axis-aligned square covers its projected area") {
        // square [-0.2, 0.2]^2 at z=1: projects to 40x40 px centered at (50,50)
        PosedMesh<double> mesh;
        mesh.vertices = {{-0.2, -0.2, 1}, {0.2, -0.2, 1}, {0.2, 0.2, 1}, {-0.2, 0.2, 1}};
        std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 2, 3}};
        mesh.faces = &faces;
        const MaskImage sil = rasterize_silhouette(mesh, cam);
        long covered = 0;
        for (auto v : sil.data) covered += v ? 1 : 0;
        const double area = 40.0 * 40.0, perim = 4.0 * 40.0;
        CHECK(std::abs(covered - area) <= perim + 4.0);
    }

    SECTION("plane at z=2 stores 2/depth_unit") {
        PosedMesh<double> mesh;
        mesh.vertices = {{-0.5, -0.5, 2}, {0.5, -0.5, 2}, {0.5, 0.5, 2}, {-0.5, 0.5, 2}};
        std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 2, 3}};
        mesh.faces = &faces;
        const DepthImage depth = render_depth(mesh, cam);
        long covered = 0;
        for (auto v : depth.data)
            if (v != 0) {
                CHECK(v == 2000);
                ++covered;
            }
        CHECK(covered > 100);
    }

    SECTION("z-buffer keeps the nearer of two planes") {
        PosedMesh<double> mesh;
        mesh.vertices = {{-0.5, -0.5, 2}, {0.5, -0.5, 2}, {0.5, 0.5, 2}, {-0.5, 0.5, 2},
                         {-0.5, -0.5, 1}, {0.5, -0.5, 1}, {0.5, 0.5, 1}, {-0.5, 0.5, 1}};
        std::vector<std::array<int, 3>> faces = {{0, 1, 2}, {0, 2, 3}, {4, 5, 6}, {4, 6, 7}};
        mesh.faces = &faces;
        const DepthImage depth = render_depth(mesh, cam);
        for (auto v : depth.data)
            if (v != 0) CHECK(v == 1000);
    }

    SECTION("silhouette equals depth > 0") {
        SynthSpec spec;
        spec.frame_count = 2;
        spec.image_width = 160;
        spec.image_height = 120;
        spec.focal_px = 130;
        const TemplateAssets assets = make_template(1, 0.4);
        const CameraRig rig = make_ring_rig(spec);
        const BodyState gt = synth_motion(assets, spec);
        const PosedMesh<double> mesh = pose_mesh(assets, gt, 0);
        for (const Camera& c : rig.cameras) {
            const MaskImage sil = rasterize_silhouette(mesh, c);
            const DepthImage depth = render_depth(mesh, c);
            for (std::size_t i = 0; i < sil.data.size(); ++i)
                CHECK((sil.data[i] != 0) == (depth.data[i] != 0));
        }
    }
}

TEST_CASE("camera validation") {
    Camera cam = simple_cam();
    CHECK_NOTHROW(cam.validate());
    cam.world_to_cam.rot(0, 0) = 2.0;
    CHECK_THROWS_AS(cam.validate(), CameraError);
    Camera bad = simple_cam();
    bad.fx = -1;
    CHECK_THROWS_AS(bad.validate(), CameraError);
}
