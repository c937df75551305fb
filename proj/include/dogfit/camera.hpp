#pragma once

// Pinhole camera: projection, depth back-projection, cameras.json schema.
// Camera frame is the usual computer-vision convention (+z forward, +x right,
// +y down); the world frame has +z up with the floor at z = 0.

#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dogfit/image.hpp"
#include "dogfit/linalg.hpp"

namespace dogfit {

inline constexpr double kZNear = 1e-4;

struct CameraError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Camera {
    std::string id;
    double fx = 0, fy = 0, cx = 0, cy = 0;
    int width = 0, height = 0;
    Transform<double> world_to_cam;  // x_cam = R x_world + t
    double depth_unit = 0.001;       // meters per stored depth integer

    void validate() const {
        if (fx <= 0 || fy <= 0) throw CameraError("camera " + id + ": focal lengths must be > 0");
        if (width < 1 || height < 1) throw CameraError("camera " + id + ": bad image size");
        const Mat3<double>& r = world_to_cam.rot;
        const Mat3<double> rrt = r * r.transposed();
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (std::abs(rrt(i, j) - (i == j ? 1.0 : 0.0)) > 1e-6)
                    throw CameraError("camera " + id + ": rotation not orthonormal");
    }

    Vec3<double> cam_to_world(const Vec3<double>& xc) const {
        const Mat3<double> rt = world_to_cam.rot.transposed();
        return rt * (xc - world_to_cam.trans);
    }
};

struct CameraRig {
    std::string id;
    std::vector<Camera> cameras;

    void validate() const {
        if (cameras.empty()) throw CameraError("camera rig must contain at least one camera");
        for (std::size_t i = 0; i < cameras.size(); ++i) {
            cameras[i].validate();
            for (std::size_t j = i + 1; j < cameras.size(); ++j)
                if (cameras[i].id == cameras[j].id)
                    throw CameraError("duplicate camera id " + cameras[i].id);
        }
    }
};

template <class S>
struct Projected {
    Vec2<S> pixel;
    S depth;      // camera-frame z
    bool valid;   // false when behind the camera (z <= z_near)
};

template <class S>
Projected<S> project(const Camera& cam, const Vec3<S>& x_world) {
    const Mat3<double>& r = cam.world_to_cam.rot;
    Vec3<S> xc{S(r(0, 0)) * x_world.x + S(r(0, 1)) * x_world.y + S(r(0, 2)) * x_world.z +
                   S(cam.world_to_cam.trans.x),
               S(r(1, 0)) * x_world.x + S(r(1, 1)) * x_world.y + S(r(1, 2)) * x_world.z +
                   S(cam.world_to_cam.trans.y),
               S(r(2, 0)) * x_world.x + S(r(2, 1)) * x_world.y + S(r(2, 2)) * x_world.z +
                   S(cam.world_to_cam.trans.z)};
    Projected<S> out;
    out.depth = xc.z;
    out.valid = value_of(xc.z) > kZNear;
    if (out.valid) {
        out.pixel = {S(cam.fx) * (xc.x / xc.z) + S(cam.cx), S(cam.fy) * (xc.y / xc.z) + S(cam.cy)};
    } else {
        out.pixel = {S(0), S(0)};
    }
    return out;
}

template <class S>
std::vector<Projected<S>> project(const Camera& cam, const std::vector<Vec3<S>>& pts) {
    std::vector<Projected<S>> out;
    out.reserve(pts.size());
    for (const auto& p : pts) out.push_back(project(cam, p));
    return out;
}

// World-frame point for one pixel with known camera-frame depth (meters).
inline Vec3<double> backproject_pixel(const Camera& cam, double u, double v, double depth_m) {
    const Vec3<double> xc{(u - cam.cx) / cam.fx * depth_m, (v - cam.cy) / cam.fy * depth_m,
                          depth_m};
    return cam.cam_to_world(xc);
}

// Lift every masked pixel with valid depth into the world frame.
inline std::vector<Vec3<double>> backproject(const Camera& cam, const DepthImage& depth,
                                             const MaskImage& mask) {
    if (!depth.same_size(mask.width, mask.height))
        throw CameraError("backproject: depth and mask dimensions differ");
    std::vector<Vec3<double>> pts;
    for (int y = 0; y < depth.height; ++y)
        for (int x = 0; x < depth.width; ++x) {
            if (!mask.at(x, y)) continue;
            const std::uint16_t d = depth.at(x, y);
            if (d == 0) continue;  // missing depth
            // pixel index (x, y) samples the continuous image plane at (x, y)
            pts.push_back(backproject_pixel(cam, x, y, static_cast<double>(d) * cam.depth_unit));
        }
    return pts;
}

// ---- cameras.json ----------------------------------------------------------

inline void to_json(nlohmann::json& j, const Camera& c) {
    std::vector<double> r(9);
    for (int i = 0; i < 9; ++i) r[static_cast<std::size_t>(i)] = c.world_to_cam.rot.m[static_cast<std::size_t>(i)];
    j = {{"id", c.id},
         {"fx", c.fx},
         {"fy", c.fy},
         {"cx", c.cx},
         {"cy", c.cy},
         {"width", c.width},
         {"height", c.height},
         {"R", r},
         {"t", {c.world_to_cam.trans.x, c.world_to_cam.trans.y, c.world_to_cam.trans.z}},
         {"depth_unit", c.depth_unit}};
}

inline void from_json(const nlohmann::json& j, Camera& c) {
    c.id = j.at("id").get<std::string>();
    c.fx = j.at("fx").get<double>();
    c.fy = j.at("fy").get<double>();
    c.cx = j.at("cx").get<double>();
    c.cy = j.at("cy").get<double>();
    c.width = j.at("width").get<int>();
    c.height = j.at("height").get<int>();
    const auto r = j.at("R").get<std::vector<double>>();
    if (r.size() != 9) throw CameraError("cameras.json: R must have 9 entries");
    for (int i = 0; i < 9; ++i) c.world_to_cam.rot.m[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)];
    const auto t = j.at("t").get<std::vector<double>>();
    if (t.size() != 3) throw CameraError("cameras.json: t must have 3 entries");
    c.world_to_cam.trans = {t[0], t[1], t[2]};
    c.depth_unit = j.value("depth_unit", 0.001);
}

inline void to_json(nlohmann::json& j, const CameraRig& rig) {
    j = {{"rig_id", rig.id}, {"cameras", rig.cameras}};
}

inline void from_json(const nlohmann::json& j, CameraRig& rig) {
    rig.id = j.value("rig_id", std::string{"rig"});
    rig.cameras = j.at("cameras").get<std::vector<Camera>>();
}

inline CameraRig load_rig(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw CameraError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    CameraRig rig = j.get<CameraRig>();
    rig.validate();
    return rig;
}

inline void save_rig(const CameraRig& rig, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CameraError("cannot write " + path);
    out << nlohmann::json(rig).dump(2);
}

}  // namespace dogfit
