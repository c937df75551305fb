#pragma once

// Synthetic ground-truth generator: procedural quadruped template, scripted
// gait motion with exact foot anchoring, camera ring, and rendered multi-view
// observations with controllable noise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dogfit/assets.hpp"
#include "dogfit/camera.hpp"
#include "dogfit/model.hpp"
#include "dogfit/observation.hpp"
#include "dogfit/raster.hpp"

namespace dogfit {

enum class GaitType { Idle, Walk, Trot, Jump };

inline GaitType gait_from_string(const std::string& s) {
    if (s == "idle") return GaitType::Idle;
    if (s == "walk") return GaitType::Walk;
    if (s == "trot") return GaitType::Trot;
    if (s == "jump") return GaitType::Jump;
    throw std::invalid_argument("unknown gait type: " + s);
}

inline std::string gait_to_string(GaitType g) {
    switch (g) {
        case GaitType::Idle: return "idle";
        case GaitType::Walk: return "walk";
        case GaitType::Trot: return "trot";
        case GaitType::Jump: return "jump";
    }
    return "walk";
}

struct SynthSpec {
    std::uint64_t seed = 1;
    double size_class = 0.4;  // rest shoulder height, meters
    double scale = 1.2;       // ground-truth body scale s
    int camera_count = 5;
    double ring_radius = 2.5;
    double camera_height = 0.45;
    double pitch_jitter_deg = 10.0;
    int frame_count = 60;
    double fps = 15.0;
    GaitType gait = GaitType::Walk;
    int image_width = 640;
    int image_height = 480;
    double focal_px = 520.0;

    // noise controls
    double keypoint_sigma_px = 0.0;
    int mask_morph_px = 0;  // >0 dilate, <0 erode
    double depth_sigma_m = 0.0;
    double cse_dropout = 0.0;
    double cse_jitter_px = 3.0;
    int cse_per_frame = 300;

    void validate() const {
        if (frame_count < 2) throw std::invalid_argument("synth: frame_count must be >= 2");
        if (ring_radius <= 0) throw std::invalid_argument("synth: ring_radius must be > 0");
        if (keypoint_sigma_px < 0 || depth_sigma_m < 0 || cse_dropout < 0 || cse_jitter_px < 0)
            throw std::invalid_argument("synth: noise parameters must be >= 0");
    }
};

inline void to_json(nlohmann::json& j, const SynthSpec& s) {
    j = {{"seed", s.seed},
         {"size_class", s.size_class},
         {"scale", s.scale},
         {"camera_count", s.camera_count},
         {"ring_radius", s.ring_radius},
         {"camera_height", s.camera_height},
         {"pitch_jitter_deg", s.pitch_jitter_deg},
         {"frame_count", s.frame_count},
         {"fps", s.fps},
         {"gait", gait_to_string(s.gait)},
         {"image_width", s.image_width},
         {"image_height", s.image_height},
         {"focal_px", s.focal_px},
         {"keypoint_sigma_px", s.keypoint_sigma_px},
         {"mask_morph_px", s.mask_morph_px},
         {"depth_sigma_m", s.depth_sigma_m},
         {"cse_dropout", s.cse_dropout},
         {"cse_jitter_px", s.cse_jitter_px},
         {"cse_per_frame", s.cse_per_frame}};
}

inline void from_json(const nlohmann::json& j, SynthSpec& s) {
    SynthSpec d;
    s.seed = j.value("seed", d.seed);
    s.size_class = j.value("size_class", d.size_class);
    s.scale = j.value("scale", d.scale);
    s.camera_count = j.value("camera_count", d.camera_count);
    s.ring_radius = j.value("ring_radius", d.ring_radius);
    s.camera_height = j.value("camera_height", d.camera_height);
    s.pitch_jitter_deg = j.value("pitch_jitter_deg", d.pitch_jitter_deg);
    s.frame_count = j.value("frame_count", d.frame_count);
    s.fps = j.value("fps", d.fps);
    s.gait = gait_from_string(j.value("gait", std::string{"walk"}));
    s.image_width = j.value("image_width", d.image_width);
    s.image_height = j.value("image_height", d.image_height);
    s.focal_px = j.value("focal_px", d.focal_px);
    s.keypoint_sigma_px = j.value("keypoint_sigma_px", d.keypoint_sigma_px);
    s.mask_morph_px = j.value("mask_morph_px", d.mask_morph_px);
    s.depth_sigma_m = j.value("depth_sigma_m", d.depth_sigma_m);
    s.cse_dropout = j.value("cse_dropout", d.cse_dropout);
    s.cse_jitter_px = j.value("cse_jitter_px", d.cse_jitter_px);
    s.cse_per_frame = j.value("cse_per_frame", d.cse_per_frame);
}

// ---- procedural template ---------------------------------------------------

namespace synth_detail {

// Joint ids of the 35-joint skeleton built by make_template.
enum Joint : int {
    kRoot = 0,
    kSpine1,
    kSpine2,
    kChest,
    kNeck,
    kHead,
    kNose,
    kJaw,
    kEarL,
    kEarR,
    kShoulderL,
    kElbowL,
    kWristL,
    kFrontPawL,
    kShoulderR,
    kElbowR,
    kWristR,
    kFrontPawR,
    kHipL,
    kKneeL,
    kAnkleL,
    kRearPawL,
    kHipR,
    kKneeR,
    kAnkleR,
    kRearPawR,
    kTail0,  // tail chain kTail0..kTail8
};
inline constexpr int kJointCount = 35;

struct MeshPart {
    std::vector<Vec3<double>> vertices;
    std::vector<std::array<int, 3>> faces;
    bool is_leg = false;
};

inline MeshPart ellipsoid(const Vec3<double>& center, const Vec3<double>& semi, int nu, int nv,
                          bool is_leg = false) {
    MeshPart part;
    part.is_leg = is_leg;
    for (int i = 0; i <= nu; ++i) {
        const double u = std::numbers::pi * i / nu;  // polar
        for (int j = 0; j < nv; ++j) {
            const double v = 2.0 * std::numbers::pi * j / nv;
            part.vertices.push_back({center.x + semi.x * std::cos(u),
                                     center.y + semi.y * std::sin(u) * std::sin(v),
                                     center.z + semi.z * std::sin(u) * std::cos(v)});
        }
    }
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nv; ++j) {
            const int jn = (j + 1) % nv;
            const int a = i * nv + j, b = i * nv + jn, c = (i + 1) * nv + j, d = (i + 1) * nv + jn;
            part.faces.push_back({a, c, b});
            part.faces.push_back({b, c, d});
        }
    return part;
}

// Open tube along a polyline of ring centers with per-ring radius.
inline MeshPart tube(const std::vector<Vec3<double>>& centers, const std::vector<double>& radii,
                     int around, bool is_leg) {
    MeshPart part;
    part.is_leg = is_leg;
    const int nr = static_cast<int>(centers.size());
    for (int i = 0; i < nr; ++i) {
        // rings lie in planes perpendicular to the dominant (z) direction
        for (int j = 0; j < around; ++j) {
            const double a = 2.0 * std::numbers::pi * j / around;
            part.vertices.push_back({centers[static_cast<std::size_t>(i)].x + radii[static_cast<std::size_t>(i)] * std::cos(a),
                                     centers[static_cast<std::size_t>(i)].y + radii[static_cast<std::size_t>(i)] * std::sin(a),
                                     centers[static_cast<std::size_t>(i)].z});
        }
    }
    for (int i = 0; i + 1 < nr; ++i)
        for (int j = 0; j < around; ++j) {
            const int jn = (j + 1) % around;
            const int a = i * around + j, b = i * around + jn;
            const int c = (i + 1) * around + j, d = (i + 1) * around + jn;
            part.faces.push_back({a, c, b});
            part.faces.push_back({b, c, d});
        }
    return part;
}

inline double point_segment_distance(const Vec3<double>& p, const Vec3<double>& a,
                                     const Vec3<double>& b) {
    const Vec3<double> ab = b - a;
    const double len2 = dot(ab, ab);
    double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const Vec3<double> q = a + ab * t;
    return norm(p - q);
}

}  // namespace synth_detail

// Procedural quadruped with the full TemplateAssets schema: lofted-ellipsoid
// body, four 3-segment legs, neck/head, tail, ears; distance-falloff
// skinning; 30 smooth shape basis fields with leg-related components flagged.
inline TemplateAssets make_template(std::uint64_t seed, double size_class) {
    using namespace synth_detail;
    std::mt19937_64 prop_rng(seed ^ 0x7e11a8c2ULL);
    std::uniform_real_distribution<double> jig(-0.06, 0.06);
    const double H = size_class;              // rest shoulder height, seed-independent
    const double L = 1.6 * H * (1.0 + jig(prop_rng));   // body length
    const double rt = 0.35 * H * (1.0 + jig(prop_rng));  // torso radius
    const double xh = -0.35 * L, xs = 0.35 * L;
    const double d = 0.34 * rt;  // lateral leg offset

    TemplateAssets a;
    a.joint_count = kJointCount;
    a.rest_joints.assign(kJointCount, {0, 0, 0});
    a.parent.assign(kJointCount, -1);
    auto J = [&](int j, double x, double y, double z, int parent) {
        a.rest_joints[static_cast<std::size_t>(j)] = {x, y, z};
        a.parent[static_cast<std::size_t>(j)] = parent;
    };
    J(kRoot, xh, 0, H, -1);
    J(kSpine1, xh + 0.23 * L, 0, H, kRoot);
    J(kSpine2, xh + 0.46 * L, 0, H, kSpine1);
    J(kChest, xs, 0, H, kSpine2);
    J(kNeck, xs + 0.12 * L, 0, H + 0.15 * H, kChest);
    J(kHead, xs + 0.22 * L, 0, H + 0.30 * H, kNeck);
    J(kNose, xs + 0.34 * L, 0, H + 0.28 * H, kHead);
    J(kJaw, xs + 0.27 * L, 0, H + 0.20 * H, kHead);
    J(kEarL, xs + 0.20 * L, 0.07 * L, H + 0.40 * H, kHead);
    J(kEarR, xs + 0.20 * L, -0.07 * L, H + 0.40 * H, kHead);
    auto leg = [&](int base, double x, double side, int attach) {
        J(base + 0, x, side * d, H, attach);                       // shoulder/hip
        J(base + 1, x, side * d, 0.60 * H, base + 0);              // elbow/knee
        J(base + 2, x, side * d, 0.25 * H, base + 1);              // wrist/ankle
        J(base + 3, x + 0.03 * L, side * d, 0.03 * H, base + 2);   // paw
    };
    leg(kShoulderL, xs, +1, kChest);
    leg(kShoulderR, xs, -1, kChest);
    leg(kHipL, xh, +1, kRoot);
    leg(kHipR, xh, -1, kRoot);
    for (int k = 0; k < 9; ++k)
        J(kTail0 + k, xh - 0.055 * L * (k + 1), 0, H + 0.02 * H - 0.02 * H * k,
          k == 0 ? kRoot : kTail0 + k - 1);

    // mesh parts
    std::vector<MeshPart> parts;
    parts.push_back(ellipsoid({0, 0, H}, {0.46 * L, rt, 0.92 * rt}, 20, 28));                 // torso
    parts.push_back(ellipsoid({xs + 0.21 * L, 0, H + 0.29 * H}, {0.13 * L, 0.52 * rt, 0.52 * rt}, 14, 18));  // head
    parts.push_back(ellipsoid({xs + 0.31 * L, 0, H + 0.27 * H}, {0.06 * L, 0.25 * rt, 0.22 * rt}, 8, 10));   // muzzle
    parts.push_back(ellipsoid({xs + 0.20 * L, 0.07 * L, H + 0.40 * H}, {0.02 * L, 0.035 * L, 0.05 * L}, 6, 8));  // ear L
    parts.push_back(ellipsoid({xs + 0.20 * L, -0.07 * L, H + 0.40 * H}, {0.02 * L, 0.035 * L, 0.05 * L}, 6, 8)); // ear R
    auto leg_part = [&](double x, double side) {
        std::vector<Vec3<double>> centers;
        std::vector<double> radii;
        const int rings = 12;
        for (int i = 0; i < rings; ++i) {
            const double t = static_cast<double>(i) / (rings - 1);
            const double z = H * (1.0 - t) + 0.06 * H * t;
            centers.push_back({x, side * d, z});
            radii.push_back(0.085 * H * (1.0 - t) + 0.045 * H * t);
        }
        parts.push_back(tube(centers, radii, 10, true));
        parts.push_back(ellipsoid({x + 0.03 * L, side * d, 0.048 * H},
                                  {0.06 * H, 0.045 * H, 0.042 * H}, 6, 8, true));  // paw
    };
    leg_part(xs, +1);
    leg_part(xs, -1);
    leg_part(xh, +1);
    leg_part(xh, -1);
    {  // tail
        std::vector<Vec3<double>> centers;
        std::vector<double> radii;
        for (int k = 0; k < 10; ++k) {
            const double t = k / 9.0;
            centers.push_back({xh - 0.50 * L * t, 0, H + 0.02 * H - 0.18 * H * t});
            radii.push_back(0.05 * H * (1.0 - 0.5 * t));
        }
        // tail tube runs along x; build rings in the y-z plane
        MeshPart tail;
        for (std::size_t i = 0; i < centers.size(); ++i)
            for (int j = 0; j < 8; ++j) {
                const double ang = 2.0 * std::numbers::pi * j / 8;
                tail.vertices.push_back({centers[i].x, centers[i].y + radii[i] * std::cos(ang),
                                         centers[i].z + radii[i] * std::sin(ang)});
            }
        for (std::size_t i = 0; i + 1 < centers.size(); ++i)
            for (int j = 0; j < 8; ++j) {
                const int jn = (j + 1) % 8;
                const int ai = static_cast<int>(i) * 8 + j, b = static_cast<int>(i) * 8 + jn;
                const int c = (static_cast<int>(i) + 1) * 8 + j, e = (static_cast<int>(i) + 1) * 8 + jn;
                tail.faces.push_back({ai, c, b});
                tail.faces.push_back({b, c, e});
            }
        parts.push_back(std::move(tail));
    }

    // merge parts
    for (const auto& part : parts) {
        const int base = a.vertex_count();
        const int fbase = a.face_count();
        for (const auto& v : part.vertices) a.vertices.push_back(v);
        for (const auto& f : part.faces)
            a.faces.push_back({f[0] + base, f[1] + base, f[2] + base});
        if (part.is_leg)
            for (int f = fbase; f < a.face_count(); ++f) a.leg_faces.push_back(f);
    }

    // skinning: per joint, the segments from the joint toward its children
    // (plus the joint itself for leaves); up to 4 nearest bones, sharp falloff
    std::vector<std::vector<int>> children(kJointCount);
    for (int j = 0; j < kJointCount; ++j)
        if (a.parent[static_cast<std::size_t>(j)] >= 0)
            children[static_cast<std::size_t>(a.parent[static_cast<std::size_t>(j)])].push_back(j);
    const double sigma = 0.25 * H;
    a.skin_weights.resize(static_cast<std::size_t>(a.vertex_count()));
    for (int i = 0; i < a.vertex_count(); ++i) {
        const Vec3<double>& p = a.vertices[static_cast<std::size_t>(i)];
        std::vector<std::pair<double, int>> dist;  // (distance, joint)
        dist.reserve(kJointCount);
        for (int j = 0; j < kJointCount; ++j) {
            double dmin;
            if (children[static_cast<std::size_t>(j)].empty()) {
                dmin = norm(p - a.rest_joints[static_cast<std::size_t>(j)]);
            } else {
                dmin = std::numeric_limits<double>::infinity();
                for (int c : children[static_cast<std::size_t>(j)])
                    dmin = std::min(dmin, point_segment_distance(
                                              p, a.rest_joints[static_cast<std::size_t>(j)],
                                              a.rest_joints[static_cast<std::size_t>(c)]));
            }
            dist.emplace_back(dmin, j);
        }
        std::partial_sort(dist.begin(), dist.begin() + 4, dist.end());
        SkinEntry e;
        double sum = 0.0;
        const double d0 = dist[0].first;
        for (int k = 0; k < 4; ++k) {
            const double w = std::exp(-((dist[static_cast<std::size_t>(k)].first - d0) * (dist[static_cast<std::size_t>(k)].first - d0)) / (sigma * sigma));
            if (k > 0 && w < 1e-3 * sum) break;
            e.joint[static_cast<std::size_t>(e.count)] = dist[static_cast<std::size_t>(k)].second;
            e.weight[static_cast<std::size_t>(e.count)] = w;
            sum += w;
            ++e.count;
        }
        for (int k = 0; k < e.count; ++k) e.weight[static_cast<std::size_t>(k)] /= sum;
        // renormalize exactly
        double s2 = 0.0;
        for (int k = 0; k + 1 < e.count; ++k) s2 += e.weight[static_cast<std::size_t>(k)];
        e.weight[static_cast<std::size_t>(e.count - 1)] = 1.0 - s2;
        a.skin_weights[static_cast<std::size_t>(i)] = e;
    }

    // shape basis: components 0..2 scale torso length, girth, leg length;
    // the rest are low-frequency smooth deformation fields
    std::mt19937_64 rng(seed ^ 0x5b7f19a3ULL);
    std::uniform_real_distribution<double> uni(-std::numbers::pi, std::numbers::pi);
    std::uniform_real_distribution<double> freq(0.5, 2.0);
    a.shape_basis.assign(kShapeDim, std::vector<Vec3<double>>(static_cast<std::size_t>(a.vertex_count()), {0, 0, 0}));
    for (int i = 0; i < a.vertex_count(); ++i) {
        const Vec3<double>& p = a.vertices[static_cast<std::size_t>(i)];
        a.shape_basis[0][static_cast<std::size_t>(i)] = {0.10 * p.x, 0, 0};                      // torso length
        a.shape_basis[1][static_cast<std::size_t>(i)] = {0, 0.10 * p.y, 0.05 * (p.z - H)};       // girth
        const double below = std::max(0.0, H - p.z);
        a.shape_basis[2][static_cast<std::size_t>(i)] = {0, 0, -0.10 * below};                   // leg length
    }
    for (int k = 3; k < kShapeDim; ++k) {
        const double f1 = freq(rng), f2 = freq(rng), p1 = uni(rng), p2 = uni(rng);
        const int axis = k % 3;
        for (int i = 0; i < a.vertex_count(); ++i) {
            const Vec3<double>& p = a.vertices[static_cast<std::size_t>(i)];
            const double amp =
                0.02 * H * std::sin(f1 * p.x / H + p1) * std::cos(f2 * p.z / H + p2);
            Vec3<double> disp{0, 0, 0};
            (axis == 0 ? disp.x : axis == 1 ? disp.y : disp.z) = amp;
            a.shape_basis[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = disp;
        }
    }

    // priors: standard-normal placeholders; real priors pluggable via the file
    a.shape_prior_mean.assign(kShapeDim, 0.0);
    a.shape_prior_cov.assign(kShapeDim * kShapeDim, 0.0);
    for (int i = 0; i < kShapeDim; ++i) a.shape_prior_cov[static_cast<std::size_t>(i * kShapeDim + i)] = 1.0;
    const int pd = a.pose_dim();
    a.pose_prior_mean.assign(static_cast<std::size_t>(pd), 0.0);
    for (int j = 0; j < kJointCount; ++j) {
        const auto id6 = identity_rot6d<double>();
        for (int k = 0; k < 6; ++k) a.pose_prior_mean[static_cast<std::size_t>(6 * j + k)] = id6[static_cast<std::size_t>(k)];
    }
    a.pose_prior_cov.assign(static_cast<std::size_t>(pd) * static_cast<std::size_t>(pd), 0.0);
    for (int i = 0; i < pd; ++i) a.pose_prior_cov[static_cast<std::size_t>(i * pd + i)] = 1.0;

    a.limb_weight_vector.assign(kShapeDim, 0.0);
    a.limb_weight_vector[2] = 1.0;  // leg length is the limb-related component

    // keypoints: 24 BARC-style points
    auto nearest_vertex = [&](const Vec3<double>& q) {
        int best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (int i = 0; i < a.vertex_count(); ++i) {
            const double dd = dot(a.vertices[static_cast<std::size_t>(i)] - q, a.vertices[static_cast<std::size_t>(i)] - q);
            if (dd < bd) {
                bd = dd;
                best = i;
            }
        }
        return best;
    };
    int kp_id = 0;
    auto joint_kp = [&](int j, const std::string& name) {
        a.keypoint_table.push_back({kp_id++, true, j, name});
    };
    auto vertex_kp = [&](const Vec3<double>& q, const std::string& name) {
        a.keypoint_table.push_back({kp_id++, false, nearest_vertex(q), name});
    };
    joint_kp(kFrontPawL, "front_paw_l");
    joint_kp(kFrontPawR, "front_paw_r");
    joint_kp(kRearPawL, "rear_paw_l");
    joint_kp(kRearPawR, "rear_paw_r");
    joint_kp(kElbowL, "elbow_l");
    joint_kp(kElbowR, "elbow_r");
    joint_kp(kKneeL, "knee_l");
    joint_kp(kKneeR, "knee_r");
    joint_kp(kEarL, "ear_base_l");
    joint_kp(kEarR, "ear_base_r");
    vertex_kp({xs + 0.20 * L, 0.07 * L, H + 0.45 * H}, "ear_tip_l");
    vertex_kp({xs + 0.20 * L, -0.07 * L, H + 0.45 * H}, "ear_tip_r");
    joint_kp(kNose, "nose");
    joint_kp(kTail0, "tail_base");
    joint_kp(kTail0 + 8, "tail_tip");
    vertex_kp({xs + 0.26 * L, 0.05 * L, H + 0.33 * H}, "eye_l");
    vertex_kp({xs + 0.26 * L, -0.05 * L, H + 0.33 * H}, "eye_r");
    joint_kp(kChest, "withers");
    joint_kp(kJaw, "chin");
    joint_kp(kShoulderL, "shoulder_l");
    joint_kp(kShoulderR, "shoulder_r");
    joint_kp(kHipL, "hip_l");
    joint_kp(kHipR, "hip_r");
    joint_kp(kSpine2, "mid_back");

    a.foot_pairs = {{kFrontPawL, kFrontPawR}, {kRearPawL, kRearPawR},
                    {kWristL, kWristR},       {kAnkleL, kAnkleR}};
    a.foot_joints = {kFrontPawL, kFrontPawR, kRearPawL, kRearPawR};

    a.finalize();
    return a;
}

// ---- scripted gait motion ----------------------------------------------

namespace synth_detail {

inline Mat3<double> rot_y(double angle) {
    Mat3<double> m = Mat3<double>::identity();
    const double c = std::cos(angle), s = std::sin(angle);
    m(0, 0) = c;
    m(0, 2) = s;
    m(2, 0) = -s;
    m(2, 2) = c;
    return m;
}

// Planar 2-link IK in the x-z plane; rotations about the y axis.
// Returns (shoulder angle, elbow angle) moving the paw to `target`.
inline std::pair<double, double> leg_ik(const Vec3<double>& sh, const Vec3<double>& el,
                                        const Vec3<double>& paw, const Vec3<double>& target,
                                        double bend_sign) {
    const Vec2<double> s{sh.x, sh.z}, e{el.x, el.z}, p{paw.x, paw.z}, t{target.x, target.z};
    const Vec2<double> v1 = e - s, v2 = p - e, ts = t - s;
    const double a = norm(v1), b = norm(v2), dd = norm(ts);
    double cosb = (dd * dd - a * a - b * b) / (2.0 * a * b);
    cosb = std::clamp(cosb, -1.0, 1.0);
    const double phi0 = std::atan2(v1.x * v2.y - v1.y * v2.x, dot(v1, v2));  // rest elbow angle
    const double beta = bend_sign * std::acos(cosb) - phi0;

    // paw position after the elbow bend, in shoulder-relative coordinates
    auto rot2 = [](double ang, const Vec2<double>& v) {
        // matches rot_y: (x, z) -> (c x + s z, -s x + c z)
        const double c = std::cos(ang), s2 = std::sin(ang);
        return Vec2<double>{c * v.x + s2 * v.y, -s2 * v.x + c * v.y};
    };
    const Vec2<double> reach = v1 + rot2(beta, v2);
    const double ang_reach = std::atan2(reach.y, reach.x);
    const double ang_target = std::atan2(ts.y, ts.x);
    // rot2 rotates clockwise in (x, z) for positive angles
    const double alpha = ang_reach - ang_target;
    return {alpha, beta};
}

struct GaitLeg {
    int shoulder, elbow, wrist, paw;
    double phase;
    double bend_sign;
};

}  // namespace synth_detail

// Scripted ground-truth motion: sinusoid-free exact foot anchoring. Stance
// paws are pinned to world anchors via planar two-link IK; swing paws follow
// a lifted arc to the next anchor.
inline BodyState synth_motion(const TemplateAssets& assets, const SynthSpec& spec) {
    using namespace synth_detail;
    spec.validate();
    const double H = spec.size_class;
    const double s = spec.scale;
    const int T = spec.frame_count;

    BodyState state;
    state.beta.assign(kShapeDim, 0.0);
    state.scale = s;
    state.frames.resize(static_cast<std::size_t>(T));

    double speed = 0.0;    // m/s along +x
    double period = 16.0;  // frames per stride
    double duty = 0.62;
    double lift = 0.10 * H * s;
    std::vector<GaitLeg> legs = {{kShoulderL, kElbowL, kWristL, kFrontPawL, 0.00, +1},
                                 {kHipR, kKneeR, kAnkleR, kRearPawR, 0.25, -1},
                                 {kShoulderR, kElbowR, kWristR, kFrontPawR, 0.50, +1},
                                 {kHipL, kKneeL, kAnkleL, kRearPawL, 0.75, -1}};
    switch (spec.gait) {
        case GaitType::Idle: speed = 0.0; break;
        case GaitType::Walk: speed = 0.28; break;
        case GaitType::Trot:
            speed = 0.55;
            period = 10.0;
            duty = 0.5;
            legs[1].phase = 0.0;
            legs[3].phase = 0.5;
            break;
        case GaitType::Jump: speed = 0.20; break;
    }

    const double travel = speed * (T - 1) / spec.fps;
    const double x0 = -travel / 2.0;  // stay inside the capture disc

    auto root_x = [&](double t_frames) { return x0 + speed * t_frames / spec.fps; };

    for (int t = 0; t < T; ++t) {
        FrameParams<double>& fp = state.frames[static_cast<std::size_t>(t)];
        fp.theta.assign(static_cast<std::size_t>(assets.pose_dim()), 0.0);
        for (int j = 0; j < assets.joint_count; ++j) {
            const auto id6 = identity_rot6d<double>();
            for (int k = 0; k < 6; ++k) fp.theta[static_cast<std::size_t>(6 * j + k)] = id6[static_cast<std::size_t>(k)];
        }
        fp.phi = identity_rot6d<double>();
        double gz = 0.0;
        if (spec.gait == GaitType::Jump) {
            const double u = std::fmod(t / 24.0, 1.0);
            const double hop = std::max(0.0, std::sin(std::numbers::pi * std::clamp((u - 0.3) / 0.4, 0.0, 1.0)));
            gz = 0.25 * H * s * hop * hop;
        }
        fp.gamma = {root_x(t), 0.0, gz};

        if (spec.gait == GaitType::Idle || spec.gait == GaitType::Jump) continue;

        for (const auto& leg : legs) {
            const Vec3<double> sh = assets.rest_joints[static_cast<std::size_t>(leg.shoulder)];
            const Vec3<double> el = assets.rest_joints[static_cast<std::size_t>(leg.elbow)];
            const Vec3<double> paw = assets.rest_joints[static_cast<std::size_t>(leg.paw)];

            const double u = t / period + leg.phase;
            const double cycle = std::floor(u);
            const double local = u - cycle;

            // world-frame anchor for stance cycle c: rest paw offset carried
            // along at the body position of the stance midpoint
            auto anchor = [&](double c) {
                const double t_mid = (c + duty / 2.0 - leg.phase) * period;
                return Vec3<double>{paw.x * s + root_x(t_mid), paw.y * s, paw.z * s};
            };

            Vec3<double> target_world;
            if (local < duty) {
                target_world = anchor(cycle);
            } else {
                const double w = (local - duty) / (1.0 - duty);
                const double sw = w * w * (3.0 - 2.0 * w);  // smoothstep
                const Vec3<double> a0 = anchor(cycle), a1 = anchor(cycle + 1.0);
                target_world = a0 + (a1 - a0) * sw;
                target_world.z += lift * std::sin(std::numbers::pi * w);
            }
            // into unscaled body coordinates
            const Vec3<double> target{(target_world.x - fp.gamma.x) / s,
                                      (target_world.y - fp.gamma.y) / s,
                                      (target_world.z - fp.gamma.z) / s};
            const auto [alpha, beta] = leg_ik(sh, el, paw, target, leg.bend_sign);
            const auto r_sh = matrix_to_rot6d(rot_y(alpha));
            const auto r_el = matrix_to_rot6d(rot_y(beta));
            for (int k = 0; k < 6; ++k) {
                fp.theta[static_cast<std::size_t>(6 * leg.shoulder + k)] = r_sh[static_cast<std::size_t>(k)];
                fp.theta[static_cast<std::size_t>(6 * leg.elbow + k)] = r_el[static_cast<std::size_t>(k)];
            }
        }
    }
    return state;
}

// ---- camera rig and observation rendering -------------------------------

inline CameraRig make_ring_rig(const SynthSpec& spec) {
    CameraRig rig;
    rig.id = "synth-ring";
    std::mt19937_64 rng(spec.seed ^ 0xc0ffee11ULL);
    std::uniform_real_distribution<double> pitch_jitter(-spec.pitch_jitter_deg,
                                                        spec.pitch_jitter_deg);
    for (int i = 0; i < spec.camera_count; ++i) {
        const double ang = 2.0 * std::numbers::pi * i / spec.camera_count;
        const Vec3<double> pos{spec.ring_radius * std::cos(ang), spec.ring_radius * std::sin(ang),
                               spec.camera_height};
        const Vec3<double> look{0, 0, 0.3};  // center of the capture zone

        Vec3<double> fwd = look - pos;
        fwd = fwd * (1.0 / norm(fwd));
        // extra pitch jitter about the camera's right axis
        const double extra = pitch_jitter(rng) * std::numbers::pi / 180.0;
        const Vec3<double> up{0, 0, 1};
        Vec3<double> right = cross(fwd, up);
        right = right * (1.0 / norm(right));
        // rotate fwd by `extra` around right
        const double c = std::cos(extra), sn = std::sin(extra);
        const Vec3<double> fwd2 = fwd * c + cross(right, fwd) * sn;
        Vec3<double> down = cross(fwd2, right);
        down = down * (1.0 / norm(down));

        Camera cam;
        cam.id = "cam" + std::to_string(i);
        cam.fx = cam.fy = spec.focal_px;
        cam.cx = spec.image_width / 2.0;
        cam.cy = spec.image_height / 2.0;
        cam.width = spec.image_width;
        cam.height = spec.image_height;
        // rows of R are the camera axes in world coordinates
        cam.world_to_cam.rot.m = {right.x, right.y, right.z, down.x, down.y, down.z,
                                  fwd2.x, fwd2.y, fwd2.z};
        cam.world_to_cam.trans = {-dot(right, pos), -dot(down, pos), -dot(fwd2, pos)};
        rig.cameras.push_back(cam);
    }
    rig.validate();
    return rig;
}

namespace synth_detail {

inline MaskImage morph(const MaskImage& in, int radius) {
    if (radius == 0) return in;
    const bool dilate = radius > 0;
    const int r = std::abs(radius);
    MaskImage out(in.width, in.height, 0);
    for (int y = 0; y < in.height; ++y)
        for (int x = 0; x < in.width; ++x) {
            bool hit = dilate ? false : true;
            for (int dy = -r; dy <= r && (dilate ? !hit : hit); ++dy)
                for (int dx = -r; dx <= r; ++dx) {
                    const int xx = x + dx, yy = y + dy;
                    const bool v = in.inside(xx, yy) && in.at(xx, yy) != 0;
                    if (dilate && v) {
                        hit = true;
                        break;
                    }
                    if (!dilate && !v) {
                        hit = false;
                        break;
                    }
                }
            out.at(x, y) = hit ? 255 : 0;
        }
    return out;
}

}  // namespace synth_detail

struct SynthSequence {
    CameraRig rig;
    BodyState ground_truth;
    // observations[view][frame]
    std::vector<std::vector<FrameObservation>> observations;
    std::vector<std::vector<Vec3<double>>> joint_trajectories;  // per frame
};

inline SynthSequence render_observations(const CameraRig& rig, const TemplateAssets& assets,
                                         const BodyState& states, const SynthSpec& spec) {
    SynthSequence seq;
    seq.rig = rig;
    seq.ground_truth = states;
    const int T = states.frame_count();
    const int n_views = static_cast<int>(rig.cameras.size());
    seq.observations.assign(static_cast<std::size_t>(n_views), {});
    for (auto& v : seq.observations) v.resize(static_cast<std::size_t>(T));
    seq.joint_trajectories.resize(static_cast<std::size_t>(T));

    std::mt19937_64 rng(spec.seed ^ 0x0b5e55edULL);
    std::normal_distribution<double> kp_noise(0.0, 1.0);
    std::uniform_real_distribution<double> uni01(0.0, 1.0);
    std::uniform_real_distribution<double> jitter(-1.0, 1.0);

    // Keypoints sit inside the body (joints especially), so the occlusion
    // test allows each point its rest-pose clearance to the surface.
    std::vector<double> kp_clearance;
    kp_clearance.reserve(assets.keypoint_table.size());
    for (const auto& entry : assets.keypoint_table) {
        if (!entry.on_joint) {
            kp_clearance.push_back(0.0);
            continue;
        }
        const Vec3<double>& q = assets.rest_joints[static_cast<std::size_t>(entry.index)];
        double best = std::numeric_limits<double>::infinity();
        for (const auto& v : assets.vertices) best = std::min(best, norm(v - q));
        kp_clearance.push_back(best);
    }

    for (int t = 0; t < T; ++t) {
        const PosedMesh<double> mesh = pose_mesh(assets, states, t);
        seq.joint_trajectories[static_cast<std::size_t>(t)] = mesh.joints;

        for (int vi = 0; vi < n_views; ++vi) {
            const Camera& cam = rig.cameras[static_cast<std::size_t>(vi)];
            FrameObservation obs;
            obs.view = cam.id;
            obs.t = t;

            const Image<float> zbuf = render_zbuffer(mesh, cam);
            MaskImage mask(cam.width, cam.height, 0);
            DepthImage depth(cam.width, cam.height, 0);
            for (std::size_t i = 0; i < zbuf.data.size(); ++i) {
                if (zbuf.data[i] <= 0.0f) continue;
                mask.data[i] = 255;
                double z = zbuf.data[i];
                if (spec.depth_sigma_m > 0.0) z += spec.depth_sigma_m * kp_noise(rng);
                depth.data[i] = static_cast<std::uint16_t>(
                    std::clamp(std::round(z / cam.depth_unit), 1.0, 65535.0));
            }
            obs.mask = synth_detail::morph(mask, spec.mask_morph_px);
            obs.depth = std::move(depth);

            // keypoints with self-occlusion test against the clean z-buffer
            const double base_tol = 0.01 + 2.0 * cam.depth_unit;
            for (std::size_t ki = 0; ki < assets.keypoint_table.size(); ++ki) {
                const auto& entry = assets.keypoint_table[ki];
                const double occl_tol = base_tol + kp_clearance[ki] * states.scale;
                const Vec3<double> p = entry.on_joint
                                           ? mesh.joints[static_cast<std::size_t>(entry.index)]
                                           : mesh.vertices[static_cast<std::size_t>(entry.index)];
                const Projected<double> pr = project(cam, p);
                Keypoint kp;
                kp.present = false;
                kp.u = kp.v = 0.0;
                kp.confidence = 0.0;
                if (pr.valid) {
                    const int px = static_cast<int>(std::lround(pr.pixel.x));
                    const int py = static_cast<int>(std::lround(pr.pixel.y));
                    if (mask.inside(px, py)) {
                        const double zb = zbuf.at(px, py);
                        if (zb > 0.0 && pr.depth <= zb + occl_tol) {
                            kp.present = true;
                            kp.confidence = 1.0;
                            kp.u = pr.pixel.x;
                            kp.v = pr.pixel.y;
                            if (spec.keypoint_sigma_px > 0.0) {
                                kp.u += spec.keypoint_sigma_px * kp_noise(rng);
                                kp.v += spec.keypoint_sigma_px * kp_noise(rng);
                            }
                        }
                    }
                }
                obs.keypoints.push_back(kp);
            }

            // dense correspondences: seeded subset of visible vertices
            std::vector<int> visible;
            for (int i = 0; i < assets.vertex_count(); ++i) {
                const Projected<double> pr = project(cam, mesh.vertices[static_cast<std::size_t>(i)]);
                if (!pr.valid) continue;
                const int px = static_cast<int>(std::lround(pr.pixel.x));
                const int py = static_cast<int>(std::lround(pr.pixel.y));
                if (!mask.inside(px, py)) continue;
                const double zb = zbuf.at(px, py);
                if (zb > 0.0 && pr.depth <= zb + base_tol) visible.push_back(i);
            }
            std::shuffle(visible.begin(), visible.end(), rng);
            const int want = std::min<int>(spec.cse_per_frame, static_cast<int>(visible.size()));
            for (int k = 0; k < want; ++k) {
                if (spec.cse_dropout > 0.0 && uni01(rng) < spec.cse_dropout) continue;
                const int vid = visible[static_cast<std::size_t>(k)];
                const Projected<double> pr = project(cam, mesh.vertices[static_cast<std::size_t>(vid)]);
                Correspondence c;
                c.vertex = vid;
                c.confidence = 1.0;
                c.u = pr.pixel.x + spec.cse_jitter_px * jitter(rng);
                c.v = pr.pixel.y + spec.cse_jitter_px * jitter(rng);
                obs.correspondences.push_back(c);
            }

            seq.observations[static_cast<std::size_t>(vi)][static_cast<std::size_t>(t)] =
                std::move(obs);
        }
    }
    return seq;
}

}  // namespace dogfit
