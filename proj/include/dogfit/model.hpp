#pragma once

// Parametric body model: shape blendshapes, forward kinematics, linear blend
// skinning, uniform scale about the origin plus global translation.

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "dogfit/assets.hpp"
#include "dogfit/linalg.hpp"
#include "dogfit/rotation.hpp"

namespace dogfit {

// Per-frame pose parameters (theta, gamma, phi).
template <class S>
struct FrameParams {
    std::vector<S> theta;       // 6N joint rotations
    Vec3<S> gamma{S(0), S(0), S(0)};
    std::array<S, 6> phi = identity_rot6d<S>();
};

template <class S>
struct BodyStateT {
    std::vector<S> beta;  // kShapeDim shape coefficients, per sequence
    S scale = S(1);
    std::vector<FrameParams<S>> frames;

    int frame_count() const { return static_cast<int>(frames.size()); }
};

using BodyState = BodyStateT<double>;

template <class S>
struct PosedMesh {
    std::vector<Vec3<S>> vertices;
    std::vector<Vec3<S>> joints;
    const std::vector<std::array<int, 3>>* faces = nullptr;
};

template <class S>
Vec3<S> lift(const Vec3<double>& v) {
    return {S(v.x), S(v.y), S(v.z)};
}

// Shape blend: template vertices plus the linear combination of basis fields.
template <class S>
std::vector<Vec3<S>> blend_shape(const TemplateAssets& assets, const std::vector<S>& beta) {
    if (static_cast<int>(beta.size()) != kShapeDim)
        throw std::invalid_argument("blend_shape: beta must have dimension 30");
    const int nv = assets.vertex_count();
    std::vector<Vec3<S>> out(static_cast<std::size_t>(nv));
    for (int i = 0; i < nv; ++i)
        out[static_cast<std::size_t>(i)] = lift<S>(assets.vertices[static_cast<std::size_t>(i)]);
    for (int k = 0; k < kShapeDim; ++k) {
        const auto& field = assets.shape_basis[static_cast<std::size_t>(k)];
        const S& bk = beta[static_cast<std::size_t>(k)];
        for (int i = 0; i < nv; ++i) {
            const Vec3<double>& d = field[static_cast<std::size_t>(i)];
            auto& v = out[static_cast<std::size_t>(i)];
            v.x = v.x + bk * S(d.x);
            v.y = v.y + bk * S(d.y);
            v.z = v.z + bk * S(d.z);
        }
    }
    return out;
}

// Rigid chain: every joint rotates about its rest position within the parent
// frame; the root rotation phi acts about the world origin.
template <class S>
std::vector<Transform<S>> forward_kinematics(const TemplateAssets& assets,
                                             const std::vector<S>& theta,
                                             const std::array<S, 6>& phi) {
    const int nj = assets.joint_count;
    if (static_cast<int>(theta.size()) != 6 * nj)
        throw std::invalid_argument("forward_kinematics: theta must have dimension 6N");

    std::vector<Transform<S>> world(static_cast<std::size_t>(nj));
    Transform<S> root_orient;
    root_orient.rot = rot6d_to_matrix<S>(phi);

    for (int j = 0; j < nj; ++j) {
        std::array<S, 6> block;
        for (int k = 0; k < 6; ++k)
            block[static_cast<std::size_t>(k)] = theta[static_cast<std::size_t>(6 * j + k)];
        const Mat3<S> rot = rot6d_to_matrix<S>(block);
        const Vec3<S> r = lift<S>(assets.rest_joints[static_cast<std::size_t>(j)]);

        Transform<S> local;
        local.rot = rot;
        local.trans = r - rot * r;  // rotation about the rest joint

        const int p = assets.parent[static_cast<std::size_t>(j)];
        if (p < 0)
            world[static_cast<std::size_t>(j)] = root_orient.compose(local);
        else
            world[static_cast<std::size_t>(j)] = world[static_cast<std::size_t>(p)].compose(local);
    }
    return world;
}

template <class S>
PosedMesh<S> pose_mesh(const TemplateAssets& assets, const std::vector<S>& beta, const S& scale,
                       const FrameParams<S>& frame) {
    const std::vector<Vec3<S>> shaped = blend_shape(assets, beta);
    const std::vector<Transform<S>> world = forward_kinematics(assets, frame.theta, frame.phi);

    PosedMesh<S> mesh;
    mesh.faces = &assets.faces;
    const int nv = assets.vertex_count();
    mesh.vertices.resize(static_cast<std::size_t>(nv));
    for (int i = 0; i < nv; ++i) {
        const SkinEntry& e = assets.skin_weights[static_cast<std::size_t>(i)];
        const Vec3<S>& v = shaped[static_cast<std::size_t>(i)];
        Vec3<S> acc{S(0), S(0), S(0)};
        for (int k = 0; k < e.count; ++k) {
            const auto& g = world[static_cast<std::size_t>(e.joint[static_cast<std::size_t>(k)])];
            acc += g.apply(v) * S(e.weight[static_cast<std::size_t>(k)]);
        }
        mesh.vertices[static_cast<std::size_t>(i)] = acc * scale + frame.gamma;
    }
    mesh.joints.resize(static_cast<std::size_t>(assets.joint_count));
    for (int j = 0; j < assets.joint_count; ++j) {
        const Vec3<S> r = lift<S>(assets.rest_joints[static_cast<std::size_t>(j)]);
        mesh.joints[static_cast<std::size_t>(j)] =
            world[static_cast<std::size_t>(j)].apply(r) * scale + frame.gamma;
    }
    return mesh;
}

template <class S>
PosedMesh<S> pose_mesh(const TemplateAssets& assets, const BodyStateT<S>& state, int t) {
    if (t < 0 || t >= state.frame_count())
        throw std::out_of_range("pose_mesh: frame index out of range");
    if (value_of(state.scale) <= 0.0) throw std::invalid_argument("pose_mesh: scale must be > 0");
    return pose_mesh(assets, state.beta, state.scale, state.frames[static_cast<std::size_t>(t)]);
}

// ---- surface sampling ----------------------------------------------------

struct SurfaceSample {
    int face = 0;
    double b0 = 0, b1 = 0, b2 = 0;  // barycentric weights, sum to 1
};

template <class S>
double face_area(const PosedMesh<S>& mesh, int f) {
    const auto& tri = (*mesh.faces)[static_cast<std::size_t>(f)];
    const Vec3<double> a = values(mesh.vertices[static_cast<std::size_t>(tri[0])]);
    const Vec3<double> b = values(mesh.vertices[static_cast<std::size_t>(tri[1])]);
    const Vec3<double> c = values(mesh.vertices[static_cast<std::size_t>(tri[2])]);
    return 0.5 * norm(cross(b - a, c - a));
}

// Area-weighted triangle sampling; leg faces get their weight multiplied by
// leg_boost to densify silhouette coverage around the legs.
template <class S>
std::vector<SurfaceSample> sample_surface_indices(const PosedMesh<S>& mesh,
                                                  const std::vector<int>& leg_faces, int n,
                                                  double leg_boost, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_surface: n must be >= 1");
    if (leg_boost < 1.0) throw std::invalid_argument("sample_surface: leg_boost must be >= 1");
    const int nf = static_cast<int>(mesh.faces->size());
    std::vector<char> is_leg(static_cast<std::size_t>(nf), 0);
    for (int f : leg_faces) is_leg[static_cast<std::size_t>(f)] = 1;

    std::vector<double> cum(static_cast<std::size_t>(nf));
    double total = 0.0;
    for (int f = 0; f < nf; ++f) {
        double w = face_area(mesh, f);
        if (is_leg[static_cast<std::size_t>(f)]) w *= leg_boost;
        total += w;
        cum[static_cast<std::size_t>(f)] = total;
    }
    if (total <= 0.0) throw std::invalid_argument("sample_surface: degenerate mesh (zero area)");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<SurfaceSample> samples(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double u = uni(rng) * total;
        const auto it = std::lower_bound(cum.begin(), cum.end(), u);
        SurfaceSample s;
        s.face = static_cast<int>(it - cum.begin());
        if (s.face >= nf) s.face = nf - 1;
        double r1 = uni(rng), r2 = uni(rng);
        if (r1 + r2 > 1.0) {
            r1 = 1.0 - r1;
            r2 = 1.0 - r2;
        }
        s.b0 = 1.0 - r1 - r2;
        s.b1 = r1;
        s.b2 = r2;
        samples[static_cast<std::size_t>(i)] = s;
    }
    return samples;
}

template <class S>
std::vector<Vec3<S>> materialize_samples(const PosedMesh<S>& mesh,
                                         const std::vector<SurfaceSample>& samples) {
    std::vector<Vec3<S>> pts;
    pts.reserve(samples.size());
    for (const auto& s : samples) {
        const auto& tri = (*mesh.faces)[static_cast<std::size_t>(s.face)];
        const Vec3<S>& a = mesh.vertices[static_cast<std::size_t>(tri[0])];
        const Vec3<S>& b = mesh.vertices[static_cast<std::size_t>(tri[1])];
        const Vec3<S>& c = mesh.vertices[static_cast<std::size_t>(tri[2])];
        pts.push_back(a * S(s.b0) + b * S(s.b1) + c * S(s.b2));
    }
    return pts;
}

inline std::vector<Vec3<double>> sample_surface(const PosedMesh<double>& mesh,
                                                const std::vector<int>& leg_faces, int n,
                                                double leg_boost, std::uint64_t seed) {
    return materialize_samples(mesh, sample_surface_indices(mesh, leg_faces, n, leg_boost, seed));
}

}  // namespace dogfit
