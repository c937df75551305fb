#pragma once

// The eight loss terms and their per-stage weighted combination. Everything is
// templated on the scalar so the same code produces values and gradients.
// Nearest-neighbor matches are computed from current values and held fixed
// while differentiating (fixed-match subgradient).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "dogfit/assets.hpp"
#include "dogfit/camera.hpp"
#include "dogfit/linalg.hpp"
#include "dogfit/log.hpp"
#include "dogfit/model.hpp"
#include "dogfit/nn.hpp"
#include "dogfit/observation.hpp"

namespace dogfit {

struct LossWeights {
    double mask = 400.0;
    double keypoint = 60.0;
    double depth = 1.0;
    double cse = 20.0;
    double cross = 2.5;
    double prior = 0.005;
    double temporal = 0.1;
    double w_body = 1.0;
    double w_limb = 1.0;
    double delta = 0.951229424500714;  // exp(-0.05): pairs closer than 5 cm penalized
    double kp_conf_threshold = 0.3;

    void validate() const {
        for (double v : {mask, keypoint, depth, cse, cross, prior, temporal, w_body, w_limb})
            if (v < 0.0) throw std::invalid_argument("loss weights must be >= 0");
        if (delta <= 0.0 || delta >= 1.0)
            throw std::invalid_argument("leg-cross delta must lie in (0,1)");
    }
};

struct SampleConfig {
    int n = 1500;
    double leg_boost = 4.0;
    std::uint64_t seed = 0;
};

namespace loss_detail {

// Norm that stays differentiable at coincident points: exact zero gets a flat
// (zero) subgradient instead of the infinite sqrt slope.
template <class S>
S safe_norm(const Vec2<S>& d) {
    using std::sqrt;
    using ad::sqrt;
    const S d2 = dot(d, d);
    if (value_of(d2) == 0.0) return S(0);
    return sqrt(d2);
}

template <class S>
S safe_norm(const Vec3<S>& d) {
    using std::sqrt;
    using ad::sqrt;
    const S d2 = dot(d, d);
    if (value_of(d2) == 0.0) return S(0);
    return sqrt(d2);
}

}  // namespace loss_detail

// ---- chamfer distances -----------------------------------------------------

// Symmetric bidirectional mean nearest-neighbor distance, halved. The grid on
// A is supplied by the caller (A is observation-side and cached); the grid on
// B is rebuilt from current values.
template <class S>
S chamfer_2d_cached(const std::vector<Vec2<double>>& a, const Grid2& grid_a,
                    const std::vector<Vec2<S>>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("chamfer_2d: point sets must be nonempty");
    std::vector<Vec2<double>> bv(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) bv[i] = values(b[i]);
    const Grid2 grid_b(bv);

    S acc_b = S(0);
    for (const auto& p : b) {
        const int j = grid_a.nearest(values(p));
        acc_b = acc_b + loss_detail::safe_norm(Vec2<S>{p.x - S(a[static_cast<std::size_t>(j)].x),
                                                       p.y - S(a[static_cast<std::size_t>(j)].y)});
    }
    S acc_a = S(0);
    for (const auto& q : a) {
        const int j = grid_b.nearest(q);
        const auto& p = b[static_cast<std::size_t>(j)];
        acc_a = acc_a + loss_detail::safe_norm(Vec2<S>{p.x - S(q.x), p.y - S(q.y)});
    }
    return (acc_a * S(1.0 / static_cast<double>(a.size())) +
            acc_b * S(1.0 / static_cast<double>(b.size()))) *
           S(0.5);
}

inline double chamfer_2d(const std::vector<Vec2<double>>& a, const std::vector<Vec2<double>>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("chamfer_2d: point sets must be nonempty");
    return chamfer_2d_cached(a, Grid2(a), b);
}

template <class S>
S chamfer_3d_cached(const std::vector<Vec3<double>>& a, const Grid3& grid_a,
                    const std::vector<Vec3<S>>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("chamfer_3d: point sets must be nonempty");
    std::vector<Vec3<double>> bv(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) bv[i] = values(b[i]);
    const Grid3 grid_b(bv);

    S acc_b = S(0);
    for (const auto& p : b) {
        const int j = grid_a.nearest(values(p));
        const Vec3<double>& q = a[static_cast<std::size_t>(j)];
        acc_b = acc_b +
                loss_detail::safe_norm(Vec3<S>{p.x - S(q.x), p.y - S(q.y), p.z - S(q.z)});
    }
    S acc_a = S(0);
    for (const auto& q : a) {
        const int j = grid_b.nearest(q);
        const auto& p = b[static_cast<std::size_t>(j)];
        acc_a = acc_a +
                loss_detail::safe_norm(Vec3<S>{p.x - S(q.x), p.y - S(q.y), p.z - S(q.z)});
    }
    return (acc_a * S(1.0 / static_cast<double>(a.size())) +
            acc_b * S(1.0 / static_cast<double>(b.size()))) *
           S(0.5);
}

inline double chamfer_3d(const std::vector<Vec3<double>>& a, const std::vector<Vec3<double>>& b) {
    if (a.empty() || b.empty())
        throw std::invalid_argument("chamfer_3d: point sets must be nonempty");
    return chamfer_3d_cached(a, Grid3(a), b);
}

// ---- per-observation cache -------------------------------------------------

// Precomputed observation-side structures shared across optimizer steps.
struct ObservationCache {
    std::vector<Vec2<double>> mask_pixels;  // subsampled foreground coordinates
    std::unique_ptr<Grid2> mask_grid;
    std::vector<Vec3<double>> depth_points;  // subsampled backprojected cloud
    std::unique_ptr<Grid3> depth_grid;
};

inline ObservationCache build_observation_cache(const FrameObservation& obs, const Camera& cam,
                                                bool use_depth, int pixel_cap = 4000,
                                                std::uint64_t seed = 0) {
    ObservationCache cache;
    std::vector<Vec2<double>> fg;
    for (int y = 0; y < obs.mask.height; ++y)
        for (int x = 0; x < obs.mask.width; ++x)
            if (obs.mask.at(x, y))
                fg.push_back({static_cast<double>(x), static_cast<double>(y)});
    std::mt19937_64 rng(seed ^ (static_cast<std::uint64_t>(obs.t) * 0x9e3779b97f4a7c15ULL));
    if (static_cast<int>(fg.size()) > pixel_cap) {
        std::shuffle(fg.begin(), fg.end(), rng);
        fg.resize(static_cast<std::size_t>(pixel_cap));
    }
    cache.mask_pixels = std::move(fg);
    if (!cache.mask_pixels.empty()) cache.mask_grid = std::make_unique<Grid2>(cache.mask_pixels);

    if (use_depth && obs.depth) {
        std::vector<Vec3<double>> pts = backproject(cam, *obs.depth, obs.mask);
        if (static_cast<int>(pts.size()) > pixel_cap) {
            std::shuffle(pts.begin(), pts.end(), rng);
            pts.resize(static_cast<std::size_t>(pixel_cap));
        }
        cache.depth_points = std::move(pts);
        if (!cache.depth_points.empty())
            cache.depth_grid = std::make_unique<Grid3>(cache.depth_points);
    }
    return cache;
}

// ---- data terms ------------------------------------------------------------

template <class S>
S mask_loss(const ObservationCache& cache, const std::vector<Vec3<S>>& surface_samples,
            const Camera& cam) {
    if (cache.mask_pixels.empty()) {
        DOGFIT_LOG(2, "mask_loss: empty mask, frame skipped");
        return S(0);
    }
    std::vector<Vec2<S>> proj;
    proj.reserve(surface_samples.size());
    for (const auto& p : surface_samples) {
        const Projected<S> pr = project(cam, p);
        if (pr.valid) proj.push_back(pr.pixel);
    }
    if (proj.empty()) {
        DOGFIT_LOG(2, "mask_loss: no samples in front of the camera, frame skipped");
        return S(0);
    }
    return chamfer_2d_cached(cache.mask_pixels, *cache.mask_grid, proj);
}

// Model-side keypoint positions per the keypoint table.
template <class S>
std::vector<Vec3<S>> keypoint_positions(const TemplateAssets& assets, const PosedMesh<S>& mesh) {
    std::vector<Vec3<S>> out;
    out.reserve(assets.keypoint_table.size());
    for (const auto& e : assets.keypoint_table)
        out.push_back(e.on_joint ? mesh.joints[static_cast<std::size_t>(e.index)]
                                 : mesh.vertices[static_cast<std::size_t>(e.index)]);
    return out;
}

template <class S>
S keypoint_loss(const FrameObservation& obs, const TemplateAssets& assets,
                const PosedMesh<S>& mesh, const Camera& cam, double conf_threshold = 0.3) {
    if (obs.keypoints.size() != assets.keypoint_table.size())
        throw std::invalid_argument("keypoint_loss: observation has wrong keypoint count");
    const std::vector<Vec3<S>> model = keypoint_positions(assets, mesh);
    S acc = S(0);
    double wsum = 0.0;
    for (std::size_t k = 0; k < obs.keypoints.size(); ++k) {
        const Keypoint& kp = obs.keypoints[k];
        if (!kp.present || kp.confidence < conf_threshold) continue;
        const Projected<S> pr = project(cam, model[k]);
        if (!pr.valid) continue;
        acc = acc + S(kp.confidence) *
                        loss_detail::safe_norm(Vec2<S>{pr.pixel.x - S(kp.u), pr.pixel.y - S(kp.v)});
        wsum += kp.confidence;
    }
    if (wsum == 0.0) {
        DOGFIT_LOG(2, "keypoint_loss: no usable keypoints, frame skipped");
        return S(0);
    }
    return acc * S(1.0 / wsum);
}

template <class S>
S depth_loss(const ObservationCache& cache, const std::vector<Vec3<S>>& surface_samples) {
    if (cache.depth_points.empty()) {
        DOGFIT_LOG(2, "depth_loss: no masked depth pixels, frame skipped");
        return S(0);
    }
    if (surface_samples.empty()) return S(0);
    return chamfer_3d_cached(cache.depth_points, *cache.depth_grid, surface_samples);
}

template <class S>
S cse_loss(const FrameObservation& obs, const PosedMesh<S>& mesh, const Camera& cam) {
    if (obs.correspondences.empty()) {
        DOGFIT_LOG(2, "cse_loss: no correspondences, frame skipped");
        return S(0);
    }
    S acc = S(0);
    double wsum = 0.0;
    for (const auto& c : obs.correspondences) {
        if (c.vertex < 0 || c.vertex >= static_cast<int>(mesh.vertices.size()))
            throw std::invalid_argument("cse_loss: vertex index out of range");
        const Projected<S> pr = project(cam, mesh.vertices[static_cast<std::size_t>(c.vertex)]);
        if (!pr.valid) continue;
        acc = acc + S(c.confidence) *
                        loss_detail::safe_norm(Vec2<S>{pr.pixel.x - S(c.u), pr.pixel.y - S(c.v)});
        wsum += c.confidence;
    }
    if (wsum == 0.0) return S(0);
    return acc * S(1.0 / wsum);
}

// ---- regularizers ----------------------------------------------------------

template <class S>
S leg_cross_loss(const std::vector<Vec3<S>>& joints,
                 const std::vector<std::pair<int, int>>& foot_pairs, double delta) {
    using std::exp;
    using ad::exp;
    if (delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("leg_cross_loss: delta must lie in (0,1)");
    S acc = S(0);
    for (const auto& [l, r] : foot_pairs) {
        const S d = loss_detail::safe_norm(joints[static_cast<std::size_t>(l)] -
                                           joints[static_cast<std::size_t>(r)]);
        const S e = exp(S(0) - d);
        if (value_of(e) >= delta) acc = acc + e;  // boundary included
    }
    return acc;
}

namespace loss_detail {

// (x - mu)^T Minv (x - mu), Minv row-major n x n of doubles.
template <class S>
S quad_form(const std::vector<S>& x, const std::vector<double>& mu,
            const std::vector<double>& minv) {
    const std::size_t n = x.size();
    std::vector<S> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - S(mu[i]);
    S acc = S(0);
    for (std::size_t i = 0; i < n; ++i) {
        S row = S(0);
        for (std::size_t j = 0; j < n; ++j) {
            const double m = minv[i * n + j];
            if (m != 0.0) row = row + S(m) * d[j];
        }
        acc = acc + d[i] * row;
    }
    return acc;
}

}  // namespace loss_detail

template <class S>
S shape_prior_loss(const std::vector<S>& beta, const TemplateAssets& assets, double w_body,
                   double w_limb) {
    S mahal = loss_detail::quad_form(beta, assets.shape_prior_mean, assets.shape_cov_inv);
    S limb = S(0);
    for (std::size_t i = 0; i < beta.size(); ++i) {
        const double w = assets.limb_weight_vector[i];
        if (w == 0.0) continue;
        const S v = S(w) * beta[i];
        limb = limb + v * v;
    }
    return S(w_body) * mahal + S(w_limb) * limb;
}

template <class S>
S pose_prior_loss(const std::vector<S>& theta, const TemplateAssets& assets) {
    return loss_detail::quad_form(theta, assets.pose_prior_mean, assets.pose_cov_inv);
}

// ---- temporal smoothness -----------------------------------------------

// joints_per_frame: consecutive frames' joint positions. The 2D part averages
// over views; joints behind any camera are skipped for that view.
template <class S>
S temporal_loss(const std::vector<std::vector<Vec3<S>>>& joints_per_frame,
                const std::vector<const Camera*>& cams) {
    if (joints_per_frame.size() < 2) return S(0);
    S acc = S(0);
    const double view_w = cams.empty() ? 0.0 : 1.0 / static_cast<double>(cams.size());
    for (std::size_t t = 0; t + 1 < joints_per_frame.size(); ++t) {
        const auto& a = joints_per_frame[t];
        const auto& b = joints_per_frame[t + 1];
        for (std::size_t k = 0; k < a.size(); ++k) {
            acc = acc + loss_detail::safe_norm(b[k] - a[k]);
            for (const Camera* cam : cams) {
                const Projected<S> pa = project(*cam, a[k]);
                const Projected<S> pb = project(*cam, b[k]);
                if (!pa.valid || !pb.valid) continue;
                acc = acc + S(view_w) * loss_detail::safe_norm(pb.pixel - pa.pixel);
            }
        }
    }
    return acc;
}

// ---- stage combination -------------------------------------------------

template <class S>
struct LossTerms {
    S mask = S(0);
    S keypoint = S(0);
    S depth = S(0);
    S cse = S(0);
    S cross = S(0);
    S prior = S(0);
    S temporal = S(0);
};

// Stage 1: mask + keypoint (+ depth when available). Stage 2 adds cse, cross
// and the priors. Stage 3 adds the temporal term.
template <class S>
S combine_stage_loss(int stage, const LossTerms<S>& t, const LossWeights& w, bool has_depth) {
    if (stage < 1 || stage > 3) throw std::invalid_argument("combine_stage_loss: stage in {1,2,3}");
    S acc = S(w.mask) * t.mask + S(w.keypoint) * t.keypoint;
    if (has_depth) acc = acc + S(w.depth) * t.depth;
    if (stage >= 2) acc = acc + S(w.cse) * t.cse + S(w.cross) * t.cross + S(w.prior) * t.prior;
    if (stage >= 3) acc = acc + S(w.temporal) * t.temporal;
    return acc;
}

}  // namespace dogfit
