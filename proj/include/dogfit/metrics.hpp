#pragma once

// The six evaluation metrics: IoU, IoU_w5, F-score@0.05, penetration
// percentage, jitter, and foot skating, plus the sequence-level report.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "dogfit/assets.hpp"
#include "dogfit/camera.hpp"
#include "dogfit/image.hpp"
#include "dogfit/losses.hpp"
#include "dogfit/model.hpp"
#include "dogfit/nn.hpp"
#include "dogfit/observation.hpp"
#include "dogfit/raster.hpp"

namespace dogfit {

inline constexpr double kFscoreTau = 0.05;     // meters
inline constexpr double kContactHeight = 0.04;  // meters
inline constexpr int kFscoreSamples = 10000;

inline double iou(const MaskImage& pred, const MaskImage& gt) {
    if (!pred.same_size(gt.width, gt.height))
        throw std::invalid_argument("iou: mask dimensions differ");
    long inter = 0, uni = 0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const bool p = pred.data[i] != 0, g = gt.data[i] != 0;
        inter += (p && g) ? 1 : 0;
        uni += (p || g) ? 1 : 0;
    }
    if (uni == 0) return 1.0;  // both empty: perfect agreement
    return static_cast<double>(inter) / static_cast<double>(uni);
}

// Mean over the worst ceil(0.05 T) frames.
inline double iou_w5(std::vector<double> per_frame) {
    if (per_frame.empty()) throw std::invalid_argument("iou_w5: no frames");
    const std::size_t k = static_cast<std::size_t>(
        std::ceil(0.05 * static_cast<double>(per_frame.size())));
    std::partial_sort(per_frame.begin(), per_frame.begin() + static_cast<long>(k),
                      per_frame.end());
    return std::accumulate(per_frame.begin(), per_frame.begin() + static_cast<long>(k), 0.0) /
           static_cast<double>(k);
}

struct PrecisionRecall {
    double precision = 0, recall = 0;

    double fscore() const {
        if (precision + recall == 0.0) return 0.0;
        return 2.0 * precision * recall / (precision + recall);
    }
};

inline PrecisionRecall fscore_parts(const std::vector<Vec3<double>>& pred,
                                    const std::vector<Vec3<double>>& gt, double tau = kFscoreTau) {
    if (pred.empty() || gt.empty())
        throw std::invalid_argument("fscore: point sets must be nonempty");
    const Grid3 gt_grid(gt);
    const Grid3 pred_grid(pred);
    long hits = 0;
    for (const auto& p : pred)
        if (gt_grid.has_within(p, tau)) ++hits;
    PrecisionRecall pr;
    pr.precision = static_cast<double>(hits) / static_cast<double>(pred.size());
    hits = 0;
    for (const auto& q : gt)
        if (pred_grid.has_within(q, tau)) ++hits;
    pr.recall = static_cast<double>(hits) / static_cast<double>(gt.size());
    return pr;
}

inline double fscore(const std::vector<Vec3<double>>& pred, const std::vector<Vec3<double>>& gt,
                     double tau = kFscoreTau) {
    return fscore_parts(pred, gt, tau).fscore();
}

// Fraction of vertices strictly below the floor (z < 0), frame-averaged.
inline double pene_pct(const std::vector<std::vector<Vec3<double>>>& vertex_frames) {
    if (vertex_frames.empty()) throw std::invalid_argument("pene_pct: no frames");
    double acc = 0.0;
    for (const auto& verts : vertex_frames) {
        if (verts.empty()) throw std::invalid_argument("pene_pct: empty frame");
        long below = 0;
        for (const auto& v : verts)
            if (v.z < 0.0) ++below;
        acc += static_cast<double>(below) / static_cast<double>(verts.size());
    }
    return acc / static_cast<double>(vertex_frames.size());
}

// Mean second difference magnitude of joint positions (m per frame^2).
inline double jitter(const std::vector<std::vector<Vec3<double>>>& joint_frames) {
    const std::size_t T = joint_frames.size();
    if (T < 3) return 0.0;
    double acc = 0.0;
    long count = 0;
    for (std::size_t t = 1; t + 1 < T; ++t)
        for (std::size_t k = 0; k < joint_frames[t].size(); ++k) {
            const Vec3<double> d = joint_frames[t + 1][k] - joint_frames[t][k] * 2.0 +
                                   joint_frames[t - 1][k];
            acc += norm(d);
            ++count;
        }
    return count > 0 ? acc / static_cast<double>(count) : 0.0;
}

// Mean horizontal displacement per contact step of foot joints while both
// endpoint heights are below h; averaged over contact steps.
inline double foot_skating(const std::vector<std::vector<Vec3<double>>>& foot_frames,
                           double h = kContactHeight) {
    const std::size_t T = foot_frames.size();
    double acc = 0.0;
    long contacts = 0;
    for (std::size_t t = 0; t + 1 < T; ++t)
        for (std::size_t k = 0; k < foot_frames[t].size(); ++k) {
            const Vec3<double>& a = foot_frames[t][k];
            const Vec3<double>& b = foot_frames[t + 1][k];
            if (a.z >= h || b.z >= h) continue;
            const double dx = b.x - a.x, dy = b.y - a.y;
            acc += std::sqrt(dx * dx + dy * dy);
            ++contacts;
        }
    return contacts > 0 ? acc / static_cast<double>(contacts) : 0.0;
}

struct MetricsReport {
    double iou = 0, iou_w5 = 0, fscore = 0, pene_pct = 0, jitter = 0, foot_skating = 0;
    std::vector<double> iou_per_frame;
    std::vector<double> fscore_per_frame;
    std::vector<double> pene_per_frame;
};

inline void to_json(nlohmann::json& j, const MetricsReport& m) {
    j = {{"iou", m.iou},
         {"iou_w5", m.iou_w5},
         {"fscore", m.fscore},
         {"pene_pct", m.pene_pct},
         {"jitter", m.jitter},
         {"foot_skating", m.foot_skating},
         {"iou_per_frame", m.iou_per_frame},
         {"fscore_per_frame", m.fscore_per_frame},
         {"pene_per_frame", m.pene_per_frame}};
}

inline void from_json(const nlohmann::json& j, MetricsReport& m) {
    m.iou = j.at("iou").get<double>();
    m.iou_w5 = j.at("iou_w5").get<double>();
    m.fscore = j.at("fscore").get<double>();
    m.pene_pct = j.at("pene_pct").get<double>();
    m.jitter = j.at("jitter").get<double>();
    m.foot_skating = j.at("foot_skating").get<double>();
    m.iou_per_frame = j.value("iou_per_frame", std::vector<double>{});
    m.fscore_per_frame = j.value("fscore_per_frame", std::vector<double>{});
    m.pene_per_frame = j.value("pene_per_frame", std::vector<double>{});
}

// Full report for a fitted state against an observed sequence. IoU compares
// rendered silhouettes with observed masks; F-score compares seeded mesh
// samples with the backprojected masked depth cloud (all views merged).
inline MetricsReport evaluate_sequence(const TemplateAssets& assets, const BodyState& state,
                                       const SequenceData& seq, std::uint64_t seed = 0) {
    const int T = state.frame_count();
    if (T != seq.meta.frame_count)
        throw std::invalid_argument("evaluate_sequence: solution/sequence frame count mismatch");
    MetricsReport rep;
    std::vector<std::vector<Vec3<double>>> joints(static_cast<std::size_t>(T));
    std::vector<std::vector<Vec3<double>>> feet(static_cast<std::size_t>(T));
    std::vector<std::vector<Vec3<double>>> verts(static_cast<std::size_t>(T));

    for (int t = 0; t < T; ++t) {
        const PosedMesh<double> mesh = pose_mesh(assets, state, t);
        joints[static_cast<std::size_t>(t)] = mesh.joints;
        verts[static_cast<std::size_t>(t)] = mesh.vertices;
        for (int fj : assets.foot_joints)
            feet[static_cast<std::size_t>(t)].push_back(mesh.joints[static_cast<std::size_t>(fj)]);

        double iou_acc = 0.0;
        int iou_views = 0;
        std::vector<Vec3<double>> cloud;
        for (std::size_t vi = 0; vi < seq.rig.cameras.size(); ++vi) {
            const Camera& cam = seq.rig.cameras[vi];
            const FrameObservation& obs = seq.observations[vi][static_cast<std::size_t>(t)];
            const MaskImage sil = rasterize_silhouette(mesh, cam);
            iou_acc += iou(sil, obs.mask);
            ++iou_views;
            if (obs.depth) {
                std::vector<Vec3<double>> pts = backproject(cam, *obs.depth, obs.mask);
                cloud.insert(cloud.end(), pts.begin(), pts.end());
            }
        }
        rep.iou_per_frame.push_back(iou_acc / iou_views);

        if (!cloud.empty()) {
            const std::vector<Vec3<double>> samples =
                sample_surface(mesh, assets.leg_faces, kFscoreSamples, 1.0,
                               seed ^ (static_cast<std::uint64_t>(t) * 0x9e3779b97f4a7c15ULL));
            rep.fscore_per_frame.push_back(fscore(samples, cloud));
        }
        long below = 0;
        for (const auto& v : mesh.vertices)
            if (v.z < 0.0) ++below;
        rep.pene_per_frame.push_back(static_cast<double>(below) /
                                     static_cast<double>(mesh.vertices.size()));
    }

    rep.iou = std::accumulate(rep.iou_per_frame.begin(), rep.iou_per_frame.end(), 0.0) / T;
    rep.iou_w5 = iou_w5(rep.iou_per_frame);
    if (!rep.fscore_per_frame.empty())
        rep.fscore = std::accumulate(rep.fscore_per_frame.begin(), rep.fscore_per_frame.end(),
                                     0.0) /
                     static_cast<double>(rep.fscore_per_frame.size());
    rep.pene_pct = pene_pct(verts);
    rep.jitter = jitter(joints);
    rep.foot_skating = foot_skating(feet);
    return rep;
}

}  // namespace dogfit
