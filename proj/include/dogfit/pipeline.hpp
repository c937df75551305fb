#pragma once

// Three-stage fitting pipeline: coarse placement/scale, full shape/pose,
// temporal refinement. Owns stage configuration, frame mini-batching,
// multi-view averaging, stage hand-offs and the divergence guard.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "dogfit/assets.hpp"
#include "dogfit/camera.hpp"
#include "dogfit/field.hpp"
#include "dogfit/log.hpp"
#include "dogfit/losses.hpp"
#include "dogfit/model.hpp"
#include "dogfit/observation.hpp"
#include "dogfit/optim.hpp"

namespace dogfit {

struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Setting { SvRgb, SvRgbd, MvRgb, MvRgbd };

inline Setting setting_from_string(const std::string& s) {
    if (s == "sv-rgb") return Setting::SvRgb;
    if (s == "sv-rgbd") return Setting::SvRgbd;
    if (s == "mv-rgb") return Setting::MvRgb;
    if (s == "mv-rgbd") return Setting::MvRgbd;
    throw FitError("unknown setting: " + s + " (expected sv-rgb|sv-rgbd|mv-rgb|mv-rgbd)");
}

inline std::string setting_to_string(Setting s) {
    switch (s) {
        case Setting::SvRgb: return "sv-rgb";
        case Setting::SvRgbd: return "sv-rgbd";
        case Setting::MvRgb: return "mv-rgb";
        case Setting::MvRgbd: return "mv-rgbd";
    }
    return "mv-rgbd";
}

inline bool setting_uses_depth(Setting s) {
    return s == Setting::SvRgbd || s == Setting::MvRgbd;
}

inline bool setting_multi_view(Setting s) {
    return s == Setting::MvRgb || s == Setting::MvRgbd;
}

// Stage step multipliers: (5, 20, 5) single-view, (10, 25, 5) multi-view.
inline int stage_multiplier(Setting s, int stage) {
    if (stage < 1 || stage > 3) throw FitError("stage_multiplier: stage in {1,2,3}");
    static constexpr int sv[3] = {5, 20, 5};
    static constexpr int mv[3] = {10, 25, 5};
    return setting_multi_view(s) ? mv[stage - 1] : sv[stage - 1];
}

struct FitSettings {
    Setting setting = Setting::MvRgbd;
    std::uint64_t seed = 0;
    LossWeights weights;

    int batch_size = 8;        // stages 1-2
    int segment_length = 16;   // stage 3 (clamped to T)
    int sample_count = 1500;   // surface samples per frame
    double leg_boost = 4.0;
    int mask_pixel_cap = 4000;

    // per-stage learning rates
    double s1_rate_scale = 5e-3;
    double s1_rate_tr = 5e-2;
    double s2_rate_scale = 5e-5;
    double s2_rate_beta = 5e-2;
    double s2_rate_field = 5e-4;
    double s3_rate_field = 1e-5;

    // stage multipliers; <= 0 means "use the per-setting defaults"
    int multiplier_override[3] = {0, 0, 0};

    bool stage1_enabled = true;      // ablation switch
    bool stage1_train_shape = false; // whether stage 1 also trains beta

    int multiplier(int stage) const {
        const int o = multiplier_override[stage - 1];
        if (o < 0) throw FitError("fit settings: stage multiplier must be > 0");
        return o > 0 ? o : stage_multiplier(setting, stage);
    }

    void validate() const {
        weights.validate();
        if (batch_size < 1 || segment_length < 1 || sample_count < 1 || mask_pixel_cap < 1)
            throw FitError("fit settings: batch/segment/sample sizes must be >= 1");
        for (int s = 1; s <= 3; ++s)
            if (multiplier(s) < 1) throw FitError("fit settings: stage multiplier must be > 0");
    }
};

inline void from_json(const nlohmann::json& j, FitSettings& s) {
    if (j.contains("setting")) s.setting = setting_from_string(j.at("setting").get<std::string>());
    s.seed = j.value("seed", s.seed);
    s.batch_size = j.value("batch_size", s.batch_size);
    s.segment_length = j.value("segment_length", s.segment_length);
    s.sample_count = j.value("sample_count", s.sample_count);
    s.leg_boost = j.value("leg_boost", s.leg_boost);
    s.mask_pixel_cap = j.value("mask_pixel_cap", s.mask_pixel_cap);
    s.s1_rate_scale = j.value("s1_rate_scale", s.s1_rate_scale);
    s.s1_rate_tr = j.value("s1_rate_tr", s.s1_rate_tr);
    s.s2_rate_scale = j.value("s2_rate_scale", s.s2_rate_scale);
    s.s2_rate_beta = j.value("s2_rate_beta", s.s2_rate_beta);
    s.s2_rate_field = j.value("s2_rate_field", s.s2_rate_field);
    s.s3_rate_field = j.value("s3_rate_field", s.s3_rate_field);
    if (j.contains("multipliers")) {
        const auto m = j.at("multipliers").get<std::vector<int>>();
        if (m.size() != 3) throw FitError("fit settings: multipliers must have 3 entries");
        for (int i = 0; i < 3; ++i) {
            if (m[static_cast<std::size_t>(i)] < 1)
                throw FitError("fit settings: stage multipliers must be >= 1");
            s.multiplier_override[i] = m[static_cast<std::size_t>(i)];
        }
    }
    s.stage1_enabled = j.value("stage1_enabled", s.stage1_enabled);
    s.stage1_train_shape = j.value("stage1_train_shape", s.stage1_train_shape);
    if (j.contains("weights")) {
        const auto& w = j.at("weights");
        s.weights.mask = w.value("mask", s.weights.mask);
        s.weights.keypoint = w.value("keypoint", s.weights.keypoint);
        s.weights.depth = w.value("depth", s.weights.depth);
        s.weights.cse = w.value("cse", s.weights.cse);
        s.weights.cross = w.value("cross", s.weights.cross);
        s.weights.prior = w.value("prior", s.weights.prior);
        s.weights.temporal = w.value("temporal", s.weights.temporal);
        s.weights.w_body = w.value("w_body", s.weights.w_body);
        s.weights.w_limb = w.value("w_limb", s.weights.w_limb);
        s.weights.delta = w.value("delta", s.weights.delta);
    }
}

// ---- mini-batch sampling -------------------------------------------------

enum class BatchMode { Uniform, Segment };

// Uniform: `batch` distinct frame indices (all frames when T <= batch).
// Segment: consecutive run of min(batch, T) frames at a random start.
inline std::vector<int> sample_batch(int T, int batch, std::mt19937_64& rng, BatchMode mode) {
    if (T < 1 || batch < 1) throw FitError("sample_batch: T and batch must be >= 1");
    const int n = std::min(batch, T);
    std::vector<int> out;
    if (mode == BatchMode::Segment) {
        std::uniform_int_distribution<int> start(0, T - n);
        const int s = start(rng);
        for (int i = 0; i < n; ++i) out.push_back(s + i);
        return out;
    }
    std::vector<int> idx(static_cast<std::size_t>(T));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng);
    out.assign(idx.begin(), idx.begin() + n);
    std::sort(out.begin(), out.end());
    return out;
}

// ---- solution ------------------------------------------------------------

struct MotionSolution {
    std::vector<double> beta;
    double scale = 1.0;
    FieldWeights field;
    BodyState state;  // materialized per-frame params (reproduce the field exactly)
    std::vector<std::vector<Vec3<double>>> joints;
    nlohmann::json provenance;
};

// Materializes per-frame parameters and joint trajectories from the field.
inline void materialize_solution(const TemplateAssets& assets, MotionSolution& sol, int T) {
    sol.state.beta = sol.beta;
    sol.state.scale = sol.scale;
    sol.state.frames.resize(static_cast<std::size_t>(T));
    sol.joints.resize(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        const FieldOutput<double> out = eval_field(sol.field, t, T);
        FrameParams<double>& fp = sol.state.frames[static_cast<std::size_t>(t)];
        fp.theta = out.theta;
        fp.gamma = out.gamma;
        fp.phi = out.phi;
        sol.joints[static_cast<std::size_t>(t)] =
            pose_mesh(assets, sol.state, t).joints;
    }
}

inline void to_json(nlohmann::json& j, const MotionSolution& s) {
    j["beta"] = s.beta;
    j["scale"] = s.scale;
    j["field"] = s.field;
    nlohmann::json frames = nlohmann::json::array();
    for (const auto& f : s.state.frames) {
        nlohmann::json fr;
        fr["theta"] = f.theta;
        fr["gamma"] = {f.gamma.x, f.gamma.y, f.gamma.z};
        fr["phi"] = f.phi;
        frames.push_back(std::move(fr));
    }
    j["frames"] = std::move(frames);
    nlohmann::json joints = nlohmann::json::array();
    for (const auto& frame : s.joints) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& p : frame) arr.push_back({p.x, p.y, p.z});
        joints.push_back(std::move(arr));
    }
    j["joints"] = std::move(joints);
    j["provenance"] = s.provenance;
}

inline void from_json(const nlohmann::json& j, MotionSolution& s) {
    s.beta = j.at("beta").get<std::vector<double>>();
    s.scale = j.at("scale").get<double>();
    s.field = j.at("field").get<FieldWeights>();
    s.state.beta = s.beta;
    s.state.scale = s.scale;
    s.state.frames.clear();
    for (const auto& fr : j.at("frames")) {
        FrameParams<double> f;
        f.theta = fr.at("theta").get<std::vector<double>>();
        const auto g = fr.at("gamma").get<std::vector<double>>();
        f.gamma = {g.at(0), g.at(1), g.at(2)};
        const auto p = fr.at("phi").get<std::vector<double>>();
        if (p.size() != 6) throw FitError("solution.json: phi must have 6 entries");
        for (int k = 0; k < 6; ++k) f.phi[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k)];
        s.state.frames.push_back(std::move(f));
    }
    s.joints.clear();
    for (const auto& frame : j.at("joints")) {
        std::vector<Vec3<double>> pts;
        for (const auto& p : frame) pts.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
        s.joints.push_back(std::move(pts));
    }
    s.provenance = j.value("provenance", nlohmann::json::object());
}

inline MotionSolution load_solution(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FitError("cannot open " + path);
    nlohmann::json j;
    in >> j;
    return j.get<MotionSolution>();
}

inline void save_solution(const MotionSolution& s, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw FitError("cannot write " + path);
    out << nlohmann::json(s).dump();
}

// ---- fitting context -------------------------------------------------------

struct StageLog {
    int stage = 0;
    std::vector<double> loss;
    std::vector<double> mask_term;
    std::vector<double> temporal_term;
};

inline void to_json(nlohmann::json& j, const StageLog& l) {
    j = {{"stage", l.stage},
         {"loss", l.loss},
         {"mask_term", l.mask_term},
         {"temporal_term", l.temporal_term}};
}

namespace pipeline_detail {

struct FitContext {
    const TemplateAssets* assets = nullptr;
    std::vector<const Camera*> cams;                              // used views
    std::vector<const std::vector<FrameObservation>*> obs;        // per used view
    std::vector<std::vector<ObservationCache>> caches;            // [view][frame]
    bool use_depth = false;
    int T = 0;
    FitSettings settings;
};

// Evaluates the stage loss over one mini-batch, averaged over frames and
// views. Group layout: 0 scale, 1 beta, 2 net_tr, 3 net_theta.
template <class S>
S batch_loss(const FitContext& ctx, const std::vector<std::vector<S>>& groups,
             const std::vector<int>& batch, int stage, std::uint64_t sample_seed,
             LossTerms<double>* value_terms = nullptr) {
    const TemplateAssets& assets = *ctx.assets;
    const S scale = groups[0][0];
    const std::vector<S>& beta = groups[1];
    const std::vector<S>& tr = groups[2];
    const std::vector<S>& theta_w = groups[3];
    const double nb = static_cast<double>(batch.size());
    const double nv = static_cast<double>(ctx.cams.size());

    LossTerms<S> terms;
    std::vector<std::vector<Vec3<S>>> segment_joints;

    for (std::size_t bi = 0; bi < batch.size(); ++bi) {
        const int t = batch[bi];
        const FieldOutput<S> field = eval_field(tr, theta_w, assets.joint_count, embed(t, ctx.T));
        FrameParams<S> fp;
        fp.theta = field.theta;
        fp.gamma = field.gamma;
        fp.phi = field.phi;
        const PosedMesh<S> mesh = pose_mesh(assets, beta, scale, fp);
        if (stage >= 3) segment_joints.push_back(mesh.joints);

        const auto sample_idx = sample_surface_indices(
            mesh, assets.leg_faces, ctx.settings.sample_count, ctx.settings.leg_boost,
            sample_seed ^ (static_cast<std::uint64_t>(t) * 0x9e3779b97f4a7c15ULL));
        const std::vector<Vec3<S>> samples = materialize_samples(mesh, sample_idx);

        for (std::size_t vi = 0; vi < ctx.cams.size(); ++vi) {
            const Camera& cam = *ctx.cams[vi];
            const FrameObservation& obs = (*ctx.obs[vi])[static_cast<std::size_t>(t)];
            const ObservationCache& cache = ctx.caches[vi][static_cast<std::size_t>(t)];
            const S w = S(1.0 / (nb * nv));
            terms.mask = terms.mask + w * mask_loss(cache, samples, cam);
            terms.keypoint =
                terms.keypoint +
                w * keypoint_loss(obs, assets, mesh, cam, ctx.settings.weights.kp_conf_threshold);
            if (ctx.use_depth) terms.depth = terms.depth + w * depth_loss(cache, samples);
            if (stage >= 2) terms.cse = terms.cse + w * cse_loss(obs, mesh, cam);
        }
        if (stage >= 2) {
            const S wf = S(1.0 / nb);
            terms.cross = terms.cross + wf * leg_cross_loss(mesh.joints, assets.foot_pairs,
                                                            ctx.settings.weights.delta);
            terms.prior =
                terms.prior + wf * (shape_prior_loss(beta, assets, ctx.settings.weights.w_body,
                                                     ctx.settings.weights.w_limb) +
                                    pose_prior_loss(fp.theta, assets));
        }
    }
    if (stage >= 3 && segment_joints.size() >= 2)
        terms.temporal = temporal_loss(segment_joints, ctx.cams);

    if (value_terms) {
        value_terms->mask = value_of(terms.mask);
        value_terms->keypoint = value_of(terms.keypoint);
        value_terms->depth = value_of(terms.depth);
        value_terms->cse = value_of(terms.cse);
        value_terms->cross = value_of(terms.cross);
        value_terms->prior = value_of(terms.prior);
        value_terms->temporal = value_of(terms.temporal);
    }
    return combine_stage_loss(stage, terms, ctx.settings.weights, ctx.use_depth);
}

// Rough global placement from the first frame: depth-cloud centroid when depth
// is available, ray midpoints of mask centroids for multi-view RGB, and a
// focal-scaled distance estimate for single-view RGB.
inline CoarseInit coarse_init(const FitContext& ctx) {
    CoarseInit init;
    const TemplateAssets& assets = *ctx.assets;
    Vec3<double> body_center{0, 0, 0};
    for (const auto& v : assets.vertices) body_center += v;
    body_center = body_center * (1.0 / static_cast<double>(assets.vertex_count()));

    Vec3<double> centroid{0, 0, 0};
    bool have = false;
    if (ctx.use_depth) {
        long n = 0;
        for (const auto& view : ctx.caches) {
            for (const auto& p : view[0].depth_points) {
                centroid += p;
                ++n;
            }
            break;  // first view's frame-0 cloud is enough
        }
        if (n > 0) {
            centroid = centroid * (1.0 / static_cast<double>(n));
            have = true;
        }
    }
    if (!have) {
        // per view: ray through the mask centroid; aggregate the points where
        // each ray passes nearest the world origin region
        std::vector<Vec3<double>> anchors;
        for (std::size_t vi = 0; vi < ctx.cams.size(); ++vi) {
            const Camera& cam = *ctx.cams[vi];
            const auto& px = ctx.caches[vi][0].mask_pixels;
            if (px.empty()) continue;
            Vec2<double> c{0, 0};
            double miny = 1e18, maxy = -1e18;
            for (const auto& p : px) {
                c = c + p * (1.0 / static_cast<double>(px.size()));
                miny = std::min(miny, p.y);
                maxy = std::max(maxy, p.y);
            }
            // distance so the template's bounding height covers the mask height
            double zmin = 1e18, zmax = -1e18;
            for (const auto& v : assets.vertices) {
                zmin = std::min(zmin, v.z);
                zmax = std::max(zmax, v.z);
            }
            const double px_h = std::max(maxy - miny, 1.0);
            const double dist = cam.fy * (zmax - zmin) / px_h;
            anchors.push_back(backproject_pixel(cam, c.x, c.y, dist));
        }
        if (!anchors.empty()) {
            for (const auto& a : anchors) centroid += a;
            centroid = centroid * (1.0 / static_cast<double>(anchors.size()));
            have = true;
        }
    }
    if (have) init.gamma = centroid - body_center;
    return init;
}

}  // namespace pipeline_detail

struct StageConfig {
    int stage = 1;
    int total_steps = 0;
    int batch = 8;
    BatchMode mode = BatchMode::Uniform;
    double rate_scale = 0, rate_beta = 0, rate_tr = 0, rate_theta = 0;
};

// Runs one stage in place over the parameter groups. Exactly cfg.total_steps
// optimizer steps; groups with zero rate are bit-identical afterwards.
inline StageLog run_stage(const pipeline_detail::FitContext& ctx, const StageConfig& cfg,
                          std::vector<ParamGroup>& groups) {
    if (cfg.total_steps < 1) throw FitError("run_stage: step budget must be >= 1");
    groups[0].rate = cfg.rate_scale;
    groups[1].rate = cfg.rate_beta;
    groups[2].rate = cfg.rate_tr;
    groups[3].rate = cfg.rate_theta;

    AdamOptimizer opt(groups, cfg.total_steps);
    std::mt19937_64 rng(ctx.settings.seed ^ (0xabcd1234ULL * static_cast<unsigned>(cfg.stage)));

    StageLog log;
    log.stage = cfg.stage;
    std::vector<ParamGroup> checkpoint = groups;
    int bad_streak = 0;
    bool halved = false;

    for (int step = 0; step < cfg.total_steps; ++step) {
        const std::vector<int> batch = sample_batch(ctx.T, cfg.batch, rng, cfg.mode);
        const std::uint64_t sample_seed = ctx.settings.seed ^ (static_cast<std::uint64_t>(step) *
                                                               0xd1b54a32d192ed03ULL);
        LossTerms<double> vt;
        auto [value, grads] = gradient(
            [&](const std::vector<std::vector<ad::Var>>& vars) {
                return pipeline_detail::batch_loss(ctx, vars, batch, cfg.stage, sample_seed, &vt);
            },
            groups);

        if (!std::isfinite(value)) {
            ++bad_streak;
            DOGFIT_LOG(1, "stage " << cfg.stage << " step " << step << ": non-finite loss ("
                                   << bad_streak << " consecutive)");
            if (bad_streak >= 3) {
                if (!halved) {
                    for (auto& g : groups) g.rate *= 0.5;
                    halved = true;
                    bad_streak = 0;
                    groups = checkpoint;
                    DOGFIT_LOG(1, "stage " << cfg.stage << ": halved learning rates once");
                } else {
                    groups = checkpoint;
                    throw FitError("stage " + std::to_string(cfg.stage) +
                                   ": diverged; aborted at last finite checkpoint");
                }
            }
            log.loss.push_back(value);
            log.mask_term.push_back(vt.mask);
            log.temporal_term.push_back(vt.temporal);
            std::vector<std::vector<double>> zeros(groups.size());
            for (std::size_t g = 0; g < groups.size(); ++g)
                zeros[g].assign(groups[g].values.size(), 0.0);
            opt.step(groups, zeros);  // keeps the step budget exact
            continue;
        }
        bad_streak = 0;
        for (std::size_t g = 0; g < groups.size(); ++g) checkpoint[g].values = groups[g].values;
        opt.step(groups, grads);
        if (groups[0].values[0] <= 1e-3) groups[0].values[0] = 1e-3;  // keep scale positive
        log.loss.push_back(value);
        log.mask_term.push_back(vt.mask);
        log.temporal_term.push_back(vt.temporal);
        if (step % 50 == 0)
            DOGFIT_LOG(1, "stage " << cfg.stage << " step " << step << "/" << cfg.total_steps
                                   << " loss " << value);
    }
    return log;
}

inline MotionSolution fit_sequence(const SequenceData& seq, const TemplateAssets& assets,
                                   const FitSettings& settings_in) {
    FitSettings settings = settings_in;
    settings.validate();
    const int T = seq.meta.frame_count;
    if (T < 2) throw FitError("fit_sequence: need at least 2 frames");
    if (seq.rig.cameras.empty()) throw FitError("fit_sequence: need at least 1 view");

    pipeline_detail::FitContext ctx;
    ctx.assets = &assets;
    ctx.settings = settings;
    ctx.T = T;
    ctx.use_depth = setting_uses_depth(settings.setting);

    const std::size_t n_views = setting_multi_view(settings.setting) ? seq.rig.cameras.size() : 1;
    for (std::size_t vi = 0; vi < n_views; ++vi) {
        ctx.cams.push_back(&seq.rig.cameras[vi]);
        ctx.obs.push_back(&seq.observations[vi]);
    }
    if (ctx.use_depth)
        for (std::size_t vi = 0; vi < n_views; ++vi)
            for (int t = 0; t < T; ++t)
                if (!(*ctx.obs[vi])[static_cast<std::size_t>(t)].depth)
                    throw FitError("fit_sequence: setting " +
                                   setting_to_string(settings.setting) + " needs depth, missing in view " +
                                   seq.rig.cameras[vi].id + " frame " + std::to_string(t));
    if (!ctx.use_depth && seq.observations[0][0].depth)
        DOGFIT_LOG(1, "setting " << setting_to_string(settings.setting)
                                 << ": depth present in sequence but ignored");

    DOGFIT_LOG(1, "building observation caches (" << n_views << " views x " << T << " frames)");
    ctx.caches.resize(n_views);
    for (std::size_t vi = 0; vi < n_views; ++vi)
        for (int t = 0; t < T; ++t)
            ctx.caches[vi].push_back(
                build_observation_cache((*ctx.obs[vi])[static_cast<std::size_t>(t)], *ctx.cams[vi],
                                        ctx.use_depth, settings.mask_pixel_cap, settings.seed));

    const CoarseInit coarse = pipeline_detail::coarse_init(ctx);
    FieldWeights field = init_field(settings.seed, assets.joint_count, coarse);

    std::vector<ParamGroup> groups(4);
    groups[0] = {"scale", {1.0}, 0.0, true};
    groups[1] = {"beta", std::vector<double>(kShapeDim, 0.0), 0.0, true};
    groups[2] = {"net_tr", field.tr, 0.0, true};
    groups[3] = {"net_theta", field.theta, 0.0, true};

    nlohmann::json stage_logs = nlohmann::json::array();

    if (settings.stage1_enabled) {
        StageConfig c1;
        c1.stage = 1;
        c1.total_steps = settings.multiplier(1) * T;
        c1.batch = settings.batch_size;
        c1.rate_scale = settings.s1_rate_scale;
        c1.rate_tr = settings.s1_rate_tr;
        if (settings.stage1_train_shape) c1.rate_beta = settings.s2_rate_beta;
        stage_logs.push_back(run_stage(ctx, c1, groups));
    }
    {
        StageConfig c2;
        c2.stage = 2;
        c2.total_steps = settings.multiplier(2) * T;
        c2.batch = settings.batch_size;
        c2.rate_scale = settings.s2_rate_scale;
        c2.rate_beta = settings.s2_rate_beta;
        c2.rate_tr = settings.s2_rate_field;
        c2.rate_theta = settings.s2_rate_field;
        stage_logs.push_back(run_stage(ctx, c2, groups));
    }
    {
        StageConfig c3;
        c3.stage = 3;
        c3.total_steps = settings.multiplier(3) * T;
        c3.batch = std::min(settings.segment_length, T);
        c3.mode = BatchMode::Segment;
        c3.rate_tr = settings.s3_rate_field;
        c3.rate_theta = settings.s3_rate_field;
        stage_logs.push_back(run_stage(ctx, c3, groups));
    }

    MotionSolution sol;
    sol.scale = groups[0].values[0];
    sol.beta = groups[1].values;
    sol.field.joint_count = assets.joint_count;
    sol.field.tr = groups[2].values;
    sol.field.theta = groups[3].values;
    materialize_solution(assets, sol, T);
    sol.provenance = {{"setting", setting_to_string(settings.setting)},
                      {"seed", settings.seed},
                      {"stages", stage_logs}};
    return sol;
}

}  // namespace dogfit
