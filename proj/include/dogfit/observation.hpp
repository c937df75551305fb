#pragma once

// Per-frame observations (mask, depth, keypoints, dense correspondences) and
// the on-disk sequence layout:
//   <root>/cameras.json, meta.json, view_<id>/{mask,depth}/%06d.png,
//   view_<id>/keypoints.json, view_<id>/cse.json

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dogfit/camera.hpp"
#include "dogfit/image.hpp"
#include "dogfit/png_io.hpp"

namespace dogfit {

struct SequenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Keypoint {
    double u = 0, v = 0;
    double confidence = 0;
    bool present = false;
};

struct Correspondence {
    double u = 0, v = 0;
    int vertex = 0;
    double confidence = 1.0;
};

struct FrameObservation {
    std::string view;
    int t = 0;
    MaskImage mask;
    std::optional<DepthImage> depth;
    std::vector<Keypoint> keypoints;
    std::vector<Correspondence> correspondences;
};

struct SequenceMeta {
    int frame_count = 0;
    double fps = 15.0;
    std::string setting;  // modality hint recorded by the generator
};

inline void to_json(nlohmann::json& j, const SequenceMeta& m) {
    j = {{"T", m.frame_count}, {"fps", m.fps}, {"setting", m.setting}};
}

inline void from_json(const nlohmann::json& j, SequenceMeta& m) {
    m.frame_count = j.at("T").get<int>();
    m.fps = j.value("fps", 15.0);
    m.setting = j.value("setting", std::string{});
}

// observations indexed [view][frame], views ordered as in the rig
struct SequenceData {
    CameraRig rig;
    SequenceMeta meta;
    std::vector<std::vector<FrameObservation>> observations;
};

namespace seq_detail {

inline std::string frame_name(int t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%06d.png", t);
    return buf;
}

inline nlohmann::json load_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw SequenceError("cannot open " + p.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw SequenceError(p.string() + ": " + e.what());
    }
    return j;
}

}  // namespace seq_detail

// keypoints.json: {"frames": [[ [u,v,confidence,present], ... K ], ...]}
inline std::vector<std::vector<Keypoint>> load_keypoints(const std::filesystem::path& path) {
    const nlohmann::json j = seq_detail::load_json(path);
    if (!j.contains("frames"))
        throw SequenceError(path.string() + ": missing field \"frames\"");
    std::vector<std::vector<Keypoint>> out;
    for (const auto& frame : j.at("frames")) {
        std::vector<Keypoint> kps;
        for (const auto& e : frame) {
            if (!e.is_array() || e.size() != 4)
                throw SequenceError(path.string() + ": keypoint entries must be [u,v,conf,present]");
            Keypoint k;
            k.u = e[0].get<double>();
            k.v = e[1].get<double>();
            k.confidence = e[2].get<double>();
            k.present = e[3].get<int>() != 0;
            if (k.confidence < 0.0 || k.confidence > 1.0)
                throw SequenceError(path.string() + ": confidence outside [0,1]");
            kps.push_back(k);
        }
        out.push_back(std::move(kps));
    }
    return out;
}

inline void save_keypoints(const std::vector<std::vector<Keypoint>>& frames,
                           const std::filesystem::path& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& kps : frames) {
        nlohmann::json f = nlohmann::json::array();
        for (const auto& k : kps) f.push_back({k.u, k.v, k.confidence, k.present ? 1 : 0});
        arr.push_back(std::move(f));
    }
    std::ofstream out(path);
    if (!out) throw SequenceError("cannot write " + path.string());
    out << nlohmann::json{{"frames", arr}}.dump();
}

// cse.json: {"frames": [[ [u,v,vertex_id,confidence], ... ], ...]}
inline std::vector<std::vector<Correspondence>> load_cse(const std::filesystem::path& path) {
    const nlohmann::json j = seq_detail::load_json(path);
    if (!j.contains("frames")) throw SequenceError(path.string() + ": missing field \"frames\"");
    std::vector<std::vector<Correspondence>> out;
    for (const auto& frame : j.at("frames")) {
        std::vector<Correspondence> cs;
        for (const auto& e : frame) {
            if (!e.is_array() || e.size() != 4)
                throw SequenceError(path.string() + ": cse entries must be [u,v,vertex,conf]");
            Correspondence c;
            c.u = e[0].get<double>();
            c.v = e[1].get<double>();
            c.vertex = e[2].get<int>();
            c.confidence = e[3].get<double>();
            if (c.vertex < 0) throw SequenceError(path.string() + ": negative vertex index");
            cs.push_back(c);
        }
        out.push_back(std::move(cs));
    }
    return out;
}

inline void save_cse(const std::vector<std::vector<Correspondence>>& frames,
                     const std::filesystem::path& path) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& cs : frames) {
        nlohmann::json f = nlohmann::json::array();
        for (const auto& c : cs) f.push_back({c.u, c.v, c.vertex, c.confidence});
        arr.push_back(std::move(f));
    }
    std::ofstream out(path);
    if (!out) throw SequenceError("cannot write " + path.string());
    out << nlohmann::json{{"frames", arr}}.dump();
}

// Loads the whole sequence directory; missing frames are collected and
// reported in one error so the user sees the full list.
inline SequenceData load_sequence(const std::filesystem::path& root, bool need_depth) {
    namespace fs = std::filesystem;
    if (!fs::exists(root / "cameras.json"))
        throw SequenceError(root.string() + ": missing cameras.json");
    if (!fs::exists(root / "meta.json")) throw SequenceError(root.string() + ": missing meta.json");

    SequenceData seq;
    seq.rig = load_rig((root / "cameras.json").string());
    seq.meta = seq_detail::load_json(root / "meta.json").get<SequenceMeta>();
    const int T = seq.meta.frame_count;
    if (T < 1) throw SequenceError(root.string() + ": meta.json field T must be >= 1");

    std::vector<std::string> missing;
    for (const Camera& cam : seq.rig.cameras) {
        const fs::path vdir = root / ("view_" + cam.id);
        if (!fs::is_directory(vdir)) {
            throw SequenceError(root.string() + ": missing view directory " + vdir.string());
        }
        auto kps = load_keypoints(vdir / "keypoints.json");
        auto cse = load_cse(vdir / "cse.json");
        if (static_cast<int>(kps.size()) != T)
            throw SequenceError(vdir.string() + "/keypoints.json: " + std::to_string(kps.size()) +
                                " frames, meta.json declares " + std::to_string(T));
        if (static_cast<int>(cse.size()) != T)
            throw SequenceError(vdir.string() + "/cse.json: " + std::to_string(cse.size()) +
                                " frames, meta.json declares " + std::to_string(T));

        std::vector<FrameObservation> frames(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) {
            FrameObservation& obs = frames[static_cast<std::size_t>(t)];
            obs.view = cam.id;
            obs.t = t;
            const fs::path mask_path = vdir / "mask" / seq_detail::frame_name(t);
            if (!fs::exists(mask_path)) {
                missing.push_back(mask_path.string());
                continue;
            }
            obs.mask = read_png_gray8(mask_path.string());
            if (!obs.mask.same_size(cam.width, cam.height))
                throw SequenceError(mask_path.string() + ": size differs from cameras.json");
            const fs::path depth_path = vdir / "depth" / seq_detail::frame_name(t);
            if (fs::exists(depth_path)) {
                DepthImage d = read_png_gray16(depth_path.string());
                if (!d.same_size(cam.width, cam.height))
                    throw SequenceError(depth_path.string() + ": size differs from cameras.json");
                obs.depth = std::move(d);
            } else if (need_depth) {
                missing.push_back(depth_path.string());
            }
            obs.keypoints = std::move(kps[static_cast<std::size_t>(t)]);
            obs.correspondences = std::move(cse[static_cast<std::size_t>(t)]);
            for (const auto& k : obs.keypoints)
                if (k.present && (k.u < -1.0 || k.v < -1.0 || k.u > cam.width || k.v > cam.height))
                    throw SequenceError(vdir.string() + "/keypoints.json frame " +
                                        std::to_string(t) + ": pixel outside image bounds");
        }
        seq.observations.push_back(std::move(frames));
    }
    if (!missing.empty()) {
        std::string msg = root.string() + ": missing frames:";
        for (const auto& m : missing) msg += "\n  " + m;
        throw SequenceError(msg);
    }
    return seq;
}

inline void save_sequence(const SequenceData& seq, const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    fs::create_directories(root);
    save_rig(seq.rig, (root / "cameras.json").string());
    {
        std::ofstream out(root / "meta.json");
        if (!out) throw SequenceError("cannot write meta.json under " + root.string());
        out << nlohmann::json(seq.meta).dump(2);
    }
    for (std::size_t vi = 0; vi < seq.rig.cameras.size(); ++vi) {
        const Camera& cam = seq.rig.cameras[vi];
        const fs::path vdir = root / ("view_" + cam.id);
        fs::create_directories(vdir / "mask");
        fs::create_directories(vdir / "depth");
        std::vector<std::vector<Keypoint>> kps;
        std::vector<std::vector<Correspondence>> cse;
        for (const FrameObservation& obs : seq.observations[vi]) {
            write_png_gray8(obs.mask, (vdir / "mask" / seq_detail::frame_name(obs.t)).string());
            if (obs.depth)
                write_png_gray16(*obs.depth,
                                 (vdir / "depth" / seq_detail::frame_name(obs.t)).string());
            kps.push_back(obs.keypoints);
            cse.push_back(obs.correspondences);
        }
        save_keypoints(kps, vdir / "keypoints.json");
        save_cse(cse, vdir / "cse.json");
    }
}

}  // namespace dogfit
