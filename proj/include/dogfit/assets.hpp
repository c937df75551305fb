#pragma once

// Static data behind the articulated body model: template mesh, skeleton,
// skinning weights, shape basis, priors and the keypoint/foot tables.

#include <array>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <json.hpp>

#include "dogfit/linalg.hpp"

namespace dogfit {

struct AssetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr int kShapeDim = 30;

struct KeypointEntry {
    int id = 0;
    bool on_joint = true;  // otherwise a vertex index
    int index = 0;
    std::string name;
};

// Per-vertex skinning: at most 4 (joint, weight) pairs, weights sum to 1.
struct SkinEntry {
    int count = 0;
    std::array<int, 4> joint{{-1, -1, -1, -1}};
    std::array<double, 4> weight{{0, 0, 0, 0}};
};

struct TemplateAssets {
    std::vector<Vec3<double>> vertices;
    std::vector<std::array<int, 3>> faces;
    int joint_count = 0;
    std::vector<Vec3<double>> rest_joints;
    std::vector<int> parent;  // -1 marks the root
    std::vector<SkinEntry> skin_weights;
    std::vector<std::vector<Vec3<double>>> shape_basis;  // kShapeDim fields of V displacements

    std::vector<double> shape_prior_mean;              // kShapeDim
    std::vector<double> shape_prior_cov;               // row-major kShapeDim^2
    std::vector<double> pose_prior_mean;               // 6N
    std::vector<double> pose_prior_cov;                // row-major (6N)^2
    std::vector<double> limb_weight_vector;            // kShapeDim, nonnegative

    std::vector<KeypointEntry> keypoint_table;
    std::vector<std::pair<int, int>> foot_pairs;
    std::vector<int> foot_joints;
    std::vector<int> leg_faces;

    // Filled by finalize(): inverses of the prior covariances.
    std::vector<double> shape_cov_inv;
    std::vector<double> pose_cov_inv;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
    int pose_dim() const { return 6 * joint_count; }

    void validate() const;
    void finalize();  // validate + precompute covariance inverses
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const std::vector<double>& flat, int n) {
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = flat[static_cast<std::size_t>(i * n + j)];
    return m;
}

inline std::vector<double> from_eigen(const Eigen::MatrixXd& m) {
    std::vector<double> flat(static_cast<std::size_t>(m.rows() * m.cols()));
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            flat[static_cast<std::size_t>(i * m.cols() + j)] = m(i, j);
    return flat;
}

// Cholesky-based PSD check + inverse.
inline std::vector<double> psd_inverse(const std::vector<double>& cov, int n,
                                       const std::string& label) {
    if (cov.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n))
        throw AssetError(label + ": covariance has wrong size");
    const Eigen::MatrixXd m = to_eigen(cov, n);
    if (!m.isApprox(m.transpose(), 1e-9)) throw AssetError(label + ": covariance not symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success)
        throw AssetError(label + ": covariance failed Cholesky (not positive definite)");
    return from_eigen(llt.solve(Eigen::MatrixXd::Identity(n, n)));
}

}  // namespace detail

inline void TemplateAssets::validate() const {
    const int nv = vertex_count();
    const int nj = joint_count;
    if (nv == 0) throw AssetError("assets: empty vertex list");
    if (nj <= 0 || static_cast<int>(rest_joints.size()) != nj ||
        static_cast<int>(parent.size()) != nj)
        throw AssetError("assets: joint_count / rest_joints / parent mismatch");

    for (const auto& f : faces)
        for (int k = 0; k < 3; ++k)
            if (f[static_cast<std::size_t>(k)] < 0 || f[static_cast<std::size_t>(k)] >= nv)
                throw AssetError("assets: face index out of range");

    // parent array must encode a single-rooted acyclic tree
    int roots = 0;
    for (int j = 0; j < nj; ++j) {
        if (parent[static_cast<std::size_t>(j)] == -1) {
            ++roots;
        } else if (parent[static_cast<std::size_t>(j)] < 0 ||
                   parent[static_cast<std::size_t>(j)] >= nj) {
            throw AssetError("assets: parent index out of range");
        } else if (parent[static_cast<std::size_t>(j)] >= j) {
            // topological order keeps the forward-kinematics pass a single sweep
            throw AssetError("assets: parents must precede children");
        }
    }
    if (roots != 1) throw AssetError("assets: skeleton must have exactly one root");

    if (static_cast<int>(skin_weights.size()) != nv)
        throw AssetError("assets: skin weight rows != vertex count");
    for (const auto& e : skin_weights) {
        if (e.count < 1 || e.count > 4) throw AssetError("assets: skin row with bad entry count");
        double sum = 0.0;
        for (int k = 0; k < e.count; ++k) {
            if (e.joint[static_cast<std::size_t>(k)] < 0 ||
                e.joint[static_cast<std::size_t>(k)] >= nj)
                throw AssetError("assets: skin joint index out of range");
            if (e.weight[static_cast<std::size_t>(k)] < 0.0)
                throw AssetError("assets: negative skin weight");
            sum += e.weight[static_cast<std::size_t>(k)];
        }
        if (std::abs(sum - 1.0) > 1e-6) throw AssetError("assets: skin row does not sum to 1");
    }

    if (static_cast<int>(shape_basis.size()) != kShapeDim)
        throw AssetError("assets: shape basis count must be 30");
    for (const auto& b : shape_basis)
        if (static_cast<int>(b.size()) != nv)
            throw AssetError("assets: shape basis field size mismatch");

    if (static_cast<int>(shape_prior_mean.size()) != kShapeDim ||
        static_cast<int>(limb_weight_vector.size()) != kShapeDim)
        throw AssetError("assets: prior mean / limb weights must have dimension 30");
    for (double w : limb_weight_vector)
        if (w < 0.0) throw AssetError("assets: limb weights must be nonnegative");
    if (static_cast<int>(pose_prior_mean.size()) != pose_dim())
        throw AssetError("assets: pose prior mean must have dimension 6N");

    for (const auto& k : keypoint_table) {
        const int lim = k.on_joint ? nj : nv;
        if (k.index < 0 || k.index >= lim)
            throw AssetError("assets: keypoint table index out of range");
    }
    for (const auto& [l, r] : foot_pairs)
        if (l < 0 || l >= nj || r < 0 || r >= nj)
            throw AssetError("assets: foot pair index out of range");
    for (int j : foot_joints)
        if (j < 0 || j >= nj) throw AssetError("assets: foot joint index out of range");
    for (int f : leg_faces)
        if (f < 0 || f >= face_count()) throw AssetError("assets: leg face index out of range");
}

inline void TemplateAssets::finalize() {
    validate();
    shape_cov_inv = detail::psd_inverse(shape_prior_cov, kShapeDim, "shape prior");
    pose_cov_inv = detail::psd_inverse(pose_prior_cov, pose_dim(), "pose prior");
}

// ---- JSON serialization ------------------------------------------------

namespace detail {

inline nlohmann::json vec3s_to_json(const std::vector<Vec3<double>>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& p : v) a.push_back({p.x, p.y, p.z});
    return a;
}

inline std::vector<Vec3<double>> vec3s_from_json(const nlohmann::json& a) {
    std::vector<Vec3<double>> v;
    v.reserve(a.size());
    for (const auto& p : a) v.emplace_back(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    return v;
}

}  // namespace detail

inline void to_json(nlohmann::json& j, const TemplateAssets& a) {
    j["vertices"] = detail::vec3s_to_json(a.vertices);
    nlohmann::json faces = nlohmann::json::array();
    for (const auto& f : a.faces) faces.push_back({f[0], f[1], f[2]});
    j["faces"] = std::move(faces);
    j["joint_count"] = a.joint_count;
    j["rest_joints"] = detail::vec3s_to_json(a.rest_joints);
    j["parent"] = a.parent;
    nlohmann::json skin = nlohmann::json::array();
    for (const auto& e : a.skin_weights) {
        nlohmann::json row = nlohmann::json::array();
        for (int k = 0; k < e.count; ++k)
            row.push_back({e.joint[static_cast<std::size_t>(k)],
                           e.weight[static_cast<std::size_t>(k)]});
        skin.push_back(std::move(row));
    }
    j["skin_weights"] = std::move(skin);
    nlohmann::json basis = nlohmann::json::array();
    for (const auto& b : a.shape_basis) basis.push_back(detail::vec3s_to_json(b));
    j["shape_basis"] = std::move(basis);
    j["shape_prior"] = {{"mean", a.shape_prior_mean}, {"cov", a.shape_prior_cov}};
    j["pose_prior"] = {{"mean", a.pose_prior_mean}, {"cov", a.pose_prior_cov}};
    j["limb_weight_vector"] = a.limb_weight_vector;
    nlohmann::json kps = nlohmann::json::array();
    for (const auto& k : a.keypoint_table)
        kps.push_back({{"id", k.id},
                       {"kind", k.on_joint ? "joint" : "vertex"},
                       {"index", k.index},
                       {"name", k.name}});
    j["keypoint_table"] = std::move(kps);
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [l, r] : a.foot_pairs) pairs.push_back({l, r});
    j["foot_pairs"] = std::move(pairs);
    j["foot_joints"] = a.foot_joints;
    j["leg_faces"] = a.leg_faces;
}

inline void from_json(const nlohmann::json& j, TemplateAssets& a) {
    a.vertices = detail::vec3s_from_json(j.at("vertices"));
    a.faces.clear();
    for (const auto& f : j.at("faces"))
        a.faces.push_back({f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
    a.joint_count = j.at("joint_count").get<int>();
    a.rest_joints = detail::vec3s_from_json(j.at("rest_joints"));
    a.parent = j.at("parent").get<std::vector<int>>();
    a.skin_weights.clear();
    for (const auto& row : j.at("skin_weights")) {
        SkinEntry e;
        e.count = static_cast<int>(row.size());
        for (int k = 0; k < e.count && k < 4; ++k) {
            e.joint[static_cast<std::size_t>(k)] = row.at(static_cast<std::size_t>(k)).at(0).get<int>();
            e.weight[static_cast<std::size_t>(k)] = row.at(static_cast<std::size_t>(k)).at(1).get<double>();
        }
        a.skin_weights.push_back(e);
    }
    a.shape_basis.clear();
    for (const auto& b : j.at("shape_basis")) a.shape_basis.push_back(detail::vec3s_from_json(b));
    a.shape_prior_mean = j.at("shape_prior").at("mean").get<std::vector<double>>();
    a.shape_prior_cov = j.at("shape_prior").at("cov").get<std::vector<double>>();
    a.pose_prior_mean = j.at("pose_prior").at("mean").get<std::vector<double>>();
    a.pose_prior_cov = j.at("pose_prior").at("cov").get<std::vector<double>>();
    a.limb_weight_vector = j.at("limb_weight_vector").get<std::vector<double>>();
    a.keypoint_table.clear();
    for (const auto& k : j.at("keypoint_table")) {
        KeypointEntry e;
        e.id = k.at("id").get<int>();
        e.on_joint = k.at("kind").get<std::string>() == "joint";
        e.index = k.at("index").get<int>();
        e.name = k.value("name", std::string{});
        a.keypoint_table.push_back(e);
    }
    a.foot_pairs.clear();
    for (const auto& p : j.at("foot_pairs"))
        a.foot_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    a.foot_joints = j.at("foot_joints").get<std::vector<int>>();
    a.leg_faces = j.at("leg_faces").get<std::vector<int>>();
}

inline TemplateAssets load_assets(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw AssetError("assets: cannot open " + path);
    nlohmann::json j;
    in >> j;
    TemplateAssets a = j.get<TemplateAssets>();
    a.finalize();
    return a;
}

inline void save_assets(const TemplateAssets& a, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw AssetError("assets: cannot write " + path);
    out << nlohmann::json(a);
}

}  // namespace dogfit
