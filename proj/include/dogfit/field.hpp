#pragma once

// Smooth time-conditioned parameter field: Fourier time embedding feeding two
// small fully-connected networks that output per-frame (theta, gamma, phi).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "dogfit/linalg.hpp"
#include "dogfit/rotation.hpp"

namespace dogfit {

inline constexpr int kEmbedBands = 4;
inline constexpr int kEmbedDim = 1 + 2 * kEmbedBands;  // 9
inline constexpr int kTrHidden = 16;
inline constexpr int kThetaHidden = 64;
inline constexpr int kTrOut = 9;  // gamma (3) + phi (6)

using TimeEmbedding = std::array<double, kEmbedDim>;

// Normalized time plus sin/cos Fourier features, components in [-1, 1].
inline TimeEmbedding embed(int t, int T) {
    if (T < 1 || t < 0 || t >= T) throw std::out_of_range("embed: require 0 <= t < T");
    const double that = (T == 1) ? 0.0 : static_cast<double>(t) / static_cast<double>(T - 1);
    TimeEmbedding e{};
    e[0] = that;
    for (int k = 1; k <= kEmbedBands; ++k) {
        e[static_cast<std::size_t>(k)] = std::sin(2.0 * std::numbers::pi * k * that);
        e[static_cast<std::size_t>(kEmbedBands + k)] = std::cos(2.0 * std::numbers::pi * k * that);
    }
    return e;
}

// Continuous-time variant used by smoothness probes.
inline TimeEmbedding embed_continuous(double that) {
    TimeEmbedding e{};
    e[0] = that;
    for (int k = 1; k <= kEmbedBands; ++k) {
        e[static_cast<std::size_t>(k)] = std::sin(2.0 * std::numbers::pi * k * that);
        e[static_cast<std::size_t>(kEmbedBands + k)] = std::cos(2.0 * std::numbers::pi * k * that);
    }
    return e;
}

// Flat parameter count of a 3-layer net in -> h -> h -> out.
inline int mlp_param_count(int in, int h, int out) {
    return h * in + h + h * h + h + out * h + out;
}

struct FieldWeights {
    int joint_count = 0;
    std::vector<double> tr;     // flat net_TR parameters
    std::vector<double> theta;  // flat net_theta parameters

    int theta_out() const { return 6 * joint_count; }
};

template <class S>
struct FieldOutput {
    std::vector<S> theta;  // 6N
    Vec3<S> gamma;
    std::array<S, 6> phi;
};

namespace detail {

// Forward pass; tanh hidden activations, linear output. Weights layout:
// W1 (h x in, row-major), b1, W2 (h x h), b2, W3 (out x h), b3.
template <class S>
std::vector<S> eval_mlp(const std::vector<S>& w, int in, int h, int out,
                        const TimeEmbedding& x) {
    using std::tanh;
    using ad::tanh;
    if (static_cast<int>(w.size()) != mlp_param_count(in, h, out))
        throw std::invalid_argument("eval_mlp: weight vector has wrong size");
    std::size_t o = 0;
    std::vector<S> h1(static_cast<std::size_t>(h));
    for (int i = 0; i < h; ++i) {
        S acc = S(0);
        for (int j = 0; j < in; ++j) acc = acc + w[o + static_cast<std::size_t>(j)] * S(x[static_cast<std::size_t>(j)]);
        o += static_cast<std::size_t>(in);
        h1[static_cast<std::size_t>(i)] = acc;
    }
    for (int i = 0; i < h; ++i) h1[static_cast<std::size_t>(i)] = tanh(h1[static_cast<std::size_t>(i)] + w[o + static_cast<std::size_t>(i)]);
    o += static_cast<std::size_t>(h);

    std::vector<S> h2(static_cast<std::size_t>(h));
    for (int i = 0; i < h; ++i) {
        S acc = S(0);
        for (int j = 0; j < h; ++j) acc = acc + w[o + static_cast<std::size_t>(j)] * h1[static_cast<std::size_t>(j)];
        o += static_cast<std::size_t>(h);
        h2[static_cast<std::size_t>(i)] = acc;
    }
    for (int i = 0; i < h; ++i) h2[static_cast<std::size_t>(i)] = tanh(h2[static_cast<std::size_t>(i)] + w[o + static_cast<std::size_t>(i)]);
    o += static_cast<std::size_t>(h);

    std::vector<S> y(static_cast<std::size_t>(out));
    for (int i = 0; i < out; ++i) {
        S acc = S(0);
        for (int j = 0; j < h; ++j) acc = acc + w[o + static_cast<std::size_t>(j)] * h2[static_cast<std::size_t>(j)];
        o += static_cast<std::size_t>(h);
        y[static_cast<std::size_t>(i)] = acc;
    }
    for (int i = 0; i < out; ++i) y[static_cast<std::size_t>(i)] = y[static_cast<std::size_t>(i)] + w[o + static_cast<std::size_t>(i)];
    return y;
}

}  // namespace detail

template <class S>
FieldOutput<S> eval_field(const std::vector<S>& tr_weights, const std::vector<S>& theta_weights,
                          int joint_count, const TimeEmbedding& e) {
    std::vector<S> tr = detail::eval_mlp(tr_weights, kEmbedDim, kTrHidden, kTrOut, e);
    FieldOutput<S> out;
    out.gamma = {tr[0], tr[1], tr[2]};
    for (int k = 0; k < 6; ++k) out.phi[static_cast<std::size_t>(k)] = tr[static_cast<std::size_t>(3 + k)];
    out.theta = detail::eval_mlp(theta_weights, kEmbedDim, kThetaHidden, 6 * joint_count, e);
    return out;
}

inline FieldOutput<double> eval_field(const FieldWeights& w, int t, int T) {
    return eval_field(w.tr, w.theta, w.joint_count, embed(t, T));
}

struct CoarseInit {
    Vec3<double> gamma{0, 0, 0};
    std::array<double, 6> phi = identity_rot6d<double>();
};

// Zero final layer makes the field output exactly its bias vector at init;
// the bias carries the stage hand-off.
inline FieldWeights init_field(std::uint64_t seed, int joint_count,
                               const std::optional<CoarseInit>& coarse = std::nullopt) {
    FieldWeights w;
    w.joint_count = joint_count;
    std::mt19937_64 rng(seed);

    auto init_net = [&rng](int in, int h, int out, const std::vector<double>& bias) {
        std::vector<double> p(static_cast<std::size_t>(mlp_param_count(in, h, out)), 0.0);
        std::size_t o = 0;
        auto fill = [&](int rows, int cols) {
            std::normal_distribution<double> dist(0.0, 1.0 / std::sqrt(static_cast<double>(cols)));
            for (int i = 0; i < rows * cols; ++i) p[o++] = dist(rng);
            o += static_cast<std::size_t>(rows);  // hidden biases stay zero
        };
        fill(h, in);
        fill(h, h);
        o += static_cast<std::size_t>(out * h);  // final weights stay zero
        for (int i = 0; i < out; ++i) p[o + static_cast<std::size_t>(i)] = bias[static_cast<std::size_t>(i)];
        return p;
    };

    const CoarseInit c = coarse.value_or(CoarseInit{});
    std::vector<double> tr_bias = {c.gamma.x, c.gamma.y, c.gamma.z};
    for (double v : c.phi) tr_bias.push_back(v);
    w.tr = init_net(kEmbedDim, kTrHidden, kTrOut, tr_bias);

    std::vector<double> theta_bias;
    theta_bias.reserve(static_cast<std::size_t>(6 * joint_count));
    for (int j = 0; j < joint_count; ++j)
        for (double v : identity_rot6d<double>()) theta_bias.push_back(v);
    w.theta = init_net(kEmbedDim, kThetaHidden, 6 * joint_count, theta_bias);
    return w;
}

inline void to_json(nlohmann::json& j, const FieldWeights& w) {
    j = {{"joint_count", w.joint_count},
         {"tr", w.tr},
         {"theta", w.theta},
         {"embed_bands", kEmbedBands},
         {"tr_hidden", kTrHidden},
         {"theta_hidden", kThetaHidden}};
}

inline void from_json(const nlohmann::json& j, FieldWeights& w) {
    w.joint_count = j.at("joint_count").get<int>();
    w.tr = j.at("tr").get<std::vector<double>>();
    w.theta = j.at("theta").get<std::vector<double>>();
}

}  // namespace dogfit
