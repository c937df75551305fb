#pragma once

// Reverse-mode automatic differentiation on a flat tape of binary nodes.
// Var records its value plus a node index on the active tape; constants
// carry index -1 and never touch the tape.

#include <cassert>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace dogfit::ad {

struct Node {
    double w0 = 0.0, w1 = 0.0;
    int p0 = -1, p1 = -1;
};

class Tape {
public:
    int leaf() {
        nodes_.push_back(Node{});
        return static_cast<int>(nodes_.size()) - 1;
    }
    int unary(double w, int p) {
        nodes_.push_back(Node{w, 0.0, p, -1});
        return static_cast<int>(nodes_.size()) - 1;
    }
    int binary(double w0, int p0, double w1, int p1) {
        nodes_.push_back(Node{w0, w1, p0, p1});
        return static_cast<int>(nodes_.size()) - 1;
    }

    std::size_t size() const { return nodes_.size(); }
    void clear() { nodes_.clear(); }
    void reserve(std::size_t n) { nodes_.reserve(n); }

    // Adjoints of every node with respect to the node at `root`, written into
    // a caller-owned buffer so repeated passes reuse its capacity.
    void backward_into(int root, std::vector<double>& adj) const {
        adj.assign(nodes_.size(), 0.0);
        if (root < 0) return;
        adj[static_cast<std::size_t>(root)] = 1.0;
        for (int i = root; i >= 0; --i) {
            const double a = adj[static_cast<std::size_t>(i)];
            if (a == 0.0) continue;
            const Node& n = nodes_[static_cast<std::size_t>(i)];
            if (n.p0 >= 0) adj[static_cast<std::size_t>(n.p0)] += n.w0 * a;
            if (n.p1 >= 0) adj[static_cast<std::size_t>(n.p1)] += n.w1 * a;
        }
    }

    // Adjoints of every node with respect to the node at `root`.
    std::vector<double> backward(int root) const {
        std::vector<double> adj(nodes_.size(), 0.0);
        if (root < 0) return adj;
        adj[static_cast<std::size_t>(root)] = 1.0;
        for (int i = root; i >= 0; --i) {
            const double a = adj[static_cast<std::size_t>(i)];
            if (a == 0.0) continue;
            const Node& n = nodes_[static_cast<std::size_t>(i)];
            if (n.p0 >= 0) adj[static_cast<std::size_t>(n.p0)] += n.w0 * a;
            if (n.p1 >= 0) adj[static_cast<std::size_t>(n.p1)] += n.w1 * a;
        }
        return adj;
    }

    static Tape*& active() {
        static thread_local Tape* t = nullptr;
        return t;
    }

private:
    std::vector<Node> nodes_;
};

// Installs a tape as the active one for the current scope.
class ScopedTape {
public:
    explicit ScopedTape(Tape* t) : prev_(Tape::active()) { Tape::active() = t; }
    ~ScopedTape() { Tape::active() = prev_; }
    ScopedTape(const ScopedTape&) = delete;
    ScopedTape& operator=(const ScopedTape&) = delete;

private:
    Tape* prev_;
};

struct Var {
    double v = 0.0;
    int idx = -1;  // -1: constant, no tape node

    Var() = default;
    Var(double c) : v(c) {}  // NOLINT: implicit constant lift
    Var(double value, int index) : v(value), idx(index) {}

    static Var leaf(double value) {
        Tape* t = Tape::active();
        assert(t && "ad::Var leaf created without an active tape");
        return Var{value, t->leaf()};
    }
};

inline double value_of(double x) { return x; }
inline double value_of(const Var& x) { return x.v; }

namespace detail {
inline Var unary(double v, double w, int p) {
    if (p < 0) return Var{v};
    return Var{v, Tape::active()->unary(w, p)};
}
inline Var binary(double v, double w0, int p0, double w1, int p1) {
    if (p0 < 0 && p1 < 0) return Var{v};
    if (p1 < 0) return Var{v, Tape::active()->unary(w0, p0)};
    if (p0 < 0) return Var{v, Tape::active()->unary(w1, p1)};
    return Var{v, Tape::active()->binary(w0, p0, w1, p1)};
}
}  // namespace detail

inline Var operator+(const Var& a, const Var& b) {
    return detail::binary(a.v + b.v, 1.0, a.idx, 1.0, b.idx);
}
inline Var operator-(const Var& a, const Var& b) {
    return detail::binary(a.v - b.v, 1.0, a.idx, -1.0, b.idx);
}
inline Var operator*(const Var& a, const Var& b) {
    return detail::binary(a.v * b.v, b.v, a.idx, a.v, b.idx);
}
inline Var operator/(const Var& a, const Var& b) {
    const double inv = 1.0 / b.v;
    return detail::binary(a.v * inv, inv, a.idx, -a.v * inv * inv, b.idx);
}
inline Var operator-(const Var& a) { return detail::unary(-a.v, -1.0, a.idx); }
inline Var operator+(const Var& a) { return a; }

inline Var& operator+=(Var& a, const Var& b) { return a = a + b; }
inline Var& operator-=(Var& a, const Var& b) { return a = a - b; }
inline Var& operator*=(Var& a, const Var& b) { return a = a * b; }
inline Var& operator/=(Var& a, const Var& b) { return a = a / b; }

inline Var sqrt(const Var& a) {
    const double s = std::sqrt(a.v);
    return detail::unary(s, 0.5 / s, a.idx);
}
inline Var exp(const Var& a) {
    const double e = std::exp(a.v);
    return detail::unary(e, e, a.idx);
}
inline Var log(const Var& a) { return detail::unary(std::log(a.v), 1.0 / a.v, a.idx); }
inline Var sin(const Var& a) { return detail::unary(std::sin(a.v), std::cos(a.v), a.idx); }
inline Var cos(const Var& a) { return detail::unary(std::cos(a.v), -std::sin(a.v), a.idx); }
inline Var tanh(const Var& a) {
    const double t = std::tanh(a.v);
    return detail::unary(t, 1.0 - t * t, a.idx);
}
inline Var abs(const Var& a) {
    return detail::unary(std::abs(a.v), a.v < 0.0 ? -1.0 : 1.0, a.idx);
}

inline bool operator<(const Var& a, const Var& b) { return a.v < b.v; }
inline bool operator>(const Var& a, const Var& b) { return a.v > b.v; }
inline bool operator<=(const Var& a, const Var& b) { return a.v <= b.v; }
inline bool operator>=(const Var& a, const Var& b) { return a.v >= b.v; }

}  // namespace dogfit::ad
