#pragma once

// Small fixed-size vector/matrix types templated on the scalar so the same
// geometry code runs on plain doubles and on ad::Var.

#include <array>
#include <cmath>

#include "dogfit/ad.hpp"

namespace dogfit {

using ad::value_of;

template <class S>
struct Vec2 {
    S x{}, y{};

    Vec2() = default;
    Vec2(S x_, S y_) : x(x_), y(y_) {}

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(const S& k) const { return {x * k, y * k}; }
};

template <class S>
struct Vec3 {
    S x{}, y{}, z{};

    Vec3() = default;
    Vec3(S x_, S y_, S z_) : x(x_), y(y_), z(z_) {}

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(const S& k) const { return {x * k, y * k, z * k}; }
    Vec3& operator+=(const Vec3& o) {
        x = x + o.x;
        y = y + o.y;
        z = z + o.z;
        return *this;
    }
};

template <class S>
S dot(const Vec2<S>& a, const Vec2<S>& b) {
    return a.x * b.x + a.y * b.y;
}

template <class S>
S dot(const Vec3<S>& a, const Vec3<S>& b) {
    return a.x * b.x + a.y * b.y + a.z * b.z;
}

template <class S>
Vec3<S> cross(const Vec3<S>& a, const Vec3<S>& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class S>
S norm(const Vec2<S>& a) {
    using std::sqrt;
    using ad::sqrt;
    return sqrt(dot(a, a));
}

template <class S>
S norm(const Vec3<S>& a) {
    using std::sqrt;
    using ad::sqrt;
    return sqrt(dot(a, a));
}

template <class S>
Vec3<double> values(const Vec3<S>& a) {
    return {value_of(a.x), value_of(a.y), value_of(a.z)};
}

template <class S>
Vec2<double> values(const Vec2<S>& a) {
    return {value_of(a.x), value_of(a.y)};
}

// Row-major 3x3 matrix.
template <class S>
struct Mat3 {
    std::array<S, 9> m{};

    static Mat3 identity() {
        Mat3 r;
        r.m = {S(1), S(0), S(0), S(0), S(1), S(0), S(0), S(0), S(1)};
        return r;
    }
    static Mat3 from_columns(const Vec3<S>& a, const Vec3<S>& b, const Vec3<S>& c) {
        Mat3 r;
        r.m = {a.x, b.x, c.x, a.y, b.y, c.y, a.z, b.z, c.z};
        return r;
    }

    S operator()(int r, int c) const { return m[static_cast<std::size_t>(3 * r + c)]; }
    S& operator()(int r, int c) { return m[static_cast<std::size_t>(3 * r + c)]; }

    Vec3<S> operator*(const Vec3<S>& v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
                m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    Mat3 operator*(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) +
                          (*this)(i, 2) * o(2, j);
        return r;
    }
    Mat3 transposed() const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
};

// Rigid (or affine) transform x -> R x + t.
template <class S>
struct Transform {
    Mat3<S> rot = Mat3<S>::identity();
    Vec3<S> trans{S(0), S(0), S(0)};

    static Transform identity() { return Transform{}; }

    Vec3<S> apply(const Vec3<S>& v) const { return rot * v + trans; }
    Transform compose(const Transform& o) const {
        // (this o o)(x) = R (R_o x + t_o) + t
        Transform r;
        r.rot = rot * o.rot;
        r.trans = rot * o.trans + trans;
        return r;
    }
};

}  // namespace dogfit
