#pragma once

#include <array>
#include <stdexcept>

#include "dogfit/linalg.hpp"

namespace dogfit {

struct InvalidRotationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// 6D rotation representation: two 3-vectors orthonormalized by Gram-Schmidt,
// third column from the cross product. Columns of the returned matrix.
template <class S>
Mat3<S> rot6d_to_matrix(const std::array<S, 6>& r) {
    Vec3<S> a{r[0], r[1], r[2]};
    Vec3<S> b{r[3], r[4], r[5]};

    const double na = value_of(norm(a));
    if (na < 1e-8) throw InvalidRotationError("rot6d: first half has near-zero norm");
    a = a * (S(1) / norm(a));

    b = b - a * dot(a, b);
    const double nb = value_of(norm(b));
    if (nb < 1e-8)
        throw InvalidRotationError("rot6d: halves are near-parallel or second half near-zero");
    b = b * (S(1) / norm(b));

    const Vec3<S> c = cross(a, b);
    return Mat3<S>::from_columns(a, b, c);
}

// Canonical 6D encoding of a rotation matrix (its first two columns).
template <class S>
std::array<S, 6> matrix_to_rot6d(const Mat3<S>& m) {
    return {m(0, 0), m(1, 0), m(2, 0), m(0, 1), m(1, 1), m(2, 1)};
}

template <class S>
std::array<S, 6> identity_rot6d() {
    return {S(1), S(0), S(0), S(0), S(1), S(0)};
}

}  // namespace dogfit
