#pragma once

// Quaternion arithmetic, structural sets and coordinate maps.
//
// Quaternions are stored in standard-basis components (1, i, j, k).
// Structural sets act through to_coords/from_coords only; storage is
// never re-based.

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>

namespace qfrac {

struct Quaternion {
    double w0{0.0}, w1{0.0}, w2{0.0}, w3{0.0};  // 1, i, j, k

    constexpr Quaternion() = default;
    constexpr Quaternion(double a, double b, double c, double d)
        : w0(a), w1(b), w2(c), w3(d) {}

    static constexpr Quaternion scalar(double s) { return {s, 0.0, 0.0, 0.0}; }
    static constexpr Quaternion zero() { return {}; }
    static constexpr Quaternion one() { return {1.0, 0.0, 0.0, 0.0}; }

    constexpr double operator[](std::size_t k) const {
        return k == 0 ? w0 : k == 1 ? w1 : k == 2 ? w2 : w3;
    }

    constexpr Quaternion operator+(const Quaternion& o) const {
        return {w0 + o.w0, w1 + o.w1, w2 + o.w2, w3 + o.w3};
    }
    constexpr Quaternion operator-(const Quaternion& o) const {
        return {w0 - o.w0, w1 - o.w1, w2 - o.w2, w3 - o.w3};
    }
    constexpr Quaternion operator-() const { return {-w0, -w1, -w2, -w3}; }

    // Hamilton product; accumulation order matches the SIMD kernels
    // (t0 + t1 + t2 + t3 per component, left to right).
    constexpr Quaternion operator*(const Quaternion& o) const {
        return {((w0 * o.w0 - w1 * o.w1) - w2 * o.w2) - w3 * o.w3,
                ((w0 * o.w1 + w1 * o.w0) + w2 * o.w3) - w3 * o.w2,
                ((w0 * o.w2 - w1 * o.w3) + w2 * o.w0) + w3 * o.w1,
                ((w0 * o.w3 + w1 * o.w2) - w2 * o.w1) + w3 * o.w0};
    }
    constexpr Quaternion operator*(double s) const {
        return {w0 * s, w1 * s, w2 * s, w3 * s};
    }
    constexpr Quaternion operator/(double s) const {
        return {w0 / s, w1 / s, w2 / s, w3 / s};
    }
    friend constexpr Quaternion operator*(double s, const Quaternion& q) {
        return q * s;
    }

    Quaternion& operator+=(const Quaternion& o) { return *this = *this + o; }
    Quaternion& operator-=(const Quaternion& o) { return *this = *this - o; }
    Quaternion& operator*=(double s) { return *this = *this * s; }

    constexpr bool operator==(const Quaternion&) const = default;

    constexpr Quaternion conj() const { return {w0, -w1, -w2, -w3}; }
    constexpr double norm_sq() const {
        return w0 * w0 + w1 * w1 + w2 * w2 + w3 * w3;
    }
    double norm() const { return std::sqrt(norm_sq()); }

    Quaternion inverse() const {
        const double n2 = norm_sq();
        if (n2 == 0.0) throw std::domain_error("Quaternion::inverse: zero quaternion");
        return conj() / n2;
    }
};

using Vec4 = std::array<double, 4>;

// Euclidean scalar product <q,x>; equals the scalar part of conj(q)*x.
constexpr double scalar_product(const Quaternion& q, const Quaternion& x) {
    return q.w0 * x.w0 + q.w1 * x.w1 + q.w2 * x.w2 + q.w3 * x.w3;
}

// Ordered orthonormal 4-tuple with its orientation sign.
struct StructuralSet {
    std::array<Quaternion, 4> psi;
    int sgn = 1;

    // Validates orthonormality to `tol` and computes sgn as the sign of the
    // determinant of the column matrix [psi_0 .. psi_3] in standard basis.
    static StructuralSet validate(const std::array<Quaternion, 4>& candidate,
                                  double tol = 1e-12);

    static const StructuralSet& standard();
};

Vec4 to_coords(const Quaternion& x, const StructuralSet& psi);
Quaternion from_coords(const Vec4& c, const StructuralSet& psi);

// <q,x>_psi = sum of coordinate products in the psi basis.
double psi_scalar_product(const Quaternion& q, const Quaternion& x,
                          const StructuralSet& psi);

double det4(const std::array<Quaternion, 4>& cols);

}  // namespace qfrac
