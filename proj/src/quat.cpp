#include "qfrac/quat.hpp"

#include <cmath>

namespace qfrac {

double det4(const std::array<Quaternion, 4>& cols) {
    // m[r][c] = component r of column c
    double m[4][4];
    for (int c = 0; c < 4; ++c)
        for (int r = 0; r < 4; ++r) m[r][c] = cols[static_cast<std::size_t>(c)][static_cast<std::size_t>(r)];

    auto det3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
        return m[r0][c0] * (m[r1][c1] * m[r2][c2] - m[r1][c2] * m[r2][c1]) -
               m[r0][c1] * (m[r1][c0] * m[r2][c2] - m[r1][c2] * m[r2][c0]) +
               m[r0][c2] * (m[r1][c0] * m[r2][c1] - m[r1][c1] * m[r2][c0]);
    };
    return m[0][0] * det3(1, 2, 3, 1, 2, 3) - m[0][1] * det3(1, 2, 3, 0, 2, 3) +
           m[0][2] * det3(1, 2, 3, 0, 1, 3) - m[0][3] * det3(1, 2, 3, 0, 1, 2);
}

StructuralSet StructuralSet::validate(const std::array<Quaternion, 4>& candidate,
                                      double tol) {
    for (int k = 0; k < 4; ++k) {
        for (int s = k; s < 4; ++s) {
            const double g = scalar_product(candidate[static_cast<std::size_t>(k)], candidate[static_cast<std::size_t>(s)]);
            const double want = (k == s) ? 1.0 : 0.0;
            if (std::abs(g - want) > tol)
                throw std::invalid_argument("StructuralSet: orthonormality violated");
        }
    }
    StructuralSet out;
    out.psi = candidate;
    out.sgn = det4(candidate) >= 0.0 ? 1 : -1;
    return out;
}

const StructuralSet& StructuralSet::standard() {
    static const StructuralSet std_set = [] {
        StructuralSet s;
        s.psi = {Quaternion{1, 0, 0, 0}, Quaternion{0, 1, 0, 0},
                 Quaternion{0, 0, 1, 0}, Quaternion{0, 0, 0, 1}};
        s.sgn = 1;
        return s;
    }();
    return std_set;
}

Vec4 to_coords(const Quaternion& x, const StructuralSet& psi) {
    return {scalar_product(x, psi.psi[0]), scalar_product(x, psi.psi[1]),
            scalar_product(x, psi.psi[2]), scalar_product(x, psi.psi[3])};
}

Quaternion from_coords(const Vec4& c, const StructuralSet& psi) {
    Quaternion out;
    for (std::size_t k = 0; k < 4; ++k) out += psi.psi[k] * c[k];
    return out;
}

double psi_scalar_product(const Quaternion& q, const Quaternion& x,
                          const StructuralSet& psi) {
    const Vec4 qc = to_coords(q, psi);
    const Vec4 xc = to_coords(x, psi);
    return qc[0] * xc[0] + qc[1] * xc[1] + qc[2] * xc[2] + qc[3] * xc[3];
}

}  // namespace qfrac
