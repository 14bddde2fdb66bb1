#pragma once

// 4D tensor-grid quadrature, boundary 3-form integration with the nu weight,
// the Cauchy kernel, and the classical Stokes / Borel-Pompeiu evaluators.
// Node loops run through the dispatched kernels with a fixed pairwise
// reduction, so results are bitwise independent of the parallel width.

#include <array>
#include <functional>

#include "qfrac/field.hpp"
#include "qfrac/quat.hpp"
#include "qfrac/warnings.hpp"

namespace qfrac::geom {

using field::Box4;
using field::Field4;
using FieldFn = std::function<Quaternion(const Vec4&)>;

struct Face3 {
    int axis = 0;
    bool high = false;
    double coord = 0.0;
    std::array<int, 3> free_axes{};
};

std::array<Face3, 8> faces_of(const Box4& box);

enum class SingularPolicy { exclude, exclude_with_shell };

struct QuadratureSpec {
    int face_n = 16;  // nodes per axis on each face
    int vol_n = 16;   // nodes per axis for the volume rule
    SingularPolicy policy = SingularPolicy::exclude_with_shell;
    double fd_rel = 1e-4;    // FD step for classical operators, relative to edge
    int parallel_width = 1;  // results must not depend on this

    QuadratureSpec() = default;
    QuadratureSpec(int face_n_, int vol_n_,
                   SingularPolicy policy_ = SingularPolicy::exclude_with_shell);
};

// (1/2pi^2) conj(y_psi - x_psi) / |y - x|^4
Quaternion cauchy_kernel(const StructuralSet& psi, const Vec4& y, const Vec4& x);

// outward normal contracted with psi: +/- psi_k on the axis-k faces; the sign
// convention is pinned by the Stokes calibration tests
Quaternion nu_face_weight(const StructuralSet& psi, const Face3& face);

// sum over faces of \int g (weight) nu f dS, tensor-product midpoint rule
Quaternion boundary_integral(const Box4& omega, const FieldFn& g, const FieldFn& f,
                             const StructuralSet& psi, const QuadratureSpec& spec,
                             const std::function<double(const Vec4&)>* weight = nullptr);

struct SingularHandling {
    Vec4 point{};
    // replacement value for the excluded cell (used with exclude_with_shell)
    std::function<Quaternion(const Vec4& cell_lo, const Vec4& cell_hi)> estimate;
};

Quaternion volume_integral(const Box4& omega, const FieldFn& integrand,
                           const QuadratureSpec& spec,
                           const SingularHandling* singular = nullptr,
                           Warnings* w = nullptr);

// \int_cell K_psi(y - x) dy by symmetric local refinement around x
Quaternion cell_kernel_integral(const StructuralSet& psi, const Vec4& x, const Vec4& lo,
                                const Vec4& hi, int levels = 2);

struct StokesReport {
    Quaternion lhs;  // boundary side
    Quaternion rhs;  // volume side
    double residual_abs = 0.0;
    double residual_rel = 0.0;
};

StokesReport stokes_classical(const Field4& f, const Field4& g, const Box4& omega,
                              const StructuralSet& psi, const QuadratureSpec& spec);

struct BpReport {
    Quaternion recon;
    Quaternion target;
    double residual_abs = 0.0;
    double residual_rel = 0.0;
    bool interior = false;
    Warnings warn;
};

BpReport bp_classical(const Field4& f, const Field4& g, const Box4& omega,
                      const StructuralSet& psi, const Vec4& x,
                      const QuadratureSpec& spec);

}  // namespace qfrac::geom
