#pragma once

// Quaternion-valued fields on a 4D box: finite-difference Fueter operators,
// quaternionic proportional derivatives, and the by-coordinate fractional
// integrals with a base point q. Coordinates are always psi-coordinates.

#include <array>
#include <functional>
#include <vector>

#include "qfrac/frac1d.hpp"
#include "qfrac/quat.hpp"
#include "qfrac/warnings.hpp"

namespace qfrac::field {

struct Box4 {
    Vec4 lo{};
    Vec4 hi{};

    Box4() = default;
    Box4(const Vec4& lo_, const Vec4& hi_);

    bool contains(const Vec4& x) const;
    double edge(int k) const { return hi[static_cast<std::size_t>(k)] - lo[static_cast<std::size_t>(k)]; }
};

class Field4 {
  public:
    static Field4 from_callable(Box4 box, std::function<Quaternion(const Vec4&)> fn);
    // samples fn on a tensor grid (>= 9 nodes per axis); evaluation then
    // multilinearly interpolates, so quadrature nodes may fall off-grid
    static Field4 sample(Box4 box, const std::function<Quaternion(const Vec4&)>& fn,
                         const std::array<int, 4>& nodes_per_axis);

    Quaternion eval(const Vec4& x) const;
    const Box4& box() const { return box_; }
    bool is_grid() const { return grid_; }

  private:
    Box4 box_;
    std::function<Quaternion(const Vec4&)> fn_;
    bool grid_ = false;
    std::array<int, 4> nn_{};
    std::vector<Quaternion> vals_;
};

struct FracVectorParams {
    std::array<double, 4> alpha{};   // per-axis orders in (0,1)
    std::array<double, 4> sigma{};   // per-axis proportions in (0,1]
    Quaternion sigma_quat = Quaternion::one();

    FracVectorParams() = default;
    FracVectorParams(const std::array<double, 4>& alpha_,
                     const std::array<double, 4>& sigma_, const Quaternion& sq);

    // paper coupling sigma = sum_k psi_k sigma_k
    static Quaternion coupled_quat(const StructuralSet& psi,
                                   const std::array<double, 4>& sigma);
};

// Weight function on the box with the per-axis slice structure needed by the
// with-respect-to-phi operators. Slices are taken at the base point q:
// phi_i(t) = phi(q_0,...,t,...,q_3).
struct PhiOnBox {
    enum class Family { linear, single_axis, generic };

    std::function<double(const Vec4&)> value;
    std::function<double(const Vec4&, int)> partial;
    Family family = Family::generic;
    Vec4 slopes{};            // linear coefficients (all axes for linear family,
                              // the other axes for single_axis)
    int nl_axis = -1;         // the nonlinear axis for single_axis
    frac1d::WeightFunction nl_weight;  // 1D weight along nl_axis

    static PhiOnBox linear(const Vec4& slopes, double constant = 0.0);
    static PhiOnBox sum_identity() { return linear({1.0, 1.0, 1.0, 1.0}); }
    static PhiOnBox axis_weight(int axis, frac1d::WeightFunction w1d,
                                const Vec4& other_slopes);

    frac1d::WeightFunction slice(int i, const Vec4& q) const;
    double sum_slice_deriv(const Vec4& x, const Vec4& q) const;
};

// second-order partial derivative stencil, one-sided within h of a face
Quaternion partial_fd(const Field4& F, int k, const Vec4& x, double h);

// left: sum psi_k d_k F; right: sum (d_k F) psi_k. Steps h_k = rel_h * edge_k.
Quaternion fueter(const Field4& F, const StructuralSet& psi, frac1d::Side side,
                  const Vec4& x, double rel_h);

// (1-sigma)F + sigma [sum phi_k']^{-1} psiD F and its right-multiplied mirror;
// plain version when phi == nullptr
Quaternion quat_prop_d(const Field4& F, const StructuralSet& psi,
                       const Quaternion& sigma_quat, const PhiOnBox* phi,
                       const Vec4& q, frac1d::Side side, const Vec4& x, double rel_h);

// sum over axes of the 1D proportional fractional integral along the line
// through q, evaluated at x_i, with per-axis (alpha_i, sigma_i) and the phi_i
// slice; bounds come from the box J.
Quaternion coord_frac_integral(const Field4& F, const FracVectorParams& p,
                               const PhiOnBox* phi, frac1d::Side side, const Vec4& q,
                               const Vec4& x, const frac1d::Mesh1D& mesh,
                               const Box4& J);

}  // namespace qfrac::field
