#pragma once

// The fractional proportional Fueter-type derivatives (Riemann-Liouville and
// Caputo, a- or b-side integrals, left or right multiplication, plain or with
// respect to a weight function), the auxiliary E operators, the delta/gamma
// quaternions and the lambda/mu antiderivative profiles that drive the
// exponential conjugation identities.

#include <functional>
#include <stdexcept>
#include <string>

#include "qfrac/field.hpp"

namespace qfrac::fueter {

using field::Box4;
using field::Field4;
using field::FracVectorParams;
using field::PhiOnBox;
using frac1d::Mesh1D;
using frac1d::Sense;
using frac1d::Side;

struct UnsupportedScenario : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class MultSide { left, right };

struct OperatorSpec {
    Sense sense = Sense::riemann_liouville;
    Side int_side = Side::left;        // a-side or b-side integrals
    MultSide mult_side = MultSide::left;
    FracVectorParams params;           // operator order and proportions
    const PhiOnBox* phi = nullptr;     // with-respect-to-phi variant when set
};

// sigma^{-1} - 1, algebraically equal to sigma^{-1}(1-sigma) and
// (1-sigma)sigma^{-1}; the same map yields gamma from rho
Quaternion delta_of(const Quaternion& sigma_quat);

Quaternion frac_fueter(const Field4& F, const StructuralSet& psi,
                       const OperatorSpec& spec, const Vec4& q, const Vec4& x,
                       const Mesh1D& mesh, const Box4& J, Warnings* w = nullptr);

// E^{alpha,sigma,phi} = (sum phi_k') sigma^{-1}(1-sigma) I^{1-alpha}F + psiD I^{1-alpha}F
// (and the b-side / right-multiplied variants); requires spec.phi
Quaternion e_frac(const Field4& F, const StructuralSet& psi, const OperatorSpec& spec,
                  const Vec4& q, const Vec4& x, const Mesh1D& mesh, const Box4& J,
                  Warnings* w = nullptr);

struct WeightProfile {
    enum class ScenarioClass { linear_phi, single_nonlinear_axis, none };

    std::array<std::function<double(double)>, 4> lambda;        // antiderivatives
    std::array<std::function<double(double)>, 4> lambda_prime;
    bool exists = false;
    ScenarioClass cls = ScenarioClass::none;
    std::string reason;

    double sum_at(const Vec4& x) const;
    double weight_at(const Vec4& x) const;  // e^{sum_k lambda_k(x_k)}

    // lambda_k(t) = rate_k t in psi coordinates (plain conjugation weights)
    static WeightProfile linear_rate(const Quaternion& rate, const StructuralSet& psi);
};

// constructs lambda_k with sum_k psi_k lambda_k'(x_k) = (sum_j phi_j') * delta
// when the (phi, sigma) pair admits one; non-existence is a value
WeightProfile lambda_profile(const PhiOnBox& phi, const Quaternion& sigma_quat,
                             const StructuralSet& psi, const Vec4& q);

// |LHS - RHS| of the exponential-conjugation identity: the direct operator vs
// the weighted Fueter-derivative route (E-form when spec.phi is set)
double conjugation_residual(const Field4& F, const StructuralSet& psi,
                            const OperatorSpec& spec, const Vec4& q, const Vec4& x,
                            const Mesh1D& mesh, const Box4& J, Warnings* w = nullptr);

}  // namespace qfrac::fueter
