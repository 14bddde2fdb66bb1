#pragma once

// Scalar proportional fractional operators of one real variable with
// quaternion values: proportional derivatives (plain and with respect to an
// increasing weight function), tempered weakly singular integrals, and the
// Riemann-Liouville / Caputo fractional proportional derivatives built from
// them. The integral engine is product integration: exact kernel moments
// against a piecewise-linear interpolant on a graded mesh.

#include <functional>
#include <span>
#include <vector>

#include "qfrac/quat.hpp"
#include "qfrac/warnings.hpp"

namespace qfrac::frac1d {

struct Function1D {
    std::function<Quaternion(double)> eval;
    std::function<Quaternion(double)> deriv;  // optional; FD fallback is flagged
    double a = 0.0;
    double b = 1.0;

    void check_domain(double t) const;
    // derivative, falling back to a second-order central difference of width h
    Quaternion d(double t, double h, Warnings* w) const;
};

struct WeightFunction {
    enum class Kind { identity, power, log_t, custom };

    std::function<double(double)> phi;
    std::function<double(double)> phi_prime;
    Kind kind = Kind::identity;
    double mu = 1.0;

    static WeightFunction identity();
    static WeightFunction power(double mu);  // t^mu / mu, t > 0
    static WeightFunction log_t();           // ln t, t > 0
    static WeightFunction custom(std::function<double(double)> phi,
                                 std::function<double(double)> phi_prime);

    const char* label() const;
    double prime_checked(double t) const;  // throws std::domain_error if <= 0
};

enum class Side { left, right };
enum class Sense { riemann_liouville, caputo };

struct FracAxisParams {
    double alpha;   // order in (0,1)
    double sigma;   // proportion in (0,1]
    Side side;
    double bound;   // a for left, b for right

    FracAxisParams(double alpha_, double sigma_, Side side_, double bound_);
};

struct Mesh1D {
    int n = 256;
    double grading = 2.0;  // r >= 1, nodes concentrated at the singular endpoint

    Mesh1D() = default;
    Mesh1D(int n_, double grading_);
};

// D^sigma f = (1-sigma) f + sigma f'
Quaternion prop_deriv(const Function1D& f, double sigma, double t, Warnings* w = nullptr);

// D^{sigma,phi} f = (1-sigma) f + sigma f'/phi'
Quaternion prop_deriv_wrt(const Function1D& f, const WeightFunction& phi, double sigma,
                          double t, Warnings* w = nullptr);

// E^{sigma,phi} f = phi' sigma^{-1}(1-sigma) f + f'
Quaternion e_op(const Function1D& f, const WeightFunction& phi, double sigma, double t,
                Warnings* w = nullptr);

// Left/right tempered fractional integral of order p.alpha with weight phi.
Quaternion prop_frac_integral(const Function1D& f, const FracAxisParams& p,
                              const WeightFunction& phi, double t, const Mesh1D& mesh);

// Riemann-Liouville (outer proportional derivative of the order-(1-alpha)
// integral) or Caputo (integral of the proportional derivative). The right
// side uses the reflected proportional derivative (1-sigma)f - sigma f'/phi'.
Quaternion prop_frac_deriv(const Function1D& f, const FracAxisParams& p,
                           const WeightFunction& phi, Sense sense, double t,
                           const Mesh1D& mesh, Warnings* w = nullptr);

// approximates \int_lo^hi (hi-s)^{alpha-1} regular(s) ds
Quaternion product_quadrature(const std::function<Quaternion(double)>& regular,
                              double alpha, double lo, double hi, const Mesh1D& mesh);

// ---- engine pieces shared with the 4D assemblers ----

// n+1 points from -> to, clustered at both ends with exponent mesh.grading
std::vector<double> graded_nodes(double from, double to, const Mesh1D& mesh);

// \int e^{c v} v^{alpha-1} P(v) dv over the ascending mesh v (v[0] >= 0),
// P piecewise linear between nodes; exact moments per cell; c <= 0.
Quaternion tempered_product_integral(std::span<const double> v,
                                     std::span<const Quaternion> P, double alpha,
                                     double c);

// Fractional proportional derivative of order p.alpha evaluated with a single
// shared graded mesh and one-sided differencing; F is evaluated once per mesh
// node plus once per extra difference target. Used where F is expensive
// (cached boundary/volume transforms).
Quaternion prop_frac_deriv_shared_mesh(const std::function<Quaternion(double)>& F,
                                       const FracAxisParams& p,
                                       const WeightFunction& phi, double t,
                                       const Mesh1D& mesh, Warnings* w = nullptr);

}  // namespace qfrac::frac1d
