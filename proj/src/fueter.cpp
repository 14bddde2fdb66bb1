#include "qfrac/fueter.hpp"

#include <cmath>

namespace qfrac::fueter {

namespace {

frac1d::Side mult_to_side(MultSide m) {
    return m == MultSide::left ? frac1d::Side::left : frac1d::Side::right;
}

FracVectorParams integral_params(const FracVectorParams& p) {
    std::array<double, 4> ia{};
    for (std::size_t k = 0; k < 4; ++k) ia[k] = 1.0 - p.alpha[k];
    return {ia, p.sigma, p.sigma_quat};
}

Field4 integral_field(const Field4& F, const StructuralSet&, const OperatorSpec& spec,
                      const Vec4& q, const Mesh1D& mesh, const Box4& J) {
    const FracVectorParams ip = integral_params(spec.params);
    const PhiOnBox* phi = spec.phi;
    const Side s = spec.int_side;
    return Field4::from_callable(J, [&F, ip, phi, s, q, mesh, &J](const Vec4& x) {
        return coord_frac_integral(F, ip, phi, s, q, x, mesh, J);
    });
}

void buffer_warning(const OperatorSpec& spec, const Vec4& x, const Box4& J,
                    const Mesh1D& mesh, Warnings* w) {
    if (w == nullptr) return;
    for (std::size_t k = 0; k < 4; ++k) {
        const double h = J.edge(static_cast<int>(k)) / mesh.n;
        const double gap = spec.int_side == Side::left ? x[k] - J.lo[k] : J.hi[k] - x[k];
        if (gap < 5.0 * h) w->endpoint_buffer = true;
    }
}

}  // namespace

Quaternion delta_of(const Quaternion& sigma_quat) {
    return sigma_quat.inverse() - Quaternion::one();
}

Quaternion frac_fueter(const Field4& F, const StructuralSet& psi,
                       const OperatorSpec& spec, const Vec4& q, const Vec4& x,
                       const Mesh1D& mesh, const Box4& J, Warnings* w) {
    const double rel_h = 1.0 / mesh.n;
    if (spec.sense == Sense::riemann_liouville) {
        buffer_warning(spec, x, J, mesh, w);
        const Field4 G = integral_field(F, psi, spec, q, mesh, J);
        return quat_prop_d(G, psi, spec.params.sigma_quat, spec.phi, q,
                           mult_to_side(spec.mult_side), x, rel_h);
    }
    // Caputo: by-coordinate integral of the proportional derivative field
    const Quaternion sq = spec.params.sigma_quat;
    const PhiOnBox* phi = spec.phi;
    const frac1d::Side ms = mult_to_side(spec.mult_side);
    const Field4 H = Field4::from_callable(J, [&F, &psi, sq, phi, q, ms, rel_h](const Vec4& y) {
        return quat_prop_d(F, psi, sq, phi, q, ms, y, rel_h);
    });
    return coord_frac_integral(H, integral_params(spec.params), spec.phi, spec.int_side,
                               q, x, mesh, J);
}

Quaternion e_frac(const Field4& F, const StructuralSet& psi, const OperatorSpec& spec,
                  const Vec4& q, const Vec4& x, const Mesh1D& mesh, const Box4& J,
                  Warnings* w) {
    if (spec.phi == nullptr)
        throw std::invalid_argument("e_frac: requires a weight function phi");
    buffer_warning(spec, x, J, mesh, w);
    const double rel_h = 1.0 / mesh.n;
    const Field4 G = integral_field(F, psi, spec, q, mesh, J);
    const Quaternion gx = G.eval(x);
    const double s = spec.phi->sum_slice_deriv(x, q);
    const Quaternion d = delta_of(spec.params.sigma_quat);
    if (spec.mult_side == MultSide::left)
        return (d * gx) * s + field::fueter(G, psi, frac1d::Side::left, x, rel_h);
    return (gx * d) * s + field::fueter(G, psi, frac1d::Side::right, x, rel_h);
}

double WeightProfile::sum_at(const Vec4& x) const {
    double s = 0.0;
    for (std::size_t k = 0; k < 4; ++k) s += lambda[k](x[k]);
    return s;
}

double WeightProfile::weight_at(const Vec4& x) const { return std::exp(sum_at(x)); }

WeightProfile WeightProfile::linear_rate(const Quaternion& rate,
                                         const StructuralSet& psi) {
    WeightProfile p;
    const Vec4 rc = to_coords(rate, psi);
    for (std::size_t k = 0; k < 4; ++k) {
        const double r = rc[k];
        p.lambda[k] = [r](double t) { return r * t; };
        p.lambda_prime[k] = [r](double) { return r; };
    }
    p.exists = true;
    p.cls = ScenarioClass::linear_phi;
    return p;
}

WeightProfile lambda_profile(const PhiOnBox& phi, const Quaternion& sigma_quat,
                             const StructuralSet& psi, const Vec4&) {
    WeightProfile out;
    const Quaternion d = delta_of(sigma_quat);
    const Vec4 dc = to_coords(d, psi);

    auto zero_fn = [](double) { return 0.0; };
    for (std::size_t k = 0; k < 4; ++k) {
        out.lambda[k] = zero_fn;
        out.lambda_prime[k] = zero_fn;
    }

    bool delta_zero = true;
    for (double v : dc) delta_zero &= std::abs(v) < 1e-14;
    if (delta_zero) {
        out.exists = true;
        out.cls = WeightProfile::ScenarioClass::linear_phi;
        return out;
    }

    if (phi.family == PhiOnBox::Family::linear) {
        double c = 0.0;
        for (double v : phi.slopes) c += v;
        for (std::size_t k = 0; k < 4; ++k) {
            const double r = c * dc[k];
            out.lambda[k] = [r](double t) { return r * t; };
            out.lambda_prime[k] = [r](double) { return r; };
        }
        out.exists = true;
        out.cls = WeightProfile::ScenarioClass::linear_phi;
        return out;
    }

    if (phi.family == PhiOnBox::Family::single_axis) {
        const int ks = phi.nl_axis;
        bool supported = true;
        for (int k = 0; k < 4; ++k)
            if (k != ks && std::abs(dc[static_cast<std::size_t>(k)]) > 1e-14) supported = false;
        if (supported) {
            double co = 0.0;
            for (int j = 0; j < 4; ++j)
                if (j != ks) co += phi.slopes[static_cast<std::size_t>(j)];
            const double dk = dc[static_cast<std::size_t>(ks)];
            const auto w1 = phi.nl_weight;
            out.lambda[static_cast<std::size_t>(ks)] = [dk, co, w1](double t) {
                return dk * (co * t + w1.phi(t));
            };
            out.lambda_prime[static_cast<std::size_t>(ks)] = [dk, co, w1](double t) {
                return dk * (co + w1.phi_prime(t));
            };
            out.exists = true;
            out.cls = WeightProfile::ScenarioClass::single_nonlinear_axis;
            return out;
        }
        out.reason = "delta has components off the nonlinear axis";
        return out;
    }

    out.reason = "profile requires linear phi or a single nonlinear axis aligned with delta";
    return out;
}

double conjugation_residual(const Field4& F, const StructuralSet& psi,
                            const OperatorSpec& spec, const Vec4& q, const Vec4& x,
                            const Mesh1D& mesh, const Box4& J, Warnings* w) {
    if (spec.sense != Sense::riemann_liouville)
        throw std::invalid_argument("conjugation_residual: RL-sense identities only");
    const double rel_h = 1.0 / mesh.n;
    const Field4 G = integral_field(F, psi, spec, q, mesh, J);
    const frac1d::Side ms = mult_to_side(spec.mult_side);

    if (spec.phi == nullptr) {
        const Quaternion rate = delta_of(spec.params.sigma_quat);
        const Vec4 rc = to_coords(rate, psi);
        auto expo = [rc](const Vec4& y) {
            return std::exp(rc[0] * y[0] + rc[1] * y[1] + rc[2] * y[2] + rc[3] * y[3]);
        };
        const Field4 W = Field4::from_callable(J, [&G, expo](const Vec4& y) {
            return G.eval(y) * expo(y);
        });
        const Quaternion df = field::fueter(W, psi, ms, x, rel_h);
        const double ew = std::exp(-(rc[0] * x[0] + rc[1] * x[1] + rc[2] * x[2] + rc[3] * x[3]));
        const Quaternion rhs = spec.mult_side == MultSide::left
                                   ? (spec.params.sigma_quat * df) * ew
                                   : (df * spec.params.sigma_quat) * ew;
        const Quaternion lhs = frac_fueter(F, psi, spec, q, x, mesh, J, w);
        return (lhs - rhs).norm();
    }

    const WeightProfile prof = lambda_profile(*spec.phi, spec.params.sigma_quat, psi, q);
    if (!prof.exists)
        throw UnsupportedScenario("conjugation_residual: " + prof.reason);
    const Field4 W = Field4::from_callable(J, [&G, &prof](const Vec4& y) {
        return G.eval(y) * prof.weight_at(y);
    });
    const Quaternion rhs = field::fueter(W, psi, ms, x, rel_h) * std::exp(-prof.sum_at(x));
    const Quaternion lhs = e_frac(F, psi, spec, q, x, mesh, J, w);
    return (lhs - rhs).norm();
}

}  // namespace qfrac::fueter
