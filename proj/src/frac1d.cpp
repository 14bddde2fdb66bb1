#include "qfrac/frac1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

#include "qfrac/kernels.hpp"

namespace qfrac::frac1d {

namespace {

// Gamma(a) * (P(a,x1) - P(a,x0)); switches to the upper tail when both
// arguments sit past the mode, where P saturates and Q still resolves.
double gamma_lower_diff(double a, double x0, double x1) {
    const double g = std::tgamma(a);
    if (x0 > a + 1.0)
        return g * (boost::math::gamma_q(a, x0) - boost::math::gamma_q(a, x1));
    return g * (boost::math::gamma_p(a, x1) - boost::math::gamma_p(a, x0));
}

double grading_map(double s, double r) {
    const double num = std::pow(s, r);
    const double den = num + std::pow(1.0 - s, r);
    return num / den;
}

}  // namespace

void Function1D::check_domain(double t) const {
    if (!(t >= a && t <= b)) throw std::domain_error("Function1D: t outside [a,b]");
}

Quaternion Function1D::d(double t, double h, Warnings* w) const {
    if (deriv) return deriv(t);
    if (w != nullptr) w->fd_fallback = true;
    if (h <= 0.0) h = std::max(1e-6 * (b - a), 1e-9);
    if (t - h >= a && t + h <= b) return (eval(t + h) - eval(t - h)) / (2.0 * h);
    if (t + 2.0 * h <= b)
        return (eval(t) * -3.0 + eval(t + h) * 4.0 - eval(t + 2.0 * h)) / (2.0 * h);
    return (eval(t) * 3.0 - eval(t - h) * 4.0 + eval(t - 2.0 * h)) / (2.0 * h);
}

WeightFunction WeightFunction::identity() {
    WeightFunction w;
    w.phi = [](double t) { return t; };
    w.phi_prime = [](double) { return 1.0; };
    w.kind = Kind::identity;
    return w;
}

WeightFunction WeightFunction::power(double mu) {
    WeightFunction w;
    w.phi = [mu](double t) { return std::pow(t, mu) / mu; };
    w.phi_prime = [mu](double t) { return std::pow(t, mu - 1.0); };
    w.kind = Kind::power;
    w.mu = mu;
    return w;
}

WeightFunction WeightFunction::log_t() {
    WeightFunction w;
    w.phi = [](double t) { return std::log(t); };
    w.phi_prime = [](double t) { return 1.0 / t; };
    w.kind = Kind::log_t;
    return w;
}

WeightFunction WeightFunction::custom(std::function<double(double)> phi,
                                      std::function<double(double)> phi_prime) {
    WeightFunction w;
    w.phi = std::move(phi);
    w.phi_prime = std::move(phi_prime);
    w.kind = Kind::custom;
    return w;
}

const char* WeightFunction::label() const {
    switch (kind) {
        case Kind::identity: return "identity";
        case Kind::power: return "power";
        case Kind::log_t: return "log";
        default: return "custom";
    }
}

double WeightFunction::prime_checked(double t) const {
    const double p = phi_prime(t);
    if (!(p > 0.0)) throw std::domain_error("WeightFunction: phi' must be positive");
    return p;
}

FracAxisParams::FracAxisParams(double alpha_, double sigma_, Side side_, double bound_)
    : alpha(alpha_), sigma(sigma_), side(side_), bound(bound_) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("FracAxisParams: alpha must lie in (0,1)");
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw std::invalid_argument("FracAxisParams: sigma must lie in (0,1]");
}

Mesh1D::Mesh1D(int n_, double grading_) : n(n_), grading(grading_) {
    if (n < 8) throw std::invalid_argument("Mesh1D: need n >= 8");
    if (!(grading >= 1.0)) throw std::invalid_argument("Mesh1D: grading must be >= 1");
}

Quaternion prop_deriv(const Function1D& f, double sigma, double t, Warnings* w) {
    f.check_domain(t);
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw std::invalid_argument("prop_deriv: sigma must lie in (0,1]");
    return f.eval(t) * (1.0 - sigma) + f.d(t, 0.0, w) * sigma;
}

Quaternion prop_deriv_wrt(const Function1D& f, const WeightFunction& phi, double sigma,
                          double t, Warnings* w) {
    f.check_domain(t);
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw std::invalid_argument("prop_deriv_wrt: sigma must lie in (0,1]");
    const double pp = phi.prime_checked(t);
    return f.eval(t) * (1.0 - sigma) + f.d(t, 0.0, w) * (sigma / pp);
}

Quaternion e_op(const Function1D& f, const WeightFunction& phi, double sigma, double t,
                Warnings* w) {
    f.check_domain(t);
    if (!(sigma > 0.0 && sigma <= 1.0))
        throw std::invalid_argument("e_op: sigma must lie in (0,1]");
    const double pp = phi.prime_checked(t);
    return f.eval(t) * (pp * (1.0 - sigma) / sigma) + f.d(t, 0.0, w);
}

std::vector<double> graded_nodes(double from, double to, const Mesh1D& mesh) {
    std::vector<double> nodes(static_cast<std::size_t>(mesh.n) + 1);
    const double span = to - from;
    for (int j = 0; j <= mesh.n; ++j) {
        const double s = static_cast<double>(j) / mesh.n;
        nodes[static_cast<std::size_t>(j)] = from + span * grading_map(s, mesh.grading);
    }
    nodes.front() = from;
    nodes.back() = to;
    return nodes;
}

Quaternion tempered_product_integral(std::span<const double> v,
                                     std::span<const Quaternion> P, double alpha,
                                     double c) {
    if (v.size() != P.size()) throw std::invalid_argument("tempered: size mismatch");
    if (v.size() < 2) return {};
    if (c > 0.0) throw std::invalid_argument("tempered: c must be <= 0");

    const std::size_t m = v.size();
    std::vector<double> coeff(m, 0.0);
    const double k = -c;

    // per-node caches shared by adjacent cells; for c < 0 the first moment
    // follows from gamma(a+1,x) = a gamma(a,x) - x^a e^{-x}
    std::vector<double> xa(m), ex(m), gv(m);
    std::vector<char> head(m);
    const double gam_a = std::tgamma(alpha);
    for (std::size_t j = 0; j < m; ++j) {
        if (c == 0.0) {
            xa[j] = v[j] <= 0.0 ? 0.0 : std::pow(v[j], alpha);
        } else {
            const double x = k * v[j];
            xa[j] = x <= 0.0 ? 0.0 : std::pow(x, alpha);
            ex[j] = std::exp(-x);
            head[j] = x <= alpha + 1.0 ? 1 : 0;
            gv[j] = head[j] != 0 ? boost::math::gamma_p(alpha, x)
                                 : boost::math::gamma_q(alpha, x);
        }
    }

    for (std::size_t j = 0; j + 1 < m; ++j) {
        const double p = v[j], q = v[j + 1];
        const double dv = q - p;
        if (dv <= 0.0) {
            if (dv < -1e-12 * std::max(1.0, std::abs(q)))
                throw std::domain_error("tempered: mesh not increasing");
            continue;
        }
        if (dv < 1e-13 * std::max(q, 1.0)) {
            const double vb = 0.5 * (p + q);
            const double wmid = std::exp(c * vb) * std::pow(vb, alpha - 1.0) * dv;
            coeff[j] += 0.5 * wmid;
            coeff[j + 1] += 0.5 * wmid;
            continue;
        }
        double m0, m1;
        if (c == 0.0) {
            m0 = (xa[j + 1] - xa[j]) / alpha;
            m1 = (xa[j + 1] * q - xa[j] * p) / (alpha + 1.0);
        } else {
            double dga;  // gamma(alpha, kq) - gamma(alpha, kp)
            if (head[j] != 0 && head[j + 1] != 0)
                dga = gam_a * (gv[j + 1] - gv[j]);
            else if (head[j] == 0 && head[j + 1] == 0)
                dga = gam_a * (gv[j] - gv[j + 1]);
            else
                dga = gamma_lower_diff(alpha, k * p, k * q);
            const double dga1 = alpha * dga - (xa[j + 1] * ex[j + 1] - xa[j] * ex[j]);
            m0 = std::pow(k, -alpha) * dga;
            m1 = std::pow(k, -(alpha + 1.0)) * dga1;
        }
        const double s1 = (m1 - p * m0) / dv;
        coeff[j] += m0 - s1;
        coeff[j + 1] += s1;
    }
    return kernels::weighted_sum(P, coeff);
}

namespace {

// Builds the ascending-v node/value arrays for a target t and evaluator fv,
// reusing precomputed tau nodes (which run from the bound toward t).
struct VArrays {
    std::vector<double> v;
    std::vector<Quaternion> P;
};

VArrays build_v_arrays(const std::vector<double>& tau, const std::vector<double>& u,
                       const std::vector<Quaternion>& F, double U, Side side) {
    const std::size_t n = tau.size();
    VArrays out;
    out.v.resize(n);
    out.P.resize(n);
    for (std::size_t kk = 0; kk < n; ++kk) {
        const std::size_t idx = n - 1 - kk;
        out.v[kk] = side == Side::left ? U - u[idx] : u[idx] - U;
        out.P[kk] = F[idx];
    }
    if (!out.v.empty() && out.v.front() < 0.0) out.v.front() = 0.0;
    for (std::size_t kk = 0; kk + 1 < out.v.size(); ++kk)
        if (out.v[kk + 1] < out.v[kk] - 1e-12 * std::max(1.0, std::abs(out.v[kk])))
            throw std::domain_error("prop_frac_integral: weight not strictly increasing");
    return out;
}

}  // namespace

Quaternion prop_frac_integral(const Function1D& f, const FracAxisParams& p,
                              const WeightFunction& phi, double t, const Mesh1D& mesh) {
    f.check_domain(t);
    if (t == p.bound) return {};
    if (p.side == Side::left && t < p.bound)
        throw std::domain_error("prop_frac_integral: t below left bound");
    if (p.side == Side::right && t > p.bound)
        throw std::domain_error("prop_frac_integral: t above right bound");

    const double c = (p.sigma - 1.0) / p.sigma;
    // nodes run from the bound toward t; the grading clusters them at t where
    // the kernel is singular (and at the bound, which absorbs endpoint
    // singularities of f itself)
    const auto tau = graded_nodes(p.bound, t, mesh);
    const std::size_t m = tau.size();
    std::vector<double> u(m);
    std::vector<Quaternion> F(m);
    for (std::size_t j = 0; j < m; ++j) {
        u[j] = phi.phi(tau[j]);
        F[j] = f.eval(tau[j]);
    }
    const auto va = build_v_arrays(tau, u, F, phi.phi(t), p.side);
    const Quaternion raw = tempered_product_integral(va.v, va.P, p.alpha, c);
    return raw / (std::pow(p.sigma, p.alpha) * std::tgamma(p.alpha));
}

Quaternion prop_frac_deriv(const Function1D& f, const FracAxisParams& p,
                           const WeightFunction& phi, Sense sense, double t,
                           const Mesh1D& mesh, Warnings* w) {
    f.check_domain(t);
    const double hfd = (f.b - f.a) / mesh.n;
    const double refl = p.side == Side::left ? 1.0 : -1.0;

    if (sense == Sense::caputo) {
        Function1D g;
        g.a = f.a;
        g.b = f.b;
        g.eval = [&f, &phi, &p, refl, hfd, w](double tau) {
            const double pp = phi.prime_checked(tau);
            return f.eval(tau) * (1.0 - p.sigma) +
                   f.d(tau, hfd, w) * (refl * p.sigma / pp);
        };
        const FracAxisParams pi(1.0 - p.alpha, p.sigma, p.side, p.bound);
        return prop_frac_integral(g, pi, phi, t, mesh);
    }

    // Riemann-Liouville: outer proportional derivative by differencing the
    // order-(1-alpha) integral, step tied to the mesh.
    const FracAxisParams pi(1.0 - p.alpha, p.sigma, p.side, p.bound);
    auto Q = [&](double s) { return prop_frac_integral(f, pi, phi, s, mesh); };

    double lo = f.a, hi = f.b;
    if (p.side == Side::left) lo = std::max(lo, p.bound);
    else hi = std::min(hi, p.bound);
    double h = std::min(hfd, (hi - lo) / 3.0);

    if (w != nullptr) {
        if (p.side == Side::left && t - p.bound < 5.0 * h) w->endpoint_buffer = true;
        if (p.side == Side::right && p.bound - t < 5.0 * h) w->endpoint_buffer = true;
    }

    Quaternion dQ;
    if (t - h >= lo && t + h <= hi) {
        dQ = (Q(t + h) - Q(t - h)) / (2.0 * h);
    } else if (t + 2.0 * h <= hi) {
        dQ = (Q(t) * -3.0 + Q(t + h) * 4.0 - Q(t + 2.0 * h)) / (2.0 * h);
    } else {
        dQ = (Q(t) * 3.0 - Q(t - h) * 4.0 + Q(t - 2.0 * h)) / (2.0 * h);
    }
    const double pp = phi.prime_checked(t);
    return Q(t) * (1.0 - p.sigma) + dQ * (refl * p.sigma / pp);
}

Quaternion product_quadrature(const std::function<Quaternion(double)>& regular,
                              double alpha, double lo, double hi, const Mesh1D& mesh) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("product_quadrature: alpha must lie in (0,1)");
    if (hi <= lo) return {};
    const auto tau = graded_nodes(lo, hi, mesh);
    const std::size_t m = tau.size();
    std::vector<double> vv(m);
    std::vector<Quaternion> PP(m);
    for (std::size_t kk = 0; kk < m; ++kk) {
        const std::size_t idx = m - 1 - kk;
        vv[kk] = hi - tau[idx];
        PP[kk] = regular(tau[idx]);
    }
    vv.front() = 0.0;
    return tempered_product_integral(vv, PP, alpha, 0.0);
}

Quaternion prop_frac_deriv_shared_mesh(const std::function<Quaternion(double)>& F,
                                       const FracAxisParams& p,
                                       const WeightFunction& phi, double t,
                                       const Mesh1D& mesh, Warnings* w) {
    const double dist = p.side == Side::left ? t - p.bound : p.bound - t;
    if (!(dist > 0.0))
        throw std::domain_error("prop_frac_deriv_shared_mesh: t at or beyond bound");

    double h = dist * std::max(1.0 / mesh.n, 1.0 / 64.0);
    if (w != nullptr && dist < 5.0 * h) w->endpoint_buffer = true;
    h = std::min(h, dist / 3.0);

    const double int_order = 1.0 - p.alpha;
    const double c = (p.sigma - 1.0) / p.sigma;
    const double pref = 1.0 / (std::pow(p.sigma, int_order) * std::tgamma(int_order));

    // shared node cache from the bound toward t
    const auto tau = graded_nodes(p.bound, t, mesh);
    const std::size_t m = tau.size();
    std::vector<double> u(m);
    std::vector<Quaternion> Fv(m);
    for (std::size_t j = 0; j < m; ++j) {
        u[j] = phi.phi(tau[j]);
        Fv[j] = F(tau[j]);
    }

    auto Q = [&](double tp) {
        // nodes between the bound and tp, plus tp itself as the final node
        std::vector<double> stau;
        std::vector<Quaternion> sF;
        if (p.side == Side::left) {
            for (std::size_t j = 0; j < m && tau[j] <= tp; ++j) {
                stau.push_back(tau[j]);
                sF.push_back(Fv[j]);
            }
        } else {
            for (std::size_t j = 0; j < m && tau[j] >= tp; ++j) {
                stau.push_back(tau[j]);
                sF.push_back(Fv[j]);
            }
        }
        if (stau.empty() || stau.back() != tp) {
            stau.push_back(tp);
            sF.push_back(F(tp));
        }
        const double U = phi.phi(tp);
        std::vector<double> su(stau.size());
        for (std::size_t j = 0; j < stau.size(); ++j) su[j] = phi.phi(stau[j]);
        const auto va = build_v_arrays(stau, su, sF, U, p.side);
        return tempered_product_integral(va.v, va.P, int_order, c) * pref;
    };

    const double pp = phi.prime_checked(t);
    Quaternion q0 = Q(t), dQ;
    if (p.side == Side::left) {
        dQ = (q0 * 3.0 - Q(t - h) * 4.0 + Q(t - 2.0 * h)) / (2.0 * h);
        return q0 * (1.0 - p.sigma) + dQ * (p.sigma / pp);
    }
    dQ = (q0 * -3.0 + Q(t + h) * 4.0 - Q(t + 2.0 * h)) / (2.0 * h);
    return q0 * (1.0 - p.sigma) - dQ * (p.sigma / pp);
}

}  // namespace qfrac::frac1d
