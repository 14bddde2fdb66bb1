#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qfrac/frac1d.hpp"

using namespace qfrac;
using namespace qfrac::frac1d;

namespace {

Function1D scalar_fn(std::function<double(double)> f, std::function<double(double)> df,
                     double a, double b) {
    Function1D out;
    out.a = a;
    out.b = b;
    out.eval = [f](double t) { return Quaternion::scalar(f(t)); };
    if (df) out.deriv = [df](double t) { return Quaternion::scalar(df(t)); };
    return out;
}

}  // namespace

TEST_CASE("proportional derivative") {
    const auto f = scalar_fn([](double t) { return t * t; }, [](double t) { return 2 * t; },
                             0.0, 4.0);
    CHECK(prop_deriv(f, 1.0, 3.0).w0 == doctest::Approx(6.0));

    // kernel of D^{0.5}: e^{-t}
    const auto ker = scalar_fn([](double t) { return std::exp(-t); },
                               [](double t) { return -std::exp(-t); }, 0.0, 4.0);
    for (double t : {0.1, 1.0, 3.5}) CHECK(std::abs(prop_deriv(ker, 0.5, t).w0) < 1e-12);

    const auto lin = scalar_fn([](double t) { return t; }, [](double) { return 1.0; },
                               0.0, 4.0);
    CHECK(prop_deriv(lin, 0.5, 2.0).w0 == doctest::Approx(1.5));
    CHECK_THROWS_AS((void)prop_deriv(lin, 0.5, 5.0), std::domain_error);
}

TEST_CASE("proportional derivative with respect to phi") {
    const auto f = scalar_fn([](double t) { return std::sin(t); },
                             [](double t) { return std::cos(t); }, 0.1, 3.0);
    for (double t : {0.2, 1.1, 2.7})
        CHECK((prop_deriv_wrt(f, WeightFunction::identity(), 0.7, t) -
               prop_deriv(f, 0.7, t))
                  .norm() < 1e-15);

    // kernel of D^{sigma,phi}: e^{((sigma-1)/sigma) phi}
    const double sigma = 0.6;
    const auto phi = WeightFunction::power(2.0);
    const double c = (sigma - 1.0) / sigma;
    const auto ker = scalar_fn(
        [phi, c](double t) { return std::exp(c * phi.phi(t)); },
        [phi, c](double t) { return c * phi.phi_prime(t) * std::exp(c * phi.phi(t)); },
        0.1, 3.0);
    for (double t : {0.3, 1.4, 2.9})
        CHECK(std::abs(prop_deriv_wrt(ker, phi, sigma, t).w0) < 1e-12);

    // phi = log, f = t: 0.5 t + 0.5 t = t
    const auto lin = scalar_fn([](double t) { return t; }, [](double) { return 1.0; },
                               0.5, 3.0);
    CHECK(prop_deriv_wrt(lin, WeightFunction::log_t(), 0.5, 2.0).w0 ==
          doctest::Approx(2.0));

    // phi' <= 0 rejected
    auto bad = WeightFunction::custom([](double t) { return -t; },
                                      [](double) { return -1.0; });
    CHECK_THROWS_AS((void)prop_deriv_wrt(lin, bad, 0.5, 1.0), std::domain_error);
}

TEST_CASE("auxiliary E operator") {
    const auto f = scalar_fn([](double t) { return t; }, [](double) { return 1.0; },
                             0.0, 4.0);
    const auto one = scalar_fn([](double) { return 1.0; }, [](double) { return 0.0; },
                               0.0, 4.0);
    const auto id = WeightFunction::identity();
    CHECK(e_op(f, id, 1.0, 2.5).w0 == doctest::Approx(1.0));   // sigma=1 -> f'
    CHECK(e_op(one, id, 0.5, 1.7).w0 == doctest::Approx(1.0)); // 1*2*0.5*1
    CHECK(e_op(f, id, 0.5, 2.0).w0 == doctest::Approx(3.0));

    // d/dt ( e^{phi delta} f ) = e^{phi delta} E^{sigma,phi} f  with
    // delta = (1-sigma)/sigma, checked by differencing
    const double sigma = 0.4, delta = (1.0 - sigma) / sigma;
    const auto phi = WeightFunction::power(1.5);
    const auto g = scalar_fn([](double t) { return std::cos(t); },
                             [](double t) { return -std::sin(t); }, 0.2, 3.0);
    for (double t : {0.5, 1.2, 2.4}) {
        const double h = 1e-6;
        auto prod = [&](double s) { return std::exp(phi.phi(s) * delta) * std::cos(s); };
        const double lhs = (prod(t + h) - prod(t - h)) / (2 * h);
        const double rhs = std::exp(phi.phi(t) * delta) * e_op(g, phi, sigma, t).w0;
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }
}

TEST_CASE("fractional integral against the Beta-integral oracle") {
    const Mesh1D mesh(2048, 2.0);
    const auto id = WeightFunction::identity();

    struct Case {
        double alpha, beta, t;
    };
    for (const Case c : {Case{0.4, 1.7, 0.8}, Case{0.6, 2.5, 1.0}, Case{0.5, 1.0, 0.9}}) {
        const auto f = scalar_fn([c](double tau) { return std::pow(tau, c.beta - 1.0); },
                                 nullptr, 0.0, 1.25);
        const FracAxisParams p(c.alpha, 1.0, Side::left, 0.0);
        const double got = prop_frac_integral(f, p, id, c.t, mesh).w0;
        const double want = oracles::rl_power_integral(c.alpha, c.beta, 0.0, c.t);
        CHECK(got == doctest::Approx(want).epsilon(1e-4));
    }
    // frozen oracle values for the first and last case
    CHECK(oracles::rl_power_integral(0.4, 1.7, 0.0, 0.8) ==
          doctest::Approx(0.679292582347863).epsilon(1e-12));
    CHECK(oracles::rl_power_integral(0.5, 1.0, 0.0, 0.9) ==
          doctest::Approx(1.0704744696916626).epsilon(1e-12));

    // cross-check one case with the independent adaptive integrator on the
    // substitution u = (t - tau)^alpha
    {
        const double alpha = 0.4, beta = 1.7, t = 0.8;
        const double direct = oracles::adaptive_simpson(
            [&](double u) {
                const double tau = t - std::pow(u, 1.0 / alpha);
                return std::pow(tau, beta - 1.0) / alpha;
            },
            1e-12, std::pow(t, alpha));
        CHECK(direct / std::tgamma(alpha) ==
              doctest::Approx(oracles::rl_power_integral(alpha, beta, 0.0, t))
                  .epsilon(1e-4));
    }
}

TEST_CASE("fractional integral against the exponential-cancellation oracle") {
    const Mesh1D mesh(2048, 2.0);
    const auto id = WeightFunction::identity();
    const double sigma = 0.5, alpha = 0.35, t = 1.2;
    const double c = (sigma - 1.0) / sigma;
    const auto f = scalar_fn([c](double tau) { return std::exp(c * tau); }, nullptr,
                             0.0, 2.0);
    const FracAxisParams p(alpha, sigma, Side::left, 0.0);
    const double got = prop_frac_integral(f, p, id, t, mesh).w0;
    CHECK(got == doctest::Approx(0.4591652809264806).epsilon(1e-4));
    CHECK(got ==
          doctest::Approx(oracles::exp_kernel_integral(sigma, alpha, 0.0, t)).epsilon(1e-4));
}

TEST_CASE("fractional integral edge cases") {
    const Mesh1D mesh(64, 2.0);
    const auto id = WeightFunction::identity();
    const auto zero = scalar_fn([](double) { return 0.0; }, nullptr, 0.0, 1.0);
    const FracAxisParams p(0.5, 0.8, Side::left, 0.0);
    CHECK(prop_frac_integral(zero, p, id, 0.7, mesh).norm() == 0.0);
    CHECK(prop_frac_integral(zero, p, id, 0.0, mesh).norm() == 0.0);  // t == bound

    const FracAxisParams pr(0.5, 0.8, Side::right, 1.0);
    CHECK(prop_frac_integral(zero, pr, id, 1.0, mesh).norm() == 0.0);
    const auto f = scalar_fn([](double tau) { return tau; }, nullptr, 0.0, 1.0);
    CHECK_THROWS_AS((void)prop_frac_integral(f, pr, id, 1.2, mesh), std::domain_error);

    CHECK_THROWS_AS(Mesh1D(4, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(FracAxisParams(0.5, 0.0, Side::left, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FracAxisParams(0.5, 1.2, Side::left, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FracAxisParams(1.2, 0.5, Side::left, 0.0), std::invalid_argument);
}

TEST_CASE("right-side integral mirrors the left oracle") {
    const Mesh1D mesh(1024, 2.0);
    const auto id = WeightFunction::identity();
    const double alpha = 0.45, beta = 2.0, b = 1.0;
    const auto f = scalar_fn([b, beta](double tau) { return std::pow(b - tau, beta - 1.0); },
                             nullptr, 0.0, 1.0);
    const FracAxisParams p(alpha, 1.0, Side::right, b);
    const double t = 0.3;
    const double want = oracles::rl_power_integral(alpha, beta, 0.0, b - t);
    CHECK(prop_frac_integral(f, p, id, t, mesh).w0 == doctest::Approx(want).epsilon(1e-4));
}

TEST_CASE("RL derivative of a constant") {
    const Mesh1D mesh(2048, 2.0);
    const auto id = WeightFunction::identity();
    const auto one = scalar_fn([](double) { return 1.0; }, [](double) { return 0.0; },
                               0.0, 1.5);

    SUBCASE("sigma = 1: classical oracle") {
        const FracAxisParams p(0.45, 1.0, Side::left, 0.0);
        Warnings w;
        const double got =
            prop_frac_deriv(one, p, id, Sense::riemann_liouville, 0.9, mesh, &w).w0;
        CHECK(got == doctest::Approx(0.6488078843406562).epsilon(1e-3));
        CHECK_FALSE(w.endpoint_buffer);
    }
    SUBCASE("sigma = 0.5: incomplete-gamma oracle") {
        const FracAxisParams p(0.45, 0.5, Side::left, 0.0);
        const double got =
            prop_frac_deriv(one, p, id, Sense::riemann_liouville, 0.9, mesh).w0;
        CHECK(got == doctest::Approx(0.777592620333859).epsilon(1e-3));
        CHECK(oracles::prop_rl_deriv_const(0.5, 0.45, 0.0, 0.9) ==
              doctest::Approx(0.777592620333859).epsilon(1e-12));
    }
    SUBCASE("endpoint buffer warning") {
        const FracAxisParams p(0.45, 1.0, Side::left, 0.0);
        Warnings w;
        (void)prop_frac_deriv(one, p, id, Sense::riemann_liouville, 0.002, mesh, &w);
        CHECK(w.endpoint_buffer);
    }
}

TEST_CASE("inversion: derivative of the integral returns f") {
    const Mesh1D mesh(512, 2.0);
    const auto id = WeightFunction::identity();
    const auto f = scalar_fn([](double t) { return 1.0 + t + 0.25 * t * t; }, nullptr,
                             0.0, 1.0);
    for (const double sigma : {1.0, 0.5}) {
        for (const auto side : {Side::left, Side::right}) {
            const double bound = side == Side::left ? 0.0 : 1.0;
            const FracAxisParams p(0.6, sigma, side, bound);
            Function1D g;
            g.a = f.a;
            g.b = f.b;
            g.eval = [&](double s) { return prop_frac_integral(f, p, id, s, mesh); };
            for (const double t : {0.35, 0.6, 0.8}) {
                const double got =
                    prop_frac_deriv(g, p, id, Sense::riemann_liouville, t, mesh).w0;
                CHECK(got == doctest::Approx(f.eval(t).w0).epsilon(1e-2));
            }
        }
    }
}

TEST_CASE("Caputo annihilates the proportional kernel") {
    const Mesh1D mesh(256, 2.0);
    const double sigma = 0.5;
    const auto phi = WeightFunction::identity();
    const double c = (sigma - 1.0) / sigma;
    const auto ker = scalar_fn([c](double t) { return std::exp(c * t); },
                               [c](double t) { return c * std::exp(c * t); }, 0.0, 1.0);
    const FracAxisParams p(0.4, sigma, Side::left, 0.0);
    CHECK(prop_frac_deriv(ker, p, phi, Sense::caputo, 0.8, mesh).norm() < 1e-13);
}

TEST_CASE("Caputo flags the FD fallback") {
    const Mesh1D mesh(64, 2.0);
    const auto f = scalar_fn([](double t) { return t * t; }, nullptr, 0.0, 1.0);
    const FracAxisParams p(0.4, 0.9, Side::left, 0.0);
    Warnings w;
    (void)prop_frac_deriv(f, p, WeightFunction::identity(), Sense::caputo, 0.6, mesh, &w);
    CHECK(w.fd_fallback);
}

TEST_CASE("product quadrature") {
    const Mesh1D mesh(64, 2.0);
    SUBCASE("constant: zeroth moment is exact") {
        const double alpha = 0.3, h = 0.8;
        const double got = product_quadrature(
            [](double) { return Quaternion::one(); }, alpha, 0.0, h, mesh).w0;
        CHECK(got == doctest::Approx(std::pow(h, alpha) / alpha).epsilon(1e-14));
    }
    SUBCASE("linear: exact up to roundoff") {
        const double alpha = 0.55, lo = 0.2, hi = 1.1;
        const double got = product_quadrature(
            [](double s) { return Quaternion::scalar(2.0 - 3.0 * s); }, alpha, lo, hi,
            mesh).w0;
        // exact: 2 m0 - 3 m1 with v = hi - s
        const double V = hi - lo;
        const double m0 = std::pow(V, alpha) / alpha;
        const double m1 = hi * m0 - std::pow(V, alpha + 1.0) / (alpha + 1.0);
        CHECK(got == doctest::Approx(2.0 * m0 - 3.0 * m1).epsilon(1e-13));
    }
    SUBCASE("self-convergence order on a smooth integrand") {
        const double alpha = 0.5;
        auto run = [&](int n) {
            return product_quadrature([](double s) { return Quaternion::scalar(std::cos(3.0 * s)); },
                                      alpha, 0.0, 1.0, Mesh1D(n, 2.0)).w0;
        };
        const double ref = run(8192);
        double prev_err = 0.0;
        double worst_order = 10.0;
        int idx = 0;
        for (int n : {64, 128, 256, 512}) {
            const double err = std::abs(run(n) - ref);
            if (idx > 0 && err > 0.0 && prev_err > 0.0)
                worst_order = std::min(worst_order, std::log2(prev_err / err));
            prev_err = err;
            ++idx;
        }
        CHECK(worst_order >= 1.0 + alpha - 0.15);
    }
}

TEST_CASE("semigroup of fractional integrals") {
    const Mesh1D mesh(256, 2.0);
    const auto f = scalar_fn([](double t) { return std::cos(t); }, nullptr, 0.0, 1.0);
    for (const double sigma : {1.0, 0.5}) {
        for (const auto& phi : {WeightFunction::identity(), WeightFunction::log_t()}) {
            const double lo = phi.kind == WeightFunction::Kind::log_t ? 1.0 : 0.0;
            const double hi = lo + 1.0;
            auto fd = scalar_fn([](double t) { return std::cos(t); }, nullptr, lo, hi);
            const double a = 0.3, b = 0.4;
            const FracAxisParams pa(a, sigma, Side::left, lo);
            const FracAxisParams pb(b, sigma, Side::left, lo);
            const FracAxisParams pab(a + b, sigma, Side::left, lo);
            Function1D inner;
            inner.a = lo;
            inner.b = hi;
            inner.eval = [&](double s) { return prop_frac_integral(fd, pb, phi, s, mesh); };
            const double t = lo + 0.8;
            const double nested = prop_frac_integral(inner, pa, phi, t, mesh).w0;
            const double direct = prop_frac_integral(fd, pab, phi, t, mesh).w0;
            CHECK(nested == doctest::Approx(direct).epsilon(1e-3));
        }
    }
}

TEST_CASE("linearity over quaternion values with real scalars") {
    const Mesh1D mesh(128, 2.0);
    const auto id = WeightFunction::identity();
    Function1D f, g;
    f.a = g.a = 0.0;
    f.b = g.b = 1.0;
    f.eval = [](double t) { return Quaternion{std::sin(t), t, t * t, 1.0}; };
    g.eval = [](double t) { return Quaternion{1.0, std::cos(t), 0.5 * t, -t}; };
    const double ca = 1.7, cb = -0.6;
    Function1D comb;
    comb.a = 0.0;
    comb.b = 1.0;
    comb.eval = [&](double t) { return f.eval(t) * ca + g.eval(t) * cb; };
    const FracAxisParams p(0.37, 0.7, Side::left, 0.0);
    const Quaternion lhs = prop_frac_integral(comb, p, id, 0.9, mesh);
    const Quaternion rhs = prop_frac_integral(f, p, id, 0.9, mesh) * ca +
                           prop_frac_integral(g, p, id, 0.9, mesh) * cb;
    CHECK((lhs - rhs).norm() <= 1e-13 * std::max(1.0, rhs.norm()));
}

TEST_CASE("weight-function route equals substitution route (Katugampola and Hadamard)") {
    const Mesh1D mesh(2048, 3.0);
    SUBCASE("power weight") {
        const double mu = 2.0, alpha = 0.5;
        const auto phi = WeightFunction::power(mu);
        const auto f = scalar_fn([](double t) { return t * t; }, nullptr, 0.5, 2.0);
        const FracAxisParams p(alpha, 1.0, Side::left, 0.5);
        const double t = 1.7;
        const double direct = prop_frac_integral(f, p, phi, t, mesh).w0;
        // substitution route: plain integral of f(phi^{-1}(u)) in u-space
        const auto fu = scalar_fn(
            [mu](double u) {
                const double tau = std::pow(mu * u, 1.0 / mu);
                return tau * tau;
            },
            nullptr, phi.phi(0.5), phi.phi(2.0));
        const FracAxisParams pu(alpha, 1.0, Side::left, phi.phi(0.5));
        const double sub = prop_frac_integral(fu, pu, WeightFunction::identity(),
                                              phi.phi(t), mesh).w0;
        CHECK(direct == doctest::Approx(sub).epsilon(1e-6));
    }
    SUBCASE("log weight") {
        const double alpha = 0.4;
        const auto phi = WeightFunction::log_t();
        const auto f = scalar_fn([](double t) { return 1.0 + t; }, nullptr, 1.0, 2.0);
        const FracAxisParams p(alpha, 1.0, Side::left, 1.0);
        const double t = 1.8;
        const double direct = prop_frac_integral(f, p, phi, t, mesh).w0;
        const auto fu = scalar_fn([](double u) { return 1.0 + std::exp(u); }, nullptr,
                                  0.0, std::log(2.0));
        const FracAxisParams pu(alpha, 1.0, Side::left, 0.0);
        const double sub = prop_frac_integral(fu, pu, WeightFunction::identity(),
                                              std::log(t), mesh).w0;
        CHECK(direct == doctest::Approx(sub).epsilon(1e-6));
    }
}

TEST_CASE("shared-mesh derivative agrees with the fresh-mesh derivative") {
    const Mesh1D mesh(256, 2.0);
    const auto id = WeightFunction::identity();
    const auto f = scalar_fn([](double t) { return std::sin(2.0 * t) + 1.5; }, nullptr,
                             0.0, 1.0);
    for (const auto side : {Side::left, Side::right}) {
        const double bound = side == Side::left ? 0.0 : 1.0;
        const FracAxisParams p(0.4, 0.7, side, bound);
        const double t = 0.55;
        const Quaternion fresh = prop_frac_deriv(f, p, id, Sense::riemann_liouville, t, mesh);
        const Quaternion shared = prop_frac_deriv_shared_mesh(
            [&](double s) { return f.eval(s); }, p, id, t, mesh);
        CHECK((fresh - shared).norm() < 2e-3 * std::max(1.0, fresh.norm()));
    }
}
