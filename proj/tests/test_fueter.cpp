#include <doctest.h>

#include <cmath>

#include "qfrac/fueter.hpp"

using namespace qfrac;
using namespace qfrac::fueter;

namespace {

const Box4 kBox({0.0, 0.0, 0.0, 0.0}, {1.0, 1.0, 1.0, 1.0});

Field4 poly_field() {
    return Field4::from_callable(kBox, [](const Vec4& y) {
        return Quaternion{1.0 + y[0] * y[1], y[2] * y[2], 0.5 * y[3] + y[0],
                          y[1] * y[2] * y[3]};
    });
}

FracVectorParams params_scalar(double alpha, double sigma) {
    return {{alpha, alpha, alpha, alpha},
            {sigma, sigma, sigma, sigma},
            Quaternion::scalar(sigma)};
}

}  // namespace

TEST_CASE("delta quaternion") {
    CHECK(delta_of(Quaternion::one()).norm() == 0.0);
    CHECK((delta_of(Quaternion::scalar(0.5)) - Quaternion::one()).norm() < 1e-15);
    const Quaternion d = delta_of({0.5, 0.5, 0.0, 0.0});
    CHECK((d - Quaternion{0.0, -1.0, 0.0, 0.0}).norm() < 1e-15);
    CHECK_THROWS_AS((void)delta_of(Quaternion::zero()), std::domain_error);
    // delta == sigma^{-1}(1-sigma) == (1-sigma)sigma^{-1} for generic sigma
    const Quaternion s{0.4, 0.2, -0.1, 0.3};
    const Quaternion a = s.inverse() * (Quaternion::one() - s);
    const Quaternion b = (Quaternion::one() - s) * s.inverse();
    CHECK((delta_of(s) - a).norm() < 1e-14);
    CHECK((delta_of(s) - b).norm() < 1e-14);
}

TEST_CASE("classical degeneration of the fractional Fueter derivative") {
    const auto& psi = StructuralSet::standard();
    const Mesh1D mesh(96, 2.0);
    const Field4 F = poly_field();
    const Vec4 x{0.55, 0.45, 0.6, 0.5};
    const Vec4 q = x;

    OperatorSpec spec;
    spec.params = params_scalar(0.4, 1.0);
    const Quaternion got = frac_fueter(F, psi, spec, q, x, mesh, kBox);

    // independent composition: psiD applied to the wrapped classical integral
    FracVectorParams ip = spec.params;
    for (auto& a : ip.alpha) a = 1.0 - a;
    const Field4 G = Field4::from_callable(kBox, [&](const Vec4& y) {
        return coord_frac_integral(F, ip, nullptr, frac1d::Side::left, q, y, mesh, kBox);
    });
    const Quaternion want = field::fueter(G, psi, frac1d::Side::left, x, 1.0 / mesh.n);
    CHECK((got - want).norm() < 1e-12);
}

TEST_CASE("zero field maps to zero under every variant") {
    const auto& psi = StructuralSet::standard();
    const Mesh1D mesh(64, 2.0);
    const Field4 zero =
        Field4::from_callable(kBox, [](const Vec4&) { return Quaternion::zero(); });
    const Vec4 x{0.5, 0.5, 0.5, 0.5};
    for (auto sense : {Sense::riemann_liouville, Sense::caputo})
        for (auto is : {Side::left, Side::right})
            for (auto ms : {MultSide::left, MultSide::right}) {
                OperatorSpec spec;
                spec.sense = sense;
                spec.int_side = is;
                spec.mult_side = ms;
                spec.params = params_scalar(0.35, 0.6);
                CHECK(frac_fueter(zero, psi, spec, x, x, mesh, kBox).norm() == 0.0);
            }
}

TEST_CASE("conjugation identity") {
    const auto& psi = StructuralSet::standard();
    const Field4 F = poly_field();
    const Vec4 x{0.5, 0.45, 0.55, 0.6};
    const Vec4 q = x;

    SUBCASE("sigma = 1: both routes collapse") {
        OperatorSpec spec;
        spec.params = params_scalar(0.4, 1.0);
        const double r = conjugation_residual(F, psi, spec, q, x, Mesh1D(64, 2.0), kBox);
        CHECK(r < 1e-8);
    }
    SUBCASE("scalar sigma: refinement ladder with order >= 1") {
        double prev = 0.0;
        double worst = 10.0;
        int idx = 0;
        for (int n : {32, 64, 128}) {
            OperatorSpec spec;
            spec.params = params_scalar(0.4, 0.5);
            const double r = conjugation_residual(F, psi, spec, q, x, Mesh1D(n, 2.0), kBox);
            if (idx > 0 && r > 0.0 && prev > 0.0)
                worst = std::min(worst, std::log2(prev / r));
            prev = r;
            ++idx;
        }
        CHECK(worst >= 1.0);
    }
    SUBCASE("right-multiplied variant") {
        OperatorSpec spec;
        spec.params = params_scalar(0.4, 0.5);
        spec.mult_side = MultSide::right;
        const double r = conjugation_residual(F, psi, spec, q, x, Mesh1D(128, 2.0), kBox);
        CHECK(r < 1e-3);
    }
    SUBCASE("zero field") {
        OperatorSpec spec;
        spec.params = params_scalar(0.4, 0.5);
        const Field4 zero =
            Field4::from_callable(kBox, [](const Vec4&) { return Quaternion::zero(); });
        CHECK(conjugation_residual(zero, psi, spec, q, x, Mesh1D(32, 2.0), kBox) == 0.0);
    }
}

TEST_CASE("auxiliary E operator") {
    const auto& psi = StructuralSet::standard();
    const Mesh1D mesh(96, 2.0);
    const Field4 F = poly_field();
    const Vec4 x{0.5, 0.45, 0.55, 0.6};
    const Vec4 q = x;
    const auto phi = field::PhiOnBox::linear({1.0, 0.8, 1.2, 0.9});

    SUBCASE("sigma = 1 reduces to psiD of the weighted integral") {
        OperatorSpec spec;
        spec.params = params_scalar(0.4, 1.0);
        spec.phi = &phi;
        const Quaternion got = e_frac(F, psi, spec, q, x, mesh, kBox);
        FracVectorParams ip = spec.params;
        for (auto& a : ip.alpha) a = 1.0 - a;
        const Field4 G = Field4::from_callable(kBox, [&](const Vec4& y) {
            return coord_frac_integral(F, ip, &phi, frac1d::Side::left, q, y, mesh, kBox);
        });
        CHECK((got - field::fueter(G, psi, frac1d::Side::left, x, 1.0 / mesh.n)).norm() <
              1e-13);
    }
    SUBCASE("relation to the direct fractional derivative") {
        OperatorSpec spec;
        spec.params = params_scalar(0.35, 0.5);
        spec.phi = &phi;
        const Quaternion e = e_frac(F, psi, spec, q, x, mesh, kBox);
        const Quaternion d = frac_fueter(F, psi, spec, q, x, mesh, kBox);
        const double s = phi.sum_slice_deriv(x, q);
        const Quaternion lhs = spec.params.sigma_quat.inverse() * d * s;
        CHECK((lhs - e).norm() < 1e-10 * std::max(1.0, e.norm()));
    }
    SUBCASE("mirrored right identity") {
        OperatorSpec spec;
        spec.params = params_scalar(0.35, 0.5);
        spec.phi = &phi;
        spec.mult_side = MultSide::right;
        const Quaternion e = e_frac(F, psi, spec, q, x, mesh, kBox);
        const Quaternion d = frac_fueter(F, psi, spec, q, x, mesh, kBox);
        const double s = phi.sum_slice_deriv(x, q);
        const Quaternion lhs = d * spec.params.sigma_quat.inverse() * s;
        CHECK((lhs - e).norm() < 1e-10 * std::max(1.0, e.norm()));
    }
    SUBCASE("phi required") {
        OperatorSpec spec;
        spec.params = params_scalar(0.35, 0.5);
        CHECK_THROWS_AS((void)e_frac(F, psi, spec, q, x, mesh, kBox),
                        std::invalid_argument);
    }
}

TEST_CASE("lambda profiles") {
    const auto& psi = StructuralSet::standard();
    const Vec4 q{0.5, 0.5, 0.5, 0.5};

    SUBCASE("sigma = 1: zero profile exists") {
        const auto phi = field::PhiOnBox::axis_weight(1, frac1d::WeightFunction::power(3.0),
                                                      {1.0, 0.0, 1.0, 1.0});
        const auto prof = lambda_profile(phi, Quaternion::one(), psi, q);
        CHECK(prof.exists);
        for (int k = 0; k < 4; ++k) CHECK(prof.lambda[static_cast<std::size_t>(k)](0.7) == 0.0);
    }
    SUBCASE("linear phi: antiderivative of a constant") {
        const auto phi = field::PhiOnBox::linear({2.0, 1.0, 0.5, 0.5});
        const Quaternion sigma{0.6, 0.2, 0.1, 0.05};
        const auto prof = lambda_profile(phi, sigma, psi, q);
        REQUIRE(prof.exists);
        const Vec4 dc = to_coords(delta_of(sigma), psi);
        for (int k = 0; k < 4; ++k) {
            const auto ks = static_cast<std::size_t>(k);
            CHECK(prof.lambda[ks](0.3) == doctest::Approx(4.0 * dc[ks] * 0.3));
        }
        // gradient identity at sample nodes
        for (const Vec4& x : {Vec4{0.1, 0.9, 0.4, 0.6}, Vec4{0.8, 0.2, 0.7, 0.3}}) {
            Quaternion lhs;
            for (int k = 0; k < 4; ++k) {
                const auto ks = static_cast<std::size_t>(k);
                lhs += psi.psi[ks] * prof.lambda_prime[ks](x[ks]);
            }
            const Quaternion rhs = delta_of(sigma) * phi.sum_slice_deriv(x, q);
            CHECK((lhs - rhs).norm() < 1e-10);
        }
    }
    SUBCASE("single nonlinear axis aligned with delta") {
        const auto w1 = frac1d::WeightFunction::power(2.0);
        const auto phi = field::PhiOnBox::axis_weight(2, w1, {1.0, 0.5, 0.0, 1.5});
        // delta supported on psi_2: sigma = (1 + 0.5 psi_2)^{-1}
        const Quaternion sigma = (Quaternion::one() + Quaternion{0, 0, 0.5, 0}).inverse();
        const auto prof = lambda_profile(phi, sigma, psi, q);
        REQUIRE(prof.exists);
        CHECK(prof.cls == WeightProfile::ScenarioClass::single_nonlinear_axis);
        for (const Vec4& x : {Vec4{0.1, 0.9, 0.4, 0.6}, Vec4{0.8, 0.2, 0.7, 0.3}}) {
            Quaternion lhs;
            for (int k = 0; k < 4; ++k) {
                const auto ks = static_cast<std::size_t>(k);
                lhs += psi.psi[ks] * prof.lambda_prime[ks](x[ks]);
            }
            const Quaternion rhs = delta_of(sigma) * phi.sum_slice_deriv(x, q);
            CHECK((lhs - rhs).norm() < 1e-10);
        }
    }
    SUBCASE("misaligned delta does not admit a profile") {
        const auto w1 = frac1d::WeightFunction::power(2.0);
        const auto phi = field::PhiOnBox::axis_weight(2, w1, {1.0, 0.5, 0.0, 1.5});
        const auto prof = lambda_profile(phi, Quaternion::scalar(0.5), psi, q);
        CHECK_FALSE(prof.exists);
        CHECK_FALSE(prof.reason.empty());
    }
    SUBCASE("generic phi does not admit a profile") {
        field::PhiOnBox phi;
        phi.value = [](const Vec4& x) { return x[0] * x[0] + x[1] * x[1]; };
        phi.partial = [](const Vec4& x, int k) {
            return k < 2 ? 2.0 * x[static_cast<std::size_t>(k)] : 0.0;
        };
        const auto prof = lambda_profile(phi, Quaternion::scalar(0.5), psi, q);
        CHECK_FALSE(prof.exists);
    }
}

TEST_CASE("conjugation with a weight function") {
    const auto& psi = StructuralSet::standard();
    const Field4 F = poly_field();
    const Vec4 x{0.5, 0.45, 0.55, 0.6};
    const Vec4 q = x;
    const auto phi = field::PhiOnBox::linear({0.6, 0.5, 0.7, 0.4});

    OperatorSpec spec;
    spec.params = params_scalar(0.35, 0.5);
    spec.phi = &phi;
    const double r = conjugation_residual(F, psi, spec, q, x, Mesh1D(256, 2.0), kBox);
    CHECK(r < 1e-3);

    // unsupported lambda profile surfaces as UnsupportedScenario
    const auto bad = field::PhiOnBox::axis_weight(2, frac1d::WeightFunction::power(2.0),
                                                  {1.0, 0.5, 0.0, 1.5});
    OperatorSpec spec2;
    spec2.params = params_scalar(0.35, 0.5);
    spec2.phi = &bad;
    CHECK_THROWS_AS(
        (void)conjugation_residual(F, psi, spec2, q, x, Mesh1D(32, 2.0), kBox),
        UnsupportedScenario);
}
