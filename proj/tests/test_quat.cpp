#include <doctest.h>

#include <cmath>
#include <random>

#include "qfrac/quat.hpp"

using namespace qfrac;

namespace {

Quaternion random_quat(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    return {u(rng), u(rng), u(rng), u(rng)};
}

// random structural set via Gram-Schmidt
StructuralSet random_structural_set(std::mt19937_64& rng) {
    std::array<Quaternion, 4> v;
    while (true) {
        for (auto& q : v) q = random_quat(rng);
        bool ok = true;
        for (int k = 0; k < 4 && ok; ++k) {
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j < k; ++j)
                    v[k] -= v[j] * scalar_product(v[k], v[j]);
            const double n = v[k].norm();
            if (n < 1e-3) {
                ok = false;
                break;
            }
            v[k] = v[k] / n;
        }
        if (ok) return StructuralSet::validate(v);
    }
}

}  // namespace

TEST_CASE("defining relations") {
    const Quaternion i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
    CHECK(i * j == k);
    CHECK(j * k == i);
    CHECK(k * i == j);
    CHECK(i * i == Quaternion::scalar(-1));
    CHECK(j * i == -k);
    CHECK(Quaternion(1, 1, 1, 1).norm() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("inverse") {
    CHECK((Quaternion::scalar(2).inverse() - Quaternion::scalar(0.5)).norm() == 0.0);
    const Quaternion q{0.3, -1.2, 0.7, 2.0};
    CHECK((q * q.inverse() - Quaternion::one()).norm() < 1e-15);
    CHECK((q.inverse() * q - Quaternion::one()).norm() < 1e-15);
    CHECK_THROWS_AS((void)Quaternion::zero().inverse(), std::domain_error);
}

TEST_CASE("scalar products") {
    const Quaternion i{0, 1, 0, 0}, j{0, 0, 1, 0};
    CHECK(scalar_product(i, j) == 0.0);
    const Quaternion q{0.5, -2.0, 1.5, 3.0};
    CHECK(scalar_product(q, q) == doctest::Approx(q.norm_sq()).epsilon(1e-15));
    const auto& psi = StructuralSet::standard();
    CHECK(psi_scalar_product({1, 2, 0, 0}, {3, 4, 0, 0}, psi) == doctest::Approx(11.0));
}

TEST_CASE("scalar product equals its quaternion form") {
    std::mt19937_64 rng(7);
    for (int it = 0; it < 200; ++it) {
        const Quaternion q = random_quat(rng), x = random_quat(rng);
        const Quaternion form = (q.conj() * x + x.conj() * q) * 0.5;
        CHECK(form.w0 == doctest::Approx(scalar_product(q, x)).epsilon(1e-13));
        CHECK(std::abs(form.w1) < 1e-15);
        CHECK(std::abs(form.w2) < 1e-15);
        CHECK(std::abs(form.w3) < 1e-15);
    }
}

TEST_CASE("structural set validation and orientation") {
    const Quaternion one{1, 0, 0, 0}, i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
    const auto std_set = StructuralSet::validate({one, i, j, k});
    CHECK(std_set.sgn == 1);
    const auto swapped = StructuralSet::validate({one, j, i, k});
    CHECK(swapped.sgn == -1);
    CHECK_THROWS_AS((void)StructuralSet::validate({one, i, i, k}), std::invalid_argument);
}

TEST_CASE("coordinate maps") {
    const auto& psi = StructuralSet::standard();
    const Quaternion x = from_coords({1, 2, 3, 4}, psi);
    CHECK(x == Quaternion{1, 2, 3, 4});

    const Quaternion one{1, 0, 0, 0}, i{0, 1, 0, 0}, j{0, 0, 1, 0}, k{0, 0, 0, 1};
    const auto perm = StructuralSet::validate({one, j, i, k});
    const Vec4 c = to_coords({1, 2, 3, 4}, perm);
    CHECK(c[0] == doctest::Approx(1.0));
    CHECK(c[1] == doctest::Approx(3.0));
    CHECK(c[2] == doctest::Approx(2.0));
    CHECK(c[3] == doctest::Approx(4.0));

    std::mt19937_64 rng(11);
    for (int it = 0; it < 100; ++it) {
        const auto set = random_structural_set(rng);
        const Quaternion q = random_quat(rng);
        const Quaternion back = from_coords(to_coords(q, set), set);
        CHECK((back - q).norm() < 1e-14);
        // linear isometry
        const Vec4 cc = to_coords(q, set);
        const double n2 = cc[0] * cc[0] + cc[1] * cc[1] + cc[2] * cc[2] + cc[3] * cc[3];
        CHECK(std::sqrt(n2) == doctest::Approx(q.norm()).epsilon(1e-12));
        // Gram matrix is the identity
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                CHECK(std::abs(scalar_product(set.psi[static_cast<std::size_t>(a)],
                                              set.psi[static_cast<std::size_t>(b)]) -
                               (a == b ? 1.0 : 0.0)) < 1e-12);
    }
}

TEST_CASE("algebra properties on random triples") {
    std::mt19937_64 rng(42);
    for (int it = 0; it < 2000; ++it) {
        const Quaternion x = random_quat(rng), y = random_quat(rng), z = random_quat(rng);
        CHECK(std::abs((x * y).norm() - x.norm() * y.norm()) <=
              1e-12 * std::max(1.0, x.norm() * y.norm()));
        CHECK(((x * y).conj() - y.conj() * x.conj()).norm() < 1e-13);
        CHECK(((x * y) * z - x * (y * z)).norm() <=
              1e-12 * std::max(1.0, x.norm() * y.norm() * z.norm()));
    }
}
