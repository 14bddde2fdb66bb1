#pragma once

// Shared kernel bodies, instantiated once per ISA. The lane traits T must
// provide a 4-double vector V plus load/add/mul/scale/broadcast and the three
// signed Hamilton permutations. Keeping the tree and the op order here is
// what guarantees scalar/AVX2 bit equality.

#include <cstddef>
#include <span>

#include "qfrac/quat.hpp"

namespace qfrac::kernels::detail {

inline constexpr std::size_t kTreeBase = 16;

template <class T>
typename T::V hamilton(typename T::V a, typename T::V b) {
    using V = typename T::V;
    // component order matches Quaternion::operator*: ((t0+t1)+t2)+t3
    V t0 = T::mul(T::template bcast<0>(a), b);
    V t1 = T::mul(T::template bcast<1>(a), T::sperm1(b));
    V t2 = T::mul(T::template bcast<2>(a), T::sperm2(b));
    V t3 = T::mul(T::template bcast<3>(a), T::sperm3(b));
    return T::add(T::add(T::add(t0, t1), t2), t3);
}

template <class T, class Term>
typename T::V pairwise(std::size_t lo, std::size_t n, const Term& term) {
    if (n <= kTreeBase) {
        typename T::V acc = T::zero();
        for (std::size_t i = lo; i < lo + n; ++i) acc = T::add(acc, term(i));
        return acc;
    }
    const std::size_t half = n / 2;
    return T::add(pairwise<T>(lo, half, term), pairwise<T>(lo + half, n - half, term));
}

template <class T>
Quaternion weighted_sum_impl(std::span<const Quaternion> v, std::span<const double> w) {
    if (v.empty()) return {};
    auto term = [&](std::size_t i) { return T::scale(T::load(v[i]), w[i]); };
    return T::store(pairwise<T>(0, v.size(), term));
}

template <class T>
Quaternion pairwise_sum_impl(std::span<const Quaternion> v) {
    if (v.empty()) return {};
    auto term = [&](std::size_t i) { return T::load(v[i]); };
    return T::store(pairwise<T>(0, v.size(), term));
}

template <class T>
Quaternion sandwich_weighted_sum_impl(std::span<const Quaternion> a, const Quaternion& m,
                                      std::span<const Quaternion> b,
                                      std::span<const double> w) {
    if (a.empty()) return {};
    const typename T::V mv = T::load(m);
    auto term = [&](std::size_t i) {
        auto p = hamilton<T>(T::load(a[i]), mv);
        auto s = hamilton<T>(p, T::load(b[i]));
        return T::scale(s, w[i]);
    };
    return T::store(pairwise<T>(0, a.size(), term));
}

}  // namespace qfrac::kernels::detail
