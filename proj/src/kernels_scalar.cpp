#include "kernels_common.hpp"
#include "qfrac/kernels.hpp"

namespace qfrac::kernels {
namespace {

struct Lane4 {
    double v[4];
};

struct ScalarTraits {
    using V = Lane4;

    static V load(const Quaternion& q) { return {{q.w0, q.w1, q.w2, q.w3}}; }
    static Quaternion store(V x) { return {x.v[0], x.v[1], x.v[2], x.v[3]}; }
    static V zero() { return {{0.0, 0.0, 0.0, 0.0}}; }
    static V add(V a, V b) {
        return {{a.v[0] + b.v[0], a.v[1] + b.v[1], a.v[2] + b.v[2], a.v[3] + b.v[3]}};
    }
    static V mul(V a, V b) {
        return {{a.v[0] * b.v[0], a.v[1] * b.v[1], a.v[2] * b.v[2], a.v[3] * b.v[3]}};
    }
    static V scale(V a, double s) {
        return {{a.v[0] * s, a.v[1] * s, a.v[2] * s, a.v[3] * s}};
    }
    template <int K>
    static V bcast(V a) {
        return {{a.v[K], a.v[K], a.v[K], a.v[K]}};
    }
    // signed permutations for the Hamilton terms t1, t2, t3
    static V sperm1(V b) { return {{-b.v[1], b.v[0], -b.v[3], b.v[2]}}; }
    static V sperm2(V b) { return {{-b.v[2], b.v[3], b.v[0], -b.v[1]}}; }
    static V sperm3(V b) { return {{-b.v[3], -b.v[2], b.v[1], b.v[0]}}; }
};

Quaternion ws(std::span<const Quaternion> v, std::span<const double> w) {
    return detail::weighted_sum_impl<ScalarTraits>(v, w);
}
Quaternion ps(std::span<const Quaternion> v) {
    return detail::pairwise_sum_impl<ScalarTraits>(v);
}
Quaternion sws(std::span<const Quaternion> a, const Quaternion& m,
               std::span<const Quaternion> b, std::span<const double> w) {
    return detail::sandwich_weighted_sum_impl<ScalarTraits>(a, m, b, w);
}

const Ops kScalarOps{ws, ps, sws};

}  // namespace

const Ops* scalar_ops() { return &kScalarOps; }

}  // namespace qfrac::kernels
