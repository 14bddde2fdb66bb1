// Compiled with -mavx2 on x86-64; dispatch guards ensure it only runs when
// the CPU reports AVX2.

#include "kernels_common.hpp"
#include "qfrac/kernels.hpp"

#if defined(__x86_64__) && defined(__AVX2__)

#include <immintrin.h>

namespace qfrac::kernels {
namespace {

static_assert(sizeof(Quaternion) == 4 * sizeof(double));

struct Avx2Traits {
    using V = __m256d;

    static V load(const Quaternion& q) { return _mm256_loadu_pd(&q.w0); }
    static Quaternion store(V x) {
        Quaternion q;
        _mm256_storeu_pd(&q.w0, x);
        return q;
    }
    static V zero() { return _mm256_setzero_pd(); }
    static V add(V a, V b) { return _mm256_add_pd(a, b); }
    static V mul(V a, V b) { return _mm256_mul_pd(a, b); }
    static V scale(V a, double s) { return _mm256_mul_pd(a, _mm256_set1_pd(s)); }
    template <int K>
    static V bcast(V a) {
        return _mm256_permute4x64_pd(a, K * 0b01010101);
    }
    static V flip(V x, double m0, double m1, double m2, double m3) {
        return _mm256_xor_pd(x, _mm256_set_pd(m3, m2, m1, m0));
    }
    static V sperm1(V b) {
        // lanes (b1, b0, b3, b2), signs (-,+,-,+)
        V p = _mm256_permute4x64_pd(b, 0b10110001);
        return flip(p, -0.0, 0.0, -0.0, 0.0);
    }
    static V sperm2(V b) {
        // lanes (b2, b3, b0, b1), signs (-,+,+,-)
        V p = _mm256_permute4x64_pd(b, 0b01001110);
        return flip(p, -0.0, 0.0, 0.0, -0.0);
    }
    static V sperm3(V b) {
        // lanes (b3, b2, b1, b0), signs (-,-,+,+)
        V p = _mm256_permute4x64_pd(b, 0b00011011);
        return flip(p, -0.0, -0.0, 0.0, 0.0);
    }
};

Quaternion ws(std::span<const Quaternion> v, std::span<const double> w) {
    return detail::weighted_sum_impl<Avx2Traits>(v, w);
}
Quaternion ps(std::span<const Quaternion> v) {
    return detail::pairwise_sum_impl<Avx2Traits>(v);
}
Quaternion sws(std::span<const Quaternion> a, const Quaternion& m,
               std::span<const Quaternion> b, std::span<const double> w) {
    return detail::sandwich_weighted_sum_impl<Avx2Traits>(a, m, b, w);
}

const Ops kAvx2Ops{ws, ps, sws};

}  // namespace

const Ops* avx2_ops() { return &kAvx2Ops; }

}  // namespace qfrac::kernels

#else

namespace qfrac::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace qfrac::kernels

#endif
