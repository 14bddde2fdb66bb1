#include <atomic>
#include <cstdlib>
#include <cstring>

#include "qfrac/kernels.hpp"

namespace qfrac::kernels {
namespace {

std::atomic<int> g_forced{-1};  // -1: not forced

Isa env_choice() {
    const char* e = std::getenv("QFRAC_SIMD");
    if (e != nullptr) {
        if (std::strcmp(e, "scalar") == 0) return Isa::scalar;
        if (std::strcmp(e, "avx2") == 0) return Isa::avx2;
    }
    return avx2_supported() && avx2_ops() != nullptr ? Isa::avx2 : Isa::scalar;
}

const Ops* ops_for(Isa isa) {
    if (isa == Isa::avx2 && avx2_ops() != nullptr && avx2_supported()) return avx2_ops();
    return scalar_ops();
}

const Ops* current() {
    const int forced = g_forced.load(std::memory_order_relaxed);
    if (forced >= 0) return ops_for(static_cast<Isa>(forced));
    static const Isa from_env = env_choice();
    return ops_for(from_env);
}

}  // namespace

bool avx2_supported() {
#if defined(__x86_64__)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

Isa active() {
    return current() == avx2_ops() ? Isa::avx2 : Isa::scalar;
}

void force(Isa isa) { g_forced.store(static_cast<int>(isa), std::memory_order_relaxed); }

const char* isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

Quaternion weighted_sum(std::span<const Quaternion> v, std::span<const double> w) {
    return current()->weighted_sum(v, w);
}

Quaternion pairwise_sum(std::span<const Quaternion> v) {
    return current()->pairwise_sum(v);
}

Quaternion sandwich_weighted_sum(std::span<const Quaternion> a, const Quaternion& m,
                                 std::span<const Quaternion> b,
                                 std::span<const double> w) {
    return current()->sandwich_weighted_sum(a, m, b, w);
}

}  // namespace qfrac::kernels
