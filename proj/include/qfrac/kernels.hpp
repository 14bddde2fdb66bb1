#pragma once

// Runtime-dispatched inner loops shared by the quadrature engines.
//
// Both ISA variants use the same pairwise reduction tree and the same
// per-element operation order, so results are bitwise identical across
// the scalar and AVX2 paths and independent of any parallel width.

#include <span>

#include "qfrac/quat.hpp"

namespace qfrac::kernels {

enum class Isa { scalar, avx2 };

bool avx2_supported();        // CPU capability at runtime
Isa active();                 // current selection (env QFRAC_SIMD=scalar|avx2|auto)
void force(Isa isa);          // override, mainly for tests
const char* isa_name(Isa isa);

// sum_i w[i] * v[i]
Quaternion weighted_sum(std::span<const Quaternion> v, std::span<const double> w);

// sum_i v[i]
Quaternion pairwise_sum(std::span<const Quaternion> v);

// sum_i w[i] * (a[i] * m * b[i])  with Hamilton products
Quaternion sandwich_weighted_sum(std::span<const Quaternion> a, const Quaternion& m,
                                 std::span<const Quaternion> b,
                                 std::span<const double> w);

struct Ops {
    Quaternion (*weighted_sum)(std::span<const Quaternion>, std::span<const double>);
    Quaternion (*pairwise_sum)(std::span<const Quaternion>);
    Quaternion (*sandwich_weighted_sum)(std::span<const Quaternion>, const Quaternion&,
                                        std::span<const Quaternion>,
                                        std::span<const double>);
};

const Ops* scalar_ops();
const Ops* avx2_ops();  // nullptr when not compiled for this target

}  // namespace qfrac::kernels
