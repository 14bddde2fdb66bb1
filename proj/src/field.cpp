#include "qfrac/field.hpp"

#include <cmath>
#include <stdexcept>

namespace qfrac::field {

Box4::Box4(const Vec4& lo_, const Vec4& hi_) : lo(lo_), hi(hi_) {
    for (int k = 0; k < 4; ++k)
        if (!(lo[static_cast<std::size_t>(k)] < hi[static_cast<std::size_t>(k)]))
            throw std::invalid_argument("Box4: edges must have positive length");
}

bool Box4::contains(const Vec4& x) const {
    for (std::size_t k = 0; k < 4; ++k)
        if (x[k] < lo[k] || x[k] > hi[k]) return false;
    return true;
}

Field4 Field4::from_callable(Box4 box, std::function<Quaternion(const Vec4&)> fn) {
    Field4 f;
    f.box_ = box;
    f.fn_ = std::move(fn);
    return f;
}

Field4 Field4::sample(Box4 box, const std::function<Quaternion(const Vec4&)>& fn,
                      const std::array<int, 4>& nodes_per_axis) {
    for (int n : nodes_per_axis)
        if (n < 9) throw std::invalid_argument("Field4::sample: need >= 9 nodes per axis");
    Field4 f;
    f.box_ = box;
    f.grid_ = true;
    f.nn_ = nodes_per_axis;
    const std::size_t total = static_cast<std::size_t>(nodes_per_axis[0]) * nodes_per_axis[1] *
                              nodes_per_axis[2] * nodes_per_axis[3];
    f.vals_.resize(total);
    std::size_t idx = 0;
    Vec4 x;
    for (int i0 = 0; i0 < nodes_per_axis[0]; ++i0) {
        x[0] = box.lo[0] + box.edge(0) * i0 / (nodes_per_axis[0] - 1);
        for (int i1 = 0; i1 < nodes_per_axis[1]; ++i1) {
            x[1] = box.lo[1] + box.edge(1) * i1 / (nodes_per_axis[1] - 1);
            for (int i2 = 0; i2 < nodes_per_axis[2]; ++i2) {
                x[2] = box.lo[2] + box.edge(2) * i2 / (nodes_per_axis[2] - 1);
                for (int i3 = 0; i3 < nodes_per_axis[3]; ++i3, ++idx) {
                    x[3] = box.lo[3] + box.edge(3) * i3 / (nodes_per_axis[3] - 1);
                    f.vals_[idx] = fn(x);
                }
            }
        }
    }
    return f;
}

Quaternion Field4::eval(const Vec4& x) const {
    if (!grid_) return fn_(x);

    // multilinear interpolation over the 16 surrounding grid corners
    int base[4];
    double frac[4];
    for (int k = 0; k < 4; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const double s = (x[ks] - box_.lo[ks]) / box_.edge(k) * (nn_[ks] - 1);
        int i = static_cast<int>(std::floor(s));
        i = std::max(0, std::min(i, nn_[ks] - 2));
        base[k] = i;
        frac[k] = std::min(1.0, std::max(0.0, s - i));
    }
    const std::size_t s3 = 1;
    const std::size_t s2 = static_cast<std::size_t>(nn_[3]);
    const std::size_t s1 = s2 * static_cast<std::size_t>(nn_[2]);
    const std::size_t s0 = s1 * static_cast<std::size_t>(nn_[1]);
    Quaternion out;
    for (int corner = 0; corner < 16; ++corner) {
        double wgt = 1.0;
        std::size_t idx = 0;
        const std::size_t strides[4] = {s0, s1, s2, s3};
        for (int k = 0; k < 4; ++k) {
            const int bit = (corner >> k) & 1;
            wgt *= bit != 0 ? frac[k] : 1.0 - frac[k];
            idx += strides[k] * static_cast<std::size_t>(base[k] + bit);
        }
        out += vals_[idx] * wgt;
    }
    return out;
}

FracVectorParams::FracVectorParams(const std::array<double, 4>& alpha_,
                                   const std::array<double, 4>& sigma_,
                                   const Quaternion& sq)
    : alpha(alpha_), sigma(sigma_), sigma_quat(sq) {
    for (double a : alpha)
        if (!(a > 0.0 && a < 1.0))
            throw std::invalid_argument("FracVectorParams: alpha_k must lie in (0,1)");
    for (double s : sigma)
        if (!(s > 0.0 && s <= 1.0))
            throw std::invalid_argument("FracVectorParams: sigma_k must lie in (0,1]");
    if (sigma_quat.norm_sq() == 0.0)
        throw std::invalid_argument("FracVectorParams: sigma_quat must be invertible");
}

Quaternion FracVectorParams::coupled_quat(const StructuralSet& psi,
                                          const std::array<double, 4>& sigma) {
    Quaternion out;
    for (std::size_t k = 0; k < 4; ++k) out += psi.psi[k] * sigma[k];
    return out;
}

PhiOnBox PhiOnBox::linear(const Vec4& slopes, double constant) {
    PhiOnBox p;
    p.family = Family::linear;
    p.slopes = slopes;
    p.value = [slopes, constant](const Vec4& x) {
        return constant + slopes[0] * x[0] + slopes[1] * x[1] + slopes[2] * x[2] +
               slopes[3] * x[3];
    };
    p.partial = [slopes](const Vec4&, int k) { return slopes[static_cast<std::size_t>(k)]; };
    return p;
}

PhiOnBox PhiOnBox::axis_weight(int axis, frac1d::WeightFunction w1d,
                               const Vec4& other_slopes) {
    PhiOnBox p;
    p.family = Family::single_axis;
    p.nl_axis = axis;
    p.nl_weight = w1d;
    p.slopes = other_slopes;
    p.slopes[static_cast<std::size_t>(axis)] = 0.0;
    const Vec4 slopes = p.slopes;
    p.value = [axis, w1d, slopes](const Vec4& x) {
        double v = w1d.phi(x[static_cast<std::size_t>(axis)]);
        for (std::size_t j = 0; j < 4; ++j)
            if (static_cast<int>(j) != axis) v += slopes[j] * x[j];
        return v;
    };
    p.partial = [axis, w1d, slopes](const Vec4& x, int k) {
        if (k == axis) return w1d.phi_prime(x[static_cast<std::size_t>(axis)]);
        return slopes[static_cast<std::size_t>(k)];
    };
    return p;
}

frac1d::WeightFunction PhiOnBox::slice(int i, const Vec4& q) const {
    auto val = value;
    auto par = partial;
    return frac1d::WeightFunction::custom(
        [val, q, i](double t) {
            Vec4 p = q;
            p[static_cast<std::size_t>(i)] = t;
            return val(p);
        },
        [par, q, i](double t) {
            Vec4 p = q;
            p[static_cast<std::size_t>(i)] = t;
            return par(p, i);
        });
}

double PhiOnBox::sum_slice_deriv(const Vec4& x, const Vec4& q) const {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) {
        Vec4 p = q;
        p[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)];
        s += partial(p, k);
    }
    return s;
}

Quaternion partial_fd(const Field4& F, int k, const Vec4& x, double h) {
    if (!F.box().contains(x)) throw std::domain_error("partial_fd: x outside box");
    const auto ks = static_cast<std::size_t>(k);
    const double lo = F.box().lo[ks], hi = F.box().hi[ks];
    auto at = [&](double t) {
        Vec4 p = x;
        p[ks] = t;
        return F.eval(p);
    };
    const double t = x[ks];
    if (t - h >= lo && t + h <= hi) return (at(t + h) - at(t - h)) / (2.0 * h);
    if (t + 2.0 * h <= hi)
        return (at(t) * -3.0 + at(t + h) * 4.0 - at(t + 2.0 * h)) / (2.0 * h);
    return (at(t) * 3.0 - at(t - h) * 4.0 + at(t - 2.0 * h)) / (2.0 * h);
}

Quaternion fueter(const Field4& F, const StructuralSet& psi, frac1d::Side side,
                  const Vec4& x, double rel_h) {
    Quaternion out;
    for (int k = 0; k < 4; ++k) {
        const double h = rel_h * F.box().edge(k);
        const Quaternion dk = partial_fd(F, k, x, h);
        out += side == frac1d::Side::left ? psi.psi[static_cast<std::size_t>(k)] * dk
                                          : dk * psi.psi[static_cast<std::size_t>(k)];
    }
    return out;
}

Quaternion quat_prop_d(const Field4& F, const StructuralSet& psi,
                       const Quaternion& sigma_quat, const PhiOnBox* phi,
                       const Vec4& q, frac1d::Side side, const Vec4& x, double rel_h) {
    const Quaternion fx = F.eval(x);
    Quaternion df = fueter(F, psi, side, x, rel_h);
    if (phi != nullptr) {
        const double s = phi->sum_slice_deriv(x, q);
        if (!(s > 0.0))
            throw std::domain_error("quat_prop_d: sum of phi slice derivatives not positive");
        df = df / s;
    }
    const Quaternion om = Quaternion::one() - sigma_quat;
    if (side == frac1d::Side::left) return om * fx + sigma_quat * df;
    return fx * om + df * sigma_quat;
}

Quaternion coord_frac_integral(const Field4& F, const FracVectorParams& p,
                               const PhiOnBox* phi, frac1d::Side side, const Vec4& q,
                               const Vec4& x, const frac1d::Mesh1D& mesh,
                               const Box4& J) {
    if (!J.contains(q)) throw std::domain_error("coord_frac_integral: q outside box");
    if (!J.contains(x)) throw std::domain_error("coord_frac_integral: x outside box");
    Quaternion out;
    for (int i = 0; i < 4; ++i) {
        const auto is = static_cast<std::size_t>(i);
        frac1d::Function1D slice;
        slice.a = J.lo[is];
        slice.b = J.hi[is];
        slice.eval = [&F, &q, i](double t) {
            Vec4 pt = q;
            pt[static_cast<std::size_t>(i)] = t;
            return F.eval(pt);
        };
        const double bound = side == frac1d::Side::left ? J.lo[is] : J.hi[is];
        const frac1d::FracAxisParams ap(p.alpha[is], p.sigma[is], side, bound);
        const auto w = phi != nullptr ? phi->slice(i, q) : frac1d::WeightFunction::identity();
        out += prop_frac_integral(slice, ap, w, x[is], mesh);
    }
    return out;
}

}  // namespace qfrac::field
