#include "qfrac/geom.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include "qfrac/kernels.hpp"

namespace qfrac::geom {

namespace {

void parallel_fill(std::size_t n, int width, const std::function<void(std::size_t)>& work) {
    if (width <= 1 || n < 64) {
        for (std::size_t i = 0; i < n; ++i) work(i);
        return;
    }
    const auto uw = static_cast<std::size_t>(width);
    const std::size_t chunk = (n + uw - 1) / uw;
    std::vector<std::thread> threads;
    threads.reserve(uw);
    for (std::size_t t = 0; t < uw; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        threads.emplace_back([lo, hi, &work] {
            for (std::size_t i = lo; i < hi; ++i) work(i);
        });
    }
    for (auto& th : threads) th.join();
}

}  // namespace

std::array<Face3, 8> faces_of(const Box4& box) {
    std::array<Face3, 8> out;
    std::size_t idx = 0;
    for (int axis = 0; axis < 4; ++axis) {
        for (int high = 0; high < 2; ++high) {
            Face3 f;
            f.axis = axis;
            f.high = high != 0;
            f.coord = high != 0 ? box.hi[static_cast<std::size_t>(axis)]
                                : box.lo[static_cast<std::size_t>(axis)];
            int j = 0;
            for (int k = 0; k < 4; ++k)
                if (k != axis) f.free_axes[static_cast<std::size_t>(j++)] = k;
            out[idx++] = f;
        }
    }
    return out;
}

QuadratureSpec::QuadratureSpec(int face_n_, int vol_n_, SingularPolicy policy_)
    : face_n(face_n_), vol_n(vol_n_), policy(policy_) {
    if (face_n < 8 || vol_n < 8)
        throw std::invalid_argument("QuadratureSpec: need >= 8 nodes per axis");
}

Quaternion cauchy_kernel(const StructuralSet& psi, const Vec4& y, const Vec4& x) {
    const Vec4 u{y[0] - x[0], y[1] - x[1], y[2] - x[2], y[3] - x[3]};
    const double n2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2] + u[3] * u[3];
    if (n2 == 0.0) throw std::domain_error("cauchy_kernel: y == x");
    constexpr double two_pi_sq = 2.0 * std::numbers::pi * std::numbers::pi;
    return from_coords(u, psi).conj() / (two_pi_sq * n2 * n2);
}

Quaternion nu_face_weight(const StructuralSet& psi, const Face3& face) {
    const Quaternion p = psi.psi[static_cast<std::size_t>(face.axis)];
    return face.high ? p : -p;
}

Quaternion boundary_integral(const Box4& omega, const FieldFn& g, const FieldFn& f,
                             const StructuralSet& psi, const QuadratureSpec& spec,
                             const std::function<double(const Vec4&)>* weight) {
    const int n = spec.face_n;
    const auto un = static_cast<std::size_t>(n);
    const std::size_t per_face = un * un * un;
    std::vector<Quaternion> gv(per_face), fv(per_face);
    std::vector<double> wv(per_face);

    Quaternion total;
    for (const Face3& face : faces_of(omega)) {
        const auto& fa = face.free_axes;
        double h[3], lo[3];
        double ds = 1.0;
        for (int j = 0; j < 3; ++j) {
            const auto a = static_cast<std::size_t>(fa[static_cast<std::size_t>(j)]);
            h[j] = omega.edge(static_cast<int>(a)) / n;
            lo[j] = omega.lo[a];
            ds *= h[j];
        }
        auto node_at = [&](std::size_t idx) {
            Vec4 y;
            y[static_cast<std::size_t>(face.axis)] = face.coord;
            const std::size_t i0 = idx / (un * un);
            const std::size_t i1 = (idx / un) % un;
            const std::size_t i2 = idx % un;
            y[static_cast<std::size_t>(fa[0])] = lo[0] + (static_cast<double>(i0) + 0.5) * h[0];
            y[static_cast<std::size_t>(fa[1])] = lo[1] + (static_cast<double>(i1) + 0.5) * h[1];
            y[static_cast<std::size_t>(fa[2])] = lo[2] + (static_cast<double>(i2) + 0.5) * h[2];
            return y;
        };
        parallel_fill(per_face, spec.parallel_width, [&](std::size_t idx) {
            const Vec4 y = node_at(idx);
            gv[idx] = g(y);
            fv[idx] = f(y);
            wv[idx] = weight != nullptr ? (*weight)(y) * ds : ds;
        });
        const Quaternion nu = nu_face_weight(psi, face);
        total += kernels::sandwich_weighted_sum(gv, nu, fv, wv);
    }
    return total;
}

Quaternion volume_integral(const Box4& omega, const FieldFn& integrand,
                           const QuadratureSpec& spec, const SingularHandling* singular,
                           Warnings* w) {
    const int n = spec.vol_n;
    const auto un = static_cast<std::size_t>(n);
    const std::size_t total_nodes = un * un * un * un;
    double h[4];
    double dv = 1.0;
    for (int k = 0; k < 4; ++k) {
        h[k] = omega.edge(k) / n;
        dv *= h[k];
    }

    std::ptrdiff_t skip = -1;
    Vec4 cell_lo{}, cell_hi{};
    if (singular != nullptr) {
        if (omega.contains(singular->point)) {
            std::size_t idx = 0;
            for (int k = 0; k < 4; ++k) {
                const auto ks = static_cast<std::size_t>(k);
                int i = static_cast<int>((singular->point[ks] - omega.lo[ks]) / h[k]);
                i = std::max(0, std::min(i, n - 1));
                idx = idx * un + static_cast<std::size_t>(i);
                cell_lo[ks] = omega.lo[ks] + i * h[k];
                cell_hi[ks] = cell_lo[ks] + h[k];
            }
            skip = static_cast<std::ptrdiff_t>(idx);
            if (w != nullptr) w->singular_cell = true;
        } else if (w != nullptr) {
            w->singular_point_ignored = true;
        }
    }

    std::vector<Quaternion> vals(total_nodes);
    parallel_fill(total_nodes, spec.parallel_width, [&](std::size_t idx) {
        if (static_cast<std::ptrdiff_t>(idx) == skip) {
            vals[idx] = Quaternion::zero();
            return;
        }
        Vec4 y;
        std::size_t rem = idx;
        for (int k = 3; k >= 0; --k) {
            const auto ks = static_cast<std::size_t>(k);
            const std::size_t i = rem % un;
            rem /= un;
            y[ks] = omega.lo[ks] + (static_cast<double>(i) + 0.5) * h[k];
        }
        vals[idx] = integrand(y);
    });

    Quaternion out = kernels::pairwise_sum(vals) * dv;
    if (skip >= 0 && spec.policy == SingularPolicy::exclude_with_shell &&
        singular->estimate) {
        out += singular->estimate(cell_lo, cell_hi);
    }
    return out;
}

Quaternion cell_kernel_integral(const StructuralSet& psi, const Vec4& x, const Vec4& lo,
                                const Vec4& hi, int levels) {
    if (levels <= 0) return {};
    constexpr int kSub = 3;
    Quaternion out;
    // which subcell holds x
    int hot[4];
    double h[4];
    for (int k = 0; k < 4; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        h[k] = (hi[ks] - lo[ks]) / kSub;
        int i = static_cast<int>((x[ks] - lo[ks]) / h[k]);
        hot[k] = std::max(0, std::min(i, kSub - 1));
    }
    const double subvol = h[0] * h[1] * h[2] * h[3];
    for (int i0 = 0; i0 < kSub; ++i0)
        for (int i1 = 0; i1 < kSub; ++i1)
            for (int i2 = 0; i2 < kSub; ++i2)
                for (int i3 = 0; i3 < kSub; ++i3) {
                    const int ii[4] = {i0, i1, i2, i3};
                    Vec4 slo, shi, c;
                    for (int k = 0; k < 4; ++k) {
                        const auto ks = static_cast<std::size_t>(k);
                        slo[ks] = lo[ks] + ii[k] * h[k];
                        shi[ks] = slo[ks] + h[k];
                        c[ks] = slo[ks] + 0.5 * h[k];
                    }
                    if (ii[0] == hot[0] && ii[1] == hot[1] && ii[2] == hot[2] &&
                        ii[3] == hot[3]) {
                        out += cell_kernel_integral(psi, x, slo, shi, levels - 1);
                    } else {
                        out += cauchy_kernel(psi, c, x) * subvol;
                    }
                }
    return out;
}

StokesReport stokes_classical(const Field4& f, const Field4& g, const Box4& omega,
                              const StructuralSet& psi, const QuadratureSpec& spec) {
    StokesReport rep;
    FieldFn gf = [&g](const Vec4& y) { return g.eval(y); };
    FieldFn ff = [&f](const Vec4& y) { return f.eval(y); };
    rep.lhs = boundary_integral(omega, gf, ff, psi, spec);

    const double rel = spec.fd_rel;
    FieldFn vol = [&](const Vec4& y) {
        return g.eval(y) * fueter(f, psi, frac1d::Side::left, y, rel) +
               fueter(g, psi, frac1d::Side::right, y, rel) * f.eval(y);
    };
    rep.rhs = volume_integral(omega, vol, spec);
    rep.residual_abs = (rep.lhs - rep.rhs).norm();
    rep.residual_rel =
        rep.residual_abs / std::max({1.0, rep.lhs.norm(), rep.rhs.norm()});
    return rep;
}

BpReport bp_classical(const Field4& f, const Field4& g, const Box4& omega,
                      const StructuralSet& psi, const Vec4& x,
                      const QuadratureSpec& spec) {
    BpReport rep;
    rep.interior = omega.contains(x);

    // accuracy warning within one cell of the boundary
    double min_gap = 1e300;
    for (int k = 0; k < 4; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        min_gap = std::min(min_gap, std::abs(x[ks] - omega.lo[ks]));
        min_gap = std::min(min_gap, std::abs(omega.hi[ks] - x[ks]));
    }
    for (int k = 0; k < 4; ++k)
        if (min_gap < omega.edge(k) / spec.vol_n) rep.warn.near_boundary = true;

    FieldFn kx = [&psi, x](const Vec4& y) { return cauchy_kernel(psi, y, x); };
    FieldFn ff = [&f](const Vec4& y) { return f.eval(y); };
    FieldFn gf = [&g](const Vec4& y) { return g.eval(y); };
    const Quaternion bd = boundary_integral(omega, kx, ff, psi, spec) +
                          boundary_integral(omega, gf, kx, psi, spec);

    const double rel = spec.fd_rel;
    FieldFn vol = [&](const Vec4& y) {
        const Quaternion k = cauchy_kernel(psi, y, x);
        return k * fueter(f, psi, frac1d::Side::left, y, rel) +
               fueter(g, psi, frac1d::Side::right, y, rel) * k;
    };
    SingularHandling sing;
    sing.point = x;
    sing.estimate = [&](const Vec4& lo, const Vec4& hi) {
        Vec4 c;
        for (std::size_t k = 0; k < 4; ++k) c[k] = 0.5 * (lo[k] + hi[k]);
        const Quaternion s = cell_kernel_integral(psi, x, lo, hi);
        return s * fueter(f, psi, frac1d::Side::left, c, rel) +
               fueter(g, psi, frac1d::Side::right, c, rel) * s;
    };
    const Quaternion vo = volume_integral(omega, vol, spec, &sing, &rep.warn);

    rep.recon = bd - vo;
    rep.target = rep.interior ? f.eval(x) + g.eval(x) : Quaternion::zero();
    rep.residual_abs = (rep.recon - rep.target).norm();
    rep.residual_rel = rep.residual_abs / std::max(1.0, rep.target.norm());
    return rep;
}

}  // namespace qfrac::geom
