#include "qfrac/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>

#include "qfrac/kernels.hpp"

namespace qfrac::verify {

using fueter::MultSide;
using fueter::OperatorSpec;
using fueter::WeightProfile;
using frac1d::FracAxisParams;
using frac1d::Function1D;
using frac1d::Sense;
using frac1d::Side;
using frac1d::WeightFunction;

namespace {

double rel_of(double abs_resid, double scale) {
    return abs_resid / std::max(1.0, scale);
}

std::string grid_label(const Scenario& s, bool mesh_only) {
    if (mesh_only) return "n=" + std::to_string(s.mesh.n);
    return "face=" + std::to_string(s.quad.face_n) + ";vol=" + std::to_string(s.quad.vol_n) +
           ";n=" + std::to_string(s.mesh.n);
}

Function1D axis_slice(const Field4& F, int axis, const Vec4& q, const Box4& J) {
    Function1D out;
    const auto a = static_cast<std::size_t>(axis);
    out.a = J.lo[a];
    out.b = J.hi[a];
    out.eval = [&F, q, axis](double t) {
        Vec4 p = q;
        p[static_cast<std::size_t>(axis)] = t;
        return F.eval(p);
    };
    return out;
}

WeightFunction axis_weight(const std::optional<PhiOnBox>& phi, int axis, const Vec4& q) {
    return phi.has_value() ? phi->slice(axis, q) : WeightFunction::identity();
}

Function1D const_one(double a, double b) {
    Function1D one;
    one.a = a;
    one.b = b;
    one.eval = [](double) { return Quaternion::one(); };
    one.deriv = [](double) { return Quaternion::zero(); };
    return one;
}

OperatorSpec f_side_spec(const Scenario& s, bool with_phi) {
    OperatorSpec spec;
    spec.sense = Sense::riemann_liouville;
    spec.int_side = Side::left;
    spec.mult_side = MultSide::left;
    spec.params = s.f_params;
    spec.phi = with_phi && s.phi.has_value() ? &*s.phi : nullptr;
    return spec;
}

OperatorSpec g_side_spec(const Scenario& s, bool with_phi) {
    OperatorSpec spec;
    spec.sense = Sense::riemann_liouville;
    spec.int_side = Side::right;
    spec.mult_side = MultSide::right;
    spec.params = s.g_params;
    spec.phi = with_phi && s.theta.has_value() ? &*s.theta : nullptr;
    return spec;
}

std::vector<Vec4> eval_points(const Scenario& s) {
    if (!s.interior_points.empty()) return s.interior_points;
    Vec4 mid;
    for (std::size_t k = 0; k < 4; ++k) mid[k] = 0.5 * (s.omega.lo[k] + s.omega.hi[k]);
    return {mid};
}

FracVectorParams flipped_orders(const FracVectorParams& p) {
    FracVectorParams out = p;
    for (std::size_t k = 0; k < 4; ++k) out.alpha[k] = 1.0 - out.alpha[k];
    return out;
}

}  // namespace

void VerificationReport::finish(const Scenario& s) {
    tier = s.tier;
    tolerance = s.tolerance;
    passed = skipped || residual_rel <= tolerance;
}

VerificationReport verify_fundamental(const Scenario& s) {
    VerificationReport rep;
    rep.identity_id = "fundamental";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, true);

    const int axis = s.axis;
    const auto a = static_cast<std::size_t>(axis);
    const Vec4 q = s.q;
    const auto fsl = axis_slice(s.f, axis, q, s.J);
    const auto w = axis_weight(s.phi, axis, q);
    const double alpha = s.f_params.alpha[a];
    const double sigma = s.f_params.sigma[a];

    Warnings warn;
    double sup = 0.0, fscale = 0.0;
    const double lo = s.J.lo[a], hi = s.J.hi[a];
    for (const double fr : {0.3, 0.45, 0.6, 0.75, 0.85}) {
        const double t = lo + fr * (hi - lo);
        fscale = std::max(fscale, fsl.eval(t).norm());
        for (const Side side : {Side::left, Side::right}) {
            const double bound = side == Side::left ? lo : hi;
            const FracAxisParams p(alpha, sigma, side, bound);
            // the composed operator D I f; the shared mesh caches the inner
            // integral values once per difference target
            const Quaternion back = frac1d::prop_frac_deriv_shared_mesh(
                [&](double tt) { return prop_frac_integral(fsl, p, w, tt, s.mesh); }, p,
                w, t, s.mesh, &warn);
            const Quaternion diff = back - fsl.eval(t);
            if (side == Side::left) {
                rep.lhs = back;
                rep.rhs = fsl.eval(t);
            }
            sup = std::max(sup, diff.norm());
        }
    }
    rep.residual_abs = sup;
    rep.residual_rel = sup / std::max(1e-300, fscale);
    rep.warnings = warn.labels();
    rep.finish(s);
    return rep;
}

VerificationReport verify_semigroup(const Scenario& s) {
    VerificationReport rep;
    rep.identity_id = "semigroup";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, true);

    const int axis = s.axis;
    const auto a = static_cast<std::size_t>(axis);
    const Vec4 q = s.q;
    const auto fsl = axis_slice(s.f, axis, q, s.J);
    const auto w = axis_weight(s.phi, axis, q);
    const double sigma = s.f_params.sigma[a];
    const double lo = s.J.lo[a], hi = s.J.hi[a];

    double sup = 0.0;
    for (const auto [oa, ob] : {std::pair{0.3, 0.4}, std::pair{0.25, 0.5}}) {
        const FracAxisParams pa(oa, sigma, Side::left, lo);
        const FracAxisParams pb(ob, sigma, Side::left, lo);
        const FracAxisParams pab(oa + ob, sigma, Side::left, lo);
        Function1D inner;
        inner.a = lo;
        inner.b = hi;
        inner.eval = [&](double tt) { return prop_frac_integral(fsl, pb, w, tt, s.mesh); };
        for (const double fr : {0.5, 0.8}) {
            const double t = lo + fr * (hi - lo);
            const Quaternion nested = prop_frac_integral(inner, pa, w, t, s.mesh);
            const Quaternion direct = prop_frac_integral(fsl, pab, w, t, s.mesh);
            rep.lhs = nested;
            rep.rhs = direct;
            sup = std::max(sup, (nested - direct).norm() / std::max(1e-300, direct.norm()));
        }
    }
    rep.residual_abs = sup;
    rep.residual_rel = sup;
    rep.finish(s);
    return rep;
}

VerificationReport verify_conjugation(const Scenario& s) {
    VerificationReport rep;
    rep.identity_id = "conjugation";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, true);

    Warnings warn;
    double sup = 0.0;
    try {
        for (const Vec4& x : eval_points(s)) {
            const Vec4 q = s.base_point(x);
            {
                const OperatorSpec spec = f_side_spec(s, s.phi.has_value());
                sup = std::max(sup, fueter::conjugation_residual(s.f, s.psi, spec, q, x,
                                                                 s.mesh, s.J, &warn));
            }
            {
                // the right-multiplied a-side pairing with the g-side proportions
                OperatorSpec spec = g_side_spec(s, false);
                spec.int_side = Side::left;
                spec.phi = s.phi.has_value() ? &*s.phi : nullptr;
                sup = std::max(sup, fueter::conjugation_residual(s.f, s.psi, spec, q, x,
                                                                 s.mesh, s.J, &warn));
            }
        }
    } catch (const fueter::UnsupportedScenario& e) {
        rep.skipped = true;
        rep.skip_reason = e.what();
        rep.finish(s);
        return rep;
    }
    rep.residual_abs = sup;
    rep.residual_rel = sup;
    rep.warnings = warn.labels();
    rep.finish(s);
    return rep;
}

VerificationReport verify_classical_stokes(const Scenario& s) {
    VerificationReport rep;
    rep.identity_id = "classical_stokes";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, false);
    const auto sr = geom::stokes_classical(s.f, s.g, s.omega, s.psi, s.quad);
    rep.lhs = sr.lhs;
    rep.rhs = sr.rhs;
    rep.residual_abs = sr.residual_abs;
    rep.residual_rel = sr.residual_rel;
    rep.finish(s);
    return rep;
}

VerificationReport verify_classical_bp(const Scenario& s) {
    VerificationReport rep;
    rep.identity_id = "classical_bp";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, false);
    Warnings warn;
    double sup_abs = 0.0, sup_rel = 0.0;
    auto run_point = [&](const Vec4& x) {
        const auto br = geom::bp_classical(s.f, s.g, s.omega, s.psi, x, s.quad);
        warn.merge(br.warn);
        sup_abs = std::max(sup_abs, br.residual_abs);
        sup_rel = std::max(sup_rel, br.residual_rel);
        rep.lhs = br.recon;
        rep.rhs = br.target;
    };
    for (const Vec4& x : eval_points(s)) run_point(x);
    for (const Vec4& x : s.exterior_points) run_point(x);
    rep.residual_abs = sup_abs;
    rep.residual_rel = sup_rel;
    rep.warnings = warn.labels();
    rep.finish(s);
    return rep;
}

VerificationReport verify_frac_stokes(const Scenario& s, bool with_phi) {
    VerificationReport rep;
    rep.identity_id = "frac_stokes";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, false);

    const Vec4 q = s.q;
    WeightProfile lam, mu;
    if (with_phi) {
        if (!s.phi.has_value() || !s.theta.has_value()) {
            rep.skipped = true;
            rep.skip_reason = "weighted variant needs both phi and theta";
            rep.finish(s);
            return rep;
        }
        lam = fueter::lambda_profile(*s.phi, s.f_params.sigma_quat, s.psi, q);
        mu = fueter::lambda_profile(*s.theta, s.g_params.sigma_quat, s.psi, q);
        if (!lam.exists || !mu.exists) {
            rep.skipped = true;
            rep.skip_reason = !lam.exists
                                  ? "lambda profile does not exist: " + lam.reason
                                  : "mu profile does not exist: " + mu.reason;
            rep.finish(s);
            return rep;
        }
    } else {
        lam = WeightProfile::linear_rate(fueter::delta_of(s.f_params.sigma_quat), s.psi);
        mu = WeightProfile::linear_rate(fueter::delta_of(s.g_params.sigma_quat), s.psi);
    }

    const OperatorSpec fspec = f_side_spec(s, with_phi);
    const OperatorSpec gspec = g_side_spec(s, with_phi);
    const FracVectorParams fip = flipped_orders(s.f_params);
    const FracVectorParams gip = flipped_orders(s.g_params);
    const PhiOnBox* fphi = fspec.phi;
    const PhiOnBox* gphi = gspec.phi;

    auto Gf = [&](const Vec4& y) {
        return coord_frac_integral(s.f, fip, fphi, Side::left, q, y, s.mesh, s.J);
    };
    auto Gg = [&](const Vec4& y) {
        return coord_frac_integral(s.g, gip, gphi, Side::right, q, y, s.mesh, s.J);
    };

    std::function<double(const Vec4&)> weight = [&](const Vec4& y) {
        return std::exp(lam.sum_at(y) + mu.sum_at(y));
    };
    const Quaternion lhs = geom::boundary_integral(s.omega, Gg, Gf, s.psi, s.quad, &weight);

    Warnings warn;
    const Quaternion sinv = s.f_params.sigma_quat.inverse();
    const Quaternion rinv = s.g_params.sigma_quat.inverse();
    geom::FieldFn vol = [&](const Vec4& y) {
        const Quaternion df =
            fueter::frac_fueter(s.f, s.psi, fspec, q, y, s.mesh, s.J, &warn);
        const Quaternion dg =
            fueter::frac_fueter(s.g, s.psi, gspec, q, y, s.mesh, s.J, &warn);
        const double w1 = with_phi ? s.phi->sum_slice_deriv(y, q) : 1.0;
        const double w2 = with_phi ? s.theta->sum_slice_deriv(y, q) : 1.0;
        const Quaternion t1 = (Gg(y) * (sinv * df)) * w1;
        const Quaternion t2 = ((dg * rinv) * Gf(y)) * w2;
        return (t1 + t2) * weight(y);
    };
    const Quaternion rhs = geom::volume_integral(s.omega, vol, s.quad);

    rep.lhs = lhs;
    rep.rhs = rhs;
    rep.residual_abs = (lhs - rhs).norm();
    rep.residual_rel = rep.residual_abs / std::max({1.0, lhs.norm(), rhs.norm()});
    rep.warnings = warn.labels();
    rep.finish(s);
    return rep;
}

// ---------------------------------------------------------------------------
// fractional Borel-Pompeiu assembly

FracBpAssembler::FracBpAssembler(const Scenario& s, bool with_phi, const Vec4& q)
    : s_(s), with_phi_(with_phi), q_(q) {
    if (with_phi_) {
        if (!s.phi.has_value()) {
            skipped_ = true;
            reason_ = "weighted variant needs phi";
            return;
        }
        lam_ = fueter::lambda_profile(*s.phi, s.f_params.sigma_quat, s.psi, q_);
        mu_ = s.theta.has_value()
                  ? fueter::lambda_profile(*s.theta, s.g_params.sigma_quat, s.psi, q_)
                  : WeightProfile::linear_rate(fueter::delta_of(s.g_params.sigma_quat),
                                               s.psi);
        if (!lam_.exists || !mu_.exists) {
            skipped_ = true;
            reason_ = !lam_.exists ? "lambda profile does not exist: " + lam_.reason
                                   : "mu profile does not exist: " + mu_.reason;
            return;
        }
    } else {
        lam_ = WeightProfile::linear_rate(fueter::delta_of(s.f_params.sigma_quat), s.psi);
        mu_ = WeightProfile::linear_rate(fueter::delta_of(s.g_params.sigma_quat), s.psi);
    }

    const OperatorSpec fspec = f_side_spec(s, with_phi_);
    const OperatorSpec gspec = g_side_spec(s, with_phi_);
    const Quaternion sinv = s.f_params.sigma_quat.inverse();
    const Quaternion rinv = s.g_params.sigma_quat.inverse();

    // volume caches: midpoint nodes and the weighted derivative factors
    const int n = s.quad.vol_n;
    const auto un = static_cast<std::size_t>(n);
    const std::size_t total = un * un * un * un;
    vol_nodes_.resize(total);
    mf_.resize(total);
    mg_.resize(total);
    double h[4];
    cell_vol_ = 1.0;
    for (int k = 0; k < 4; ++k) {
        h[k] = s.omega.edge(k) / n;
        cell_vol_ *= h[k];
    }
    for (std::size_t idx = 0; idx < total; ++idx) {
        Vec4 y;
        std::size_t rem = idx;
        for (int k = 3; k >= 0; --k) {
            const auto ks = static_cast<std::size_t>(k);
            y[ks] = s.omega.lo[ks] + (static_cast<double>(rem % un) + 0.5) * h[k];
            rem /= un;
        }
        vol_nodes_[idx] = y;
    }
    const int width = std::max(1, s.quad.parallel_width);
    auto fill_chunk = [&](std::size_t lo, std::size_t hi_) {
        Warnings scratch;
        for (std::size_t i = lo; i < hi_; ++i) {
            const Vec4& y = vol_nodes_[i];
            const Quaternion df =
                fueter::frac_fueter(s_.f, s_.psi, fspec, q_, y, s_.mesh, s_.J, &scratch);
            const Quaternion dg =
                fueter::frac_fueter(s_.g, s_.psi, gspec, q_, y, s_.mesh, s_.J, &scratch);
            const double w1 = with_phi_ ? s_.phi->sum_slice_deriv(y, q_) : 1.0;
            const double w2 = with_phi_ && s_.theta.has_value()
                                  ? s_.theta->sum_slice_deriv(y, q_)
                                  : 1.0;
            mf_[i] = (sinv * df) * w1;
            mg_[i] = (dg * rinv) * w2;
        }
    };
    if (width <= 1) {
        fill_chunk(0, total);
    } else {
        std::vector<std::thread> threads;
        const std::size_t chunk =
            (total + static_cast<std::size_t>(width) - 1) / static_cast<std::size_t>(width);
        for (int t = 0; t < width; ++t) {
            const std::size_t lo = static_cast<std::size_t>(t) * chunk;
            const std::size_t hi_ = std::min(total, lo + chunk);
            if (lo >= hi_) break;
            threads.emplace_back(fill_chunk, lo, hi_);
        }
        for (auto& th : threads) th.join();
    }

    // face caches
    const FracVectorParams fip = flipped_orders(s.f_params);
    const FracVectorParams gip = flipped_orders(s.g_params);
    const PhiOnBox* fphi = fspec.phi;
    const PhiOnBox* gphi = gspec.phi;
    const int fn = s.quad.face_n;
    const auto ufn = static_cast<std::size_t>(fn);
    for (const auto& face : geom::faces_of(s.omega)) {
        const Quaternion nu = geom::nu_face_weight(s.psi, face);
        double fh[3], flo[3];
        double ds = 1.0;
        for (int j = 0; j < 3; ++j) {
            const int ax = face.free_axes[static_cast<std::size_t>(j)];
            fh[j] = s.omega.edge(ax) / fn;
            flo[j] = s.omega.lo[static_cast<std::size_t>(ax)];
            ds *= fh[j];
        }
        for (std::size_t i0 = 0; i0 < ufn; ++i0)
            for (std::size_t i1 = 0; i1 < ufn; ++i1)
                for (std::size_t i2 = 0; i2 < ufn; ++i2) {
                    Vec4 y;
                    y[static_cast<std::size_t>(face.axis)] = face.coord;
                    y[static_cast<std::size_t>(face.free_axes[0])] =
                        flo[0] + (static_cast<double>(i0) + 0.5) * fh[0];
                    y[static_cast<std::size_t>(face.free_axes[1])] =
                        flo[1] + (static_cast<double>(i1) + 0.5) * fh[1];
                    y[static_cast<std::size_t>(face.free_axes[2])] =
                        flo[2] + (static_cast<double>(i2) + 0.5) * fh[2];
                    face_nodes_.push_back(y);
                    face_ds_.push_back(ds);
                    face_nu_.push_back(nu);
                    const Quaternion gf = coord_frac_integral(s.f, fip, fphi, Side::left,
                                                              q_, y, s.mesh, s.J);
                    const Quaternion gg = coord_frac_integral(s.g, gip, gphi, Side::right,
                                                              q_, y, s.mesh, s.J);
                    face_nu_gf_.push_back(nu * gf);
                    face_gg_.push_back(gg);
                }
    }

    auto all_zero = [](const std::vector<Quaternion>& v) {
        for (const auto& x : v)
            if (x.norm_sq() != 0.0) return false;
        return true;
    };
    f_zero_ = all_zero(mf_) && all_zero(face_nu_gf_);
    g_zero_ = all_zero(mg_) && all_zero(face_gg_);
}

Quaternion FracBpAssembler::boundary_f(const Vec4& xp) const {
    if (f_zero_) return {};
    const std::size_t n = face_nodes_.size();
    std::vector<Quaternion> kv(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        kv[i] = geom::cauchy_kernel(s_.psi, face_nodes_[i], xp);
        w[i] = face_ds_[i] * std::exp(lam_.sum_at(face_nodes_[i]));
    }
    const Quaternion acc =
        kernels::sandwich_weighted_sum(kv, Quaternion::one(), face_nu_gf_, w);
    return acc * std::exp(-lam_.sum_at(xp));
}

Quaternion FracBpAssembler::boundary_g(const Vec4& xp) const {
    if (g_zero_) return {};
    const std::size_t n = face_nodes_.size();
    std::vector<Quaternion> kv(n);
    std::vector<Quaternion> gnu(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        kv[i] = geom::cauchy_kernel(s_.psi, face_nodes_[i], xp);
        gnu[i] = face_gg_[i] * face_nu_[i];
        w[i] = face_ds_[i] * std::exp(mu_.sum_at(face_nodes_[i]));
    }
    const Quaternion acc = kernels::sandwich_weighted_sum(gnu, Quaternion::one(), kv, w);
    return acc * std::exp(-mu_.sum_at(xp));
}

namespace {

std::ptrdiff_t cell_index_of(const Box4& omega, int n, const Vec4& x, Vec4* lo_out,
                             Vec4* hi_out) {
    if (!omega.contains(x)) return -1;
    const auto un = static_cast<std::size_t>(n);
    std::size_t idx = 0;
    for (int k = 0; k < 4; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        const double h = omega.edge(k) / n;
        int i = static_cast<int>((x[ks] - omega.lo[ks]) / h);
        i = std::max(0, std::min(i, n - 1));
        idx = idx * un + static_cast<std::size_t>(i);
        if (lo_out != nullptr) {
            (*lo_out)[ks] = omega.lo[ks] + i * h;
            (*hi_out)[ks] = (*lo_out)[ks] + h;
        }
    }
    return static_cast<std::ptrdiff_t>(idx);
}

}  // namespace

Quaternion FracBpAssembler::volume_f(const Vec4& xp) const {
    if (f_zero_) return {};
    const std::size_t n = vol_nodes_.size();
    Vec4 clo{}, chi{};
    const std::ptrdiff_t skip = cell_index_of(s_.omega, s_.quad.vol_n, xp, &clo, &chi);
    std::vector<Quaternion> kv(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::ptrdiff_t>(i) == skip) {
            kv[i] = Quaternion::zero();
            w[i] = 0.0;
            continue;
        }
        kv[i] = geom::cauchy_kernel(s_.psi, vol_nodes_[i], xp);
        w[i] = cell_vol_ * std::exp(lam_.sum_at(vol_nodes_[i]));
    }
    Quaternion acc = kernels::sandwich_weighted_sum(kv, Quaternion::one(), mf_, w);
    if (skip >= 0 && s_.quad.policy == geom::SingularPolicy::exclude_with_shell) {
        const Quaternion sk = geom::cell_kernel_integral(s_.psi, xp, clo, chi);
        acc += (sk * mf_[static_cast<std::size_t>(skip)]) *
               std::exp(lam_.sum_at(vol_nodes_[static_cast<std::size_t>(skip)]));
    }
    return acc * std::exp(-lam_.sum_at(xp));
}

Quaternion FracBpAssembler::volume_g(const Vec4& xp) const {
    if (g_zero_) return {};
    const std::size_t n = vol_nodes_.size();
    Vec4 clo{}, chi{};
    const std::ptrdiff_t skip = cell_index_of(s_.omega, s_.quad.vol_n, xp, &clo, &chi);
    std::vector<Quaternion> kv(n);
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (static_cast<std::ptrdiff_t>(i) == skip) {
            kv[i] = Quaternion::zero();
            w[i] = 0.0;
            continue;
        }
        kv[i] = geom::cauchy_kernel(s_.psi, vol_nodes_[i], xp);
        w[i] = cell_vol_ * std::exp(mu_.sum_at(vol_nodes_[i]));
    }
    Quaternion acc = kernels::sandwich_weighted_sum(mg_, Quaternion::one(), kv, w);
    if (skip >= 0 && s_.quad.policy == geom::SingularPolicy::exclude_with_shell) {
        const Quaternion sk = geom::cell_kernel_integral(s_.psi, xp, clo, chi);
        acc += (mg_[static_cast<std::size_t>(skip)] * sk) *
               std::exp(mu_.sum_at(vol_nodes_[static_cast<std::size_t>(skip)]));
    }
    return acc * std::exp(-mu_.sum_at(xp));
}

Quaternion FracBpAssembler::axis_outer(const std::function<Quaternion(double)>& F, int i,
                                       bool f_side, const Vec4& x, Warnings* w) const {
    const auto is = static_cast<std::size_t>(i);
    const double alpha = f_side ? s_.f_params.alpha[is] : s_.g_params.alpha[is];
    const double sigma = f_side ? s_.f_params.sigma[is] : s_.g_params.sigma[is];
    const Side side = f_side ? Side::left : Side::right;
    const double bound = f_side ? s_.J.lo[is] : s_.J.hi[is];
    const FracAxisParams p(1.0 - alpha, sigma, side, bound);  // order 1 - alpha_i
    const auto& phi_src = f_side ? s_.phi : s_.theta;
    const WeightFunction wf =
        with_phi_ ? axis_weight(phi_src, i, q_) : WeightFunction::identity();
    return frac1d::prop_frac_deriv_shared_mesh(F, p, wf, x[is], s_.mesh, w);
}

BpTerms FracBpAssembler::assemble(const Vec4& x) const {
    BpTerms out;
    const bool interior = s_.omega.contains(x);

    for (int i = 0; i < 4; ++i) {
        auto along = [&x, i](auto&& fn) {
            return [&x, i, fn](double t) {
                Vec4 p = x;
                p[static_cast<std::size_t>(i)] = t;
                return fn(p);
            };
        };
        if (!f_zero_) {
            out.boundary += axis_outer(along([this](const Vec4& p) { return boundary_f(p); }),
                                       i, true, x, &out.warn);
            out.volume += axis_outer(along([this](const Vec4& p) { return volume_f(p); }),
                                     i, true, x, &out.warn);
        }
        if (!g_zero_) {
            out.boundary += axis_outer(along([this](const Vec4& p) { return boundary_g(p); }),
                                       i, false, x, &out.warn);
            out.volume += axis_outer(along([this](const Vec4& p) { return volume_g(p); }),
                                     i, false, x, &out.warn);
        }
    }

    if (!interior) return out;

    // slice sums and N terms
    const FracVectorParams fip = flipped_orders(s_.f_params);
    const FracVectorParams gip = flipped_orders(s_.g_params);
    std::array<double, 4> dfw{}, dgw{};
    for (int j = 0; j < 4; ++j) {
        const auto js = static_cast<std::size_t>(j);
        if (!f_zero_) {
            const auto wj = with_phi_ ? axis_weight(s_.phi, j, q_) : WeightFunction::identity();
            const FracAxisParams pj(1.0 - s_.f_params.alpha[js], s_.f_params.sigma[js],
                                    Side::left, s_.J.lo[js]);
            dfw[js] = prop_frac_deriv(const_one(s_.J.lo[js], s_.J.hi[js]), pj, wj,
                                      Sense::riemann_liouville, x[js], s_.mesh)
                          .w0;
        }
        if (!g_zero_) {
            const auto wj =
                with_phi_ ? axis_weight(s_.theta, j, q_) : WeightFunction::identity();
            const FracAxisParams pj(1.0 - s_.g_params.alpha[js], s_.g_params.sigma[js],
                                    Side::right, s_.J.hi[js]);
            dgw[js] = prop_frac_deriv(const_one(s_.J.lo[js], s_.J.hi[js]), pj, wj,
                                      Sense::riemann_liouville, x[js], s_.mesh)
                          .w0;
        }
    }
    Quaternion slice_sum, nf, ng;
    for (int i = 0; i < 4; ++i) {
        const auto is = static_cast<std::size_t>(i);
        Vec4 p = q_;
        p[is] = x[is];
        slice_sum += s_.f.eval(p) + s_.g.eval(p);

        if (!f_zero_) {
            const auto fsl = axis_slice(s_.f, i, q_, s_.J);
            const auto wi = with_phi_ ? axis_weight(s_.phi, i, q_) : WeightFunction::identity();
            const FracAxisParams pi(fip.alpha[is], s_.f_params.sigma[is], Side::left,
                                    s_.J.lo[is]);
            const Quaternion iv = prop_frac_integral(fsl, pi, wi, x[is], s_.mesh);
            double sum = 0.0;
            for (int j = 0; j < 4; ++j)
                if (j != i) sum += dfw[static_cast<std::size_t>(j)];
            nf += iv * sum;
        }
        if (!g_zero_) {
            const auto gsl = axis_slice(s_.g, i, q_, s_.J);
            const auto wi =
                with_phi_ ? axis_weight(s_.theta, i, q_) : WeightFunction::identity();
            const FracAxisParams pi(gip.alpha[is], s_.g_params.sigma[is], Side::right,
                                    s_.J.hi[is]);
            const Quaternion iv = prop_frac_integral(gsl, pi, wi, x[is], s_.mesh);
            double sum = 0.0;
            for (int j = 0; j < 4; ++j)
                if (j != i) sum += dgw[static_cast<std::size_t>(j)];
            ng += iv * sum;
        }
    }
    out.rhs = slice_sum + nf + ng;
    return out;
}

double FracBpAssembler::pre_derivative_check(const Vec4& x) const {
    const FracVectorParams fip = flipped_orders(s_.f_params);
    const FracVectorParams gip = flipped_orders(s_.g_params);
    const PhiOnBox* fphi = with_phi_ && s_.phi.has_value() ? &*s_.phi : nullptr;
    const PhiOnBox* gphi = with_phi_ && s_.theta.has_value() ? &*s_.theta : nullptr;
    const Field4 zero =
        Field4::from_callable(s_.J, [](const Vec4&) { return Quaternion::zero(); });

    double worst = 0.0;
    if (!f_zero_) {
        const Field4 ftilde = Field4::from_callable(s_.J, [&](const Vec4& y) {
            return coord_frac_integral(s_.f, fip, fphi, Side::left, q_, y, s_.mesh, s_.J) *
                   lam_.weight_at(y);
        });
        const auto rep = geom::bp_classical(ftilde, zero, s_.omega, s_.psi, x, s_.quad);
        worst = std::max(worst, rep.residual_rel);
    }
    if (!g_zero_) {
        const Field4 gtilde = Field4::from_callable(s_.J, [&](const Vec4& y) {
            return coord_frac_integral(s_.g, gip, gphi, Side::right, q_, y, s_.mesh, s_.J) *
                   mu_.weight_at(y);
        });
        const auto rep = geom::bp_classical(zero, gtilde, s_.omega, s_.psi, x, s_.quad);
        worst = std::max(worst, rep.residual_rel);
    }
    return worst;
}

double FracBpAssembler::volume_term_magnitude(const Vec4& x) const {
    return volume_f(x).norm();
}

VerificationReport verify_frac_bp(const Scenario& s, bool with_phi) {
    VerificationReport rep;
    rep.identity_id = "frac_bp";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, false);

    const FracBpAssembler assembler(s, with_phi, s.q);
    if (assembler.skipped()) {
        rep.skipped = true;
        rep.skip_reason = assembler.skip_reason();
        rep.finish(s);
        return rep;
    }

    Warnings warn;
    double sup_rel = 0.0, sup_abs = 0.0;
    for (const Vec4& x : eval_points(s)) {
        const BpTerms t = assembler.assemble(x);
        warn.merge(t.warn);
        const Quaternion lhs = t.boundary - t.volume;
        const double abs_r = (lhs - t.rhs).norm();
        sup_abs = std::max(sup_abs, abs_r);
        sup_rel = std::max(sup_rel, rel_of(abs_r, t.rhs.norm()));
        rep.lhs = lhs;
        rep.rhs = t.rhs;
    }
    for (const Vec4& x : s.exterior_points) {
        const BpTerms t = assembler.assemble(x);
        warn.merge(t.warn);
        const Quaternion lhs = t.boundary - t.volume;
        sup_abs = std::max(sup_abs, lhs.norm());
        sup_rel = std::max(sup_rel, rel_of(lhs.norm(), 0.0));
    }
    rep.residual_abs = sup_abs;
    rep.residual_rel = sup_rel;
    rep.warnings = warn.labels();
    rep.finish(s);
    return rep;
}

VerificationReport verify_cauchy(const Scenario& s) {
    VerificationReport rep;
    rep.identity_id = "cauchy";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, false);

    const bool with_phi = s.phi.has_value();
    const FracBpAssembler assembler(s, with_phi, s.q);
    if (assembler.skipped()) {
        rep.skipped = true;
        rep.skip_reason = assembler.skip_reason();
        rep.finish(s);
        return rep;
    }

    if (s.variant == "constructive") {
        // hypothesis: the volume potentials vanish; the boundary-only formula
        // then reproduces the slice sums plus N terms
        Warnings warn;
        double vol_mag = 0.0, sup_rel = 0.0;
        for (const Vec4& x : eval_points(s)) {
            vol_mag = std::max(vol_mag, assembler.volume_term_magnitude(x));
            const BpTerms t = assembler.assemble(x);
            warn.merge(t.warn);
            sup_rel = std::max(sup_rel, rel_of((t.boundary - t.rhs).norm(), t.rhs.norm()));
            rep.lhs = t.boundary;
            rep.rhs = t.rhs;
        }
        rep.residual_abs = vol_mag;  // dropped-term magnitude
        rep.residual_rel = sup_rel;  // boundary-only reconstruction error
        rep.warnings = warn.labels();
        rep.finish(s);
        return rep;
    }

    // implication mode: the boundary-only error equals the dropped volume
    // terms exactly, because the corollary regroups the same assembled sums
    double sup = 0.0;
    for (const Vec4& x : eval_points(s)) {
        const BpTerms t = assembler.assemble(x);
        const Quaternion boundary_only_err = t.boundary - t.rhs;
        const Quaternion full_residual = (t.boundary - t.volume) - t.rhs;
        const Quaternion regroup = boundary_only_err - t.volume - full_residual;
        const double scale =
            std::max({1.0, t.boundary.norm(), t.volume.norm(), t.rhs.norm()});
        sup = std::max(sup, regroup.norm() / scale);
        rep.lhs = boundary_only_err;
        rep.rhs = t.volume;
    }
    rep.residual_abs = sup;
    rep.residual_rel = sup;
    rep.finish(s);
    return rep;
}

VerificationReport verify_caputo_rl(const Scenario& s) {
    VerificationReport rep;
    rep.identity_id = "caputo_rl";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, true);

    Warnings warn;
    double sup = 0.0;
    const Field4& h = s.f;  // the scenario's f plays the smooth h

    for (const Vec4& x : eval_points(s)) {
        const Vec4 q = s.base_point(x);

        // first relation: f = I^{1-alpha} h
        const FracVectorParams ip = flipped_orders(s.f_params);
        const Field4 f1 = Field4::from_callable(s.J, [&](const Vec4& y) {
            return coord_frac_integral(h, ip, nullptr, Side::left, q, y, s.mesh, s.J);
        });
        OperatorSpec cap = f_side_spec(s, false);
        cap.sense = Sense::caputo;
        const Field4 capf = Field4::from_callable(s.J, [&](const Vec4& y) {
            return fueter::frac_fueter(f1, s.psi, cap, q, y, s.mesh, s.J);
        });
        Quaternion term1;
        for (int i = 0; i < 4; ++i) {
            const auto is = static_cast<std::size_t>(i);
            const FracAxisParams p(1.0 - s.f_params.alpha[is], s.f_params.sigma[is],
                                   Side::left, s.J.lo[is]);
            auto along = [&capf, &x, i](double t) {
                Vec4 p2 = x;
                p2[static_cast<std::size_t>(i)] = t;
                return capf.eval(p2);
            };
            term1 += frac1d::prop_frac_deriv_shared_mesh(
                along, p, WeightFunction::identity(), x[is], s.mesh, &warn);
        }
        std::array<double, 4> dw{};
        for (int j = 0; j < 4; ++j) {
            const auto js = static_cast<std::size_t>(j);
            const FracAxisParams pj(1.0 - s.f_params.alpha[js], s.f_params.sigma[js],
                                    Side::left, s.J.lo[js]);
            dw[js] = prop_frac_deriv(const_one(s.J.lo[js], s.J.hi[js]), pj,
                                     WeightFunction::identity(),
                                     Sense::riemann_liouville, x[js], s.mesh)
                         .w0;
        }
        const Field4 dsf = Field4::from_callable(s.J, [&](const Vec4& y) {
            return quat_prop_d(f1, s.psi, s.f_params.sigma_quat, nullptr, q, Side::left, y,
                               1.0 / s.mesh.n);
        });
        Quaternion term2, rhs1;
        const OperatorSpec rl = f_side_spec(s, false);
        for (int i = 0; i < 4; ++i) {
            const auto is = static_cast<std::size_t>(i);
            const auto sl = axis_slice(dsf, i, q, s.J);
            const FracAxisParams pi(1.0 - s.f_params.alpha[is], s.f_params.sigma[is],
                                    Side::left, s.J.lo[is]);
            const Quaternion iv =
                prop_frac_integral(sl, pi, WeightFunction::identity(), x[is], s.mesh);
            double lsum = 0.0;
            for (int j = 0; j < 4; ++j)
                if (j != i) lsum += dw[static_cast<std::size_t>(j)];
            term2 += iv * lsum;

            Vec4 p2 = q;
            p2[is] = x[is];
            rhs1 += fueter::frac_fueter(h, s.psi, rl, q, p2, s.mesh, s.J, &warn);
        }
        const Quaternion r1 = term1 - term2 - rhs1;
        sup = std::max(sup, rel_of(r1.norm(), rhs1.norm()));
        rep.lhs = term1 - term2;
        rep.rhs = rhs1;

        // second relation: f = psiD^sigma h
        const Field4 f2 = Field4::from_callable(s.J, [&](const Vec4& y) {
            return quat_prop_d(h, s.psi, s.f_params.sigma_quat, nullptr, q, Side::left, y,
                               1.0 / s.mesh.n);
        });
        const Quaternion lhs2 =
            fueter::frac_fueter(f2, s.psi, rl, q, x, s.mesh, s.J, &warn);
        const Field4 caph = Field4::from_callable(s.J, [&](const Vec4& y) {
            return fueter::frac_fueter(h, s.psi, cap, q, y, s.mesh, s.J);
        });
        const Quaternion rhs2 = quat_prop_d(caph, s.psi, s.f_params.sigma_quat, nullptr, q,
                                            Side::left, x, 1.0 / s.mesh.n);
        sup = std::max(sup, rel_of((lhs2 - rhs2).norm(), rhs2.norm()));
    }
    rep.residual_abs = sup;
    rep.residual_rel = sup;
    rep.warnings = warn.labels();
    rep.finish(s);
    return rep;
}

VerificationReport verify_reductions(const Scenario& s) {
    VerificationReport rep;
    rep.identity_id = "reductions";
    rep.scenario_id = s.id;
    rep.grid = grid_label(s, true);

    double sup = 0.0;
    Warnings warn;

    if (s.variant == "linear_phi") {
        // 4 D^{alpha,sigma,phi} f = D^{alpha,sigma} f + 3 (1-sigma) I^{1-alpha,sigma} f
        const PhiOnBox phi = PhiOnBox::sum_identity();
        const FracVectorParams ip = flipped_orders(s.f_params);
        for (const Vec4& x : eval_points(s)) {
            const Vec4 q = s.base_point(x);
            OperatorSpec wspec = f_side_spec(s, false);
            wspec.phi = &phi;
            const Quaternion A =
                fueter::frac_fueter(s.f, s.psi, wspec, q, x, s.mesh, s.J, &warn);
            const OperatorSpec pspec = f_side_spec(s, false);
            const Quaternion B =
                fueter::frac_fueter(s.f, s.psi, pspec, q, x, s.mesh, s.J, &warn);
            const Quaternion C =
                coord_frac_integral(s.f, ip, nullptr, Side::left, q, x, s.mesh, s.J);
            const Quaternion lhs = A * 4.0;
            const Quaternion rhs =
                B + (Quaternion::one() - s.f_params.sigma_quat) * C * 3.0;
            sup = std::max(sup, rel_of((lhs - rhs).norm(), rhs.norm()));
            rep.lhs = lhs;
            rep.rhs = rhs;
        }
    } else if (s.variant == "coupled_identity") {
        // sigma_k = 1 with the coupled quaternion proportion and phi = sum x_k
        const PhiOnBox phi = PhiOnBox::sum_identity();
        const Quaternion spsi = FracVectorParams::coupled_quat(s.psi, {1, 1, 1, 1});
        FracVectorParams params = s.f_params;
        params.sigma = {1, 1, 1, 1};
        params.sigma_quat = spsi;
        const FracVectorParams ip = flipped_orders(params);
        for (const Vec4& x : eval_points(s)) {
            const Vec4 q = s.base_point(x);
            OperatorSpec wspec;
            wspec.params = params;
            wspec.phi = &phi;
            const Quaternion lhs =
                fueter::frac_fueter(s.f, s.psi, wspec, q, x, s.mesh, s.J, &warn);
            const Field4 G = Field4::from_callable(s.J, [&](const Vec4& y) {
                return coord_frac_integral(s.f, ip, nullptr, Side::left, q, y, s.mesh, s.J);
            });
            const Quaternion dg = field::fueter(G, s.psi, Side::left, x, 1.0 / s.mesh.n);
            const Quaternion rhs =
                (Quaternion::one() - spsi) * G.eval(x) + spsi * dg * 0.25;
            sup = std::max(sup, rel_of((lhs - rhs).norm(), rhs.norm()));
            rep.lhs = lhs;
            rep.rhs = rhs;
        }
    } else if (s.variant == "katugampola" || s.variant == "hadamard") {
        // two quadrature routes for the sigma=1 weight-function integral
        const int axis = s.axis;
        const auto a = static_cast<std::size_t>(axis);
        const double lo = s.J.lo[a], hi = s.J.hi[a];
        const bool kat = s.variant == "katugampola";
        const double mu_exp = 2.0;
        const auto w1 = kat ? WeightFunction::power(mu_exp) : WeightFunction::log_t();
        const auto fsl = axis_slice(s.f, axis, s.q, s.J);
        const double alpha = s.f_params.alpha[a];
        const FracAxisParams p(alpha, 1.0, Side::left, lo);
        Function1D fu;
        fu.a = w1.phi(lo);
        fu.b = w1.phi(hi);
        fu.eval = [&](double u) {
            const double tau = kat ? std::pow(mu_exp * u, 1.0 / mu_exp) : std::exp(u);
            return fsl.eval(tau);
        };
        const FracAxisParams pu(alpha, 1.0, Side::left, fu.a);
        for (const double fr : {0.5, 0.75, 0.9}) {
            const double t = lo + fr * (hi - lo);
            const Quaternion direct = prop_frac_integral(fsl, p, w1, t, s.mesh);
            const Quaternion sub = prop_frac_integral(fu, pu, WeightFunction::identity(),
                                                      w1.phi(t), s.mesh);
            sup = std::max(sup, (direct - sub).norm() / std::max(1.0, sub.norm()));
            rep.lhs = direct;
            rep.rhs = sub;
        }
    } else if (s.variant == "rl_classical") {
        // sigma=1, phi=id agrees with the closed-form classical integral
        const int axis = s.axis;
        const auto a = static_cast<std::size_t>(axis);
        const double lo = s.J.lo[a], hi = s.J.hi[a];
        const double alpha = s.f_params.alpha[a];
        const FracAxisParams p(alpha, 1.0, Side::left, lo);
        for (const double beta : {1.7, 2.5}) {
            Function1D f;
            f.a = lo;
            f.b = hi;
            f.eval = [lo, beta](double t) {
                return Quaternion::scalar(std::pow(t - lo, beta - 1.0));
            };
            for (const double fr : {0.6, 0.85}) {
                const double t = lo + fr * (hi - lo);
                const double got =
                    prop_frac_integral(f, p, WeightFunction::identity(), t, s.mesh).w0;
                const double want = std::tgamma(beta) / std::tgamma(beta + alpha) *
                                    std::pow(t - lo, alpha + beta - 1.0);
                sup = std::max(sup, std::abs(got - want) / std::max(1.0, std::abs(want)));
                rep.lhs = Quaternion::scalar(got);
                rep.rhs = Quaternion::scalar(want);
            }
        }
    } else {
        rep.skipped = true;
        rep.skip_reason = "unknown reduction variant '" + s.variant + "'";
        rep.finish(s);
        return rep;
    }

    rep.residual_abs = sup;
    rep.residual_rel = sup;
    rep.warnings = warn.labels();
    rep.finish(s);
    return rep;
}

OrderEstimate estimate_order(const std::vector<double>& h,
                             const std::vector<double>& resid) {
    OrderEstimate out;
    if (h.size() != resid.size() || h.size() < 3) return out;
    for (std::size_t i = 0; i + 1 < resid.size(); ++i) {
        if (!(resid[i] > 0.0) || !(resid[i + 1] > 0.0)) return out;
        if (resid[i + 1] >= resid[i]) return out;  // non-monotone: inconclusive
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double lx = std::log(h[i]), ly = std::log(resid[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    out.order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    out.conclusive = true;
    return out;
}

std::vector<std::string> identity_ids() {
    return {"cauchy",      "caputo_rl", "classical_bp", "classical_stokes",
            "conjugation", "frac_bp",   "frac_stokes",  "fundamental",
            "reductions",  "semigroup"};
}

std::string identity_description(const std::string& id) {
    static const std::map<std::string, std::string> desc{
        {"fundamental",
         "inversion of the fractional proportional integral by its derivative, both sides"},
        {"semigroup", "order additivity of the fractional proportional integrals"},
        {"conjugation",
         "exponential-conjugation form of the proportional Fueter-type derivative"},
        {"classical_stokes", "quaternionic Stokes formula on a box"},
        {"classical_bp", "quaternionic Borel-Pompeiu reproduction on a box"},
        {"frac_stokes", "fractional proportional Stokes formula, weighted boundary vs volume"},
        {"frac_bp", "fractional proportional Borel-Pompeiu formula with kernel and N terms"},
        {"cauchy", "boundary-only Cauchy-type formula, implication and constructive modes"},
        {"caputo_rl", "bridge relations between the Caputo and Riemann-Liouville variants"},
        {"reductions",
         "degenerations: classical collapse, linear weight, power and log weights"}};
    const auto it = desc.find(id);
    return it == desc.end() ? std::string{} : it->second;
}

bool identity_uses_mesh_grid(const std::string& id) {
    return id == "fundamental" || id == "semigroup" || id == "conjugation" ||
           id == "caputo_rl" || id == "reductions";
}

VerificationReport run_identity(const std::string& id, const Scenario& s) {
    if (id == "fundamental") return verify_fundamental(s);
    if (id == "semigroup") return verify_semigroup(s);
    if (id == "conjugation") return verify_conjugation(s);
    if (id == "classical_stokes") return verify_classical_stokes(s);
    if (id == "classical_bp") return verify_classical_bp(s);
    if (id == "frac_stokes") return verify_frac_stokes(s, s.phi.has_value());
    if (id == "frac_bp") return verify_frac_bp(s, s.phi.has_value());
    if (id == "cauchy") return verify_cauchy(s);
    if (id == "caputo_rl") return verify_caputo_rl(s);
    if (id == "reductions") return verify_reductions(s);
    throw std::invalid_argument("unknown identity id '" + id + "'");
}

Scenario scale_scenario(const std::string& id, const Scenario& base, int level) {
    Scenario s = base;
    if (identity_uses_mesh_grid(id)) {
        s.mesh = Mesh1D(std::max(8, level), base.mesh.grading);
        return s;
    }
    s.quad.face_n = std::max(8, level);
    s.quad.vol_n = std::max(8, level);
    const double factor = static_cast<double>(level) / base.quad.face_n;
    s.mesh = Mesh1D(std::max(8, static_cast<int>(std::lround(base.mesh.n * factor))),
                    base.mesh.grading);
    return s;
}

std::vector<VerificationReport> convergence_study(const std::string& id,
                                                  const Scenario& base,
                                                  const std::vector<int>& ladder) {
    std::vector<VerificationReport> out;
    std::vector<double> hs, rs;
    for (const int level : ladder) {
        const Scenario s = scale_scenario(id, base, level);
        VerificationReport rep = run_identity(id, s);
        hs.push_back(1.0 / level);
        rs.push_back(rep.residual_abs);
        out.push_back(std::move(rep));
    }
    if (ladder.size() >= 3 && !out.empty() && !out.back().skipped) {
        const OrderEstimate est = estimate_order(hs, rs);
        if (est.conclusive)
            out.back().order_est = est.order;
        else
            out.back().warnings.push_back("order_inconclusive");
    }
    return out;
}

}  // namespace qfrac::verify
