#pragma once

// Executable verification of the operator identities: each verifier runs one
// identity on one scenario and returns a structured residual report. Reports
// are bit-reproducible for a fixed scenario (fixed summation order, no
// nondeterministic parallelism).

#include <optional>
#include <string>
#include <vector>

#include "qfrac/fueter.hpp"
#include "qfrac/geom.hpp"

namespace qfrac::verify {

using field::Box4;
using field::Field4;
using field::FracVectorParams;
using field::PhiOnBox;
using frac1d::Mesh1D;
using geom::QuadratureSpec;

struct Scenario {
    std::string id;
    StructuralSet psi = StructuralSet::standard();
    Box4 J{{0, 0, 0, 0}, {1, 1, 1, 1}};
    Box4 omega{{0.2, 0.2, 0.2, 0.2}, {0.8, 0.8, 0.8, 0.8}};
    Field4 f;
    Field4 g;
    FracVectorParams f_params;
    FracVectorParams g_params;
    std::optional<PhiOnBox> phi;    // f-side weight
    std::optional<PhiOnBox> theta;  // g-side weight
    Vec4 q{0.5, 0.5, 0.5, 0.5};
    bool q_follows_x = true;        // default: evaluate with q = x
    std::vector<Vec4> interior_points;
    std::vector<Vec4> exterior_points;
    Mesh1D mesh{64, 2.0};
    QuadratureSpec quad{12, 12};
    std::string tier = "fractional";  // exact | classical | fractional
    double tolerance = 5e-2;
    int axis = 0;          // axis used by the 1D identities
    std::string variant;   // family selector (cauchy mode, reduction family)
    std::vector<std::string> identities;  // which identities this scenario feeds

    Vec4 base_point(const Vec4& x) const { return q_follows_x ? x : q; }
};

struct VerificationReport {
    std::string identity_id;
    std::string scenario_id;
    std::string grid;
    double residual_abs = 0.0;
    double residual_rel = 0.0;
    Quaternion lhs;
    Quaternion rhs;
    std::optional<double> order_est;
    std::vector<std::string> warnings;
    bool skipped = false;
    std::string skip_reason;
    std::string tier;
    double tolerance = 0.0;
    bool passed = false;

    void finish(const Scenario& s);  // fills tier/tolerance/passed
};

VerificationReport verify_fundamental(const Scenario& s);
VerificationReport verify_semigroup(const Scenario& s);
VerificationReport verify_conjugation(const Scenario& s);
VerificationReport verify_classical_stokes(const Scenario& s);
VerificationReport verify_classical_bp(const Scenario& s);
VerificationReport verify_frac_stokes(const Scenario& s, bool with_phi);
VerificationReport verify_frac_bp(const Scenario& s, bool with_phi);
VerificationReport verify_cauchy(const Scenario& s);
VerificationReport verify_caputo_rl(const Scenario& s);
VerificationReport verify_reductions(const Scenario& s);

// decomposed fractional Borel-Pompeiu assembly (also drives verify_cauchy)
struct BpTerms {
    Quaternion boundary;  // outer derivative of the kernel-weighted boundary data
    Quaternion volume;    // outer derivative of the weighted volume potentials
    Quaternion rhs;       // slice sums plus N terms (zero for exterior x)
    Warnings warn;
};

class FracBpAssembler {
  public:
    FracBpAssembler(const Scenario& s, bool with_phi, const Vec4& q);

    BpTerms assemble(const Vec4& x) const;
    // classical Borel-Pompeiu applied to the weighted transforms; returns the
    // worst residual over the f and g sides
    double pre_derivative_check(const Vec4& x) const;
    // magnitude of the f-side volume potential (constructive Cauchy mode)
    double volume_term_magnitude(const Vec4& x) const;
    bool skipped() const { return skipped_; }
    const std::string& skip_reason() const { return reason_; }

  private:
    const Scenario& s_;
    bool with_phi_;
    Vec4 q_;
    bool skipped_ = false;
    std::string reason_;
    bool f_zero_ = false, g_zero_ = false;

    fueter::WeightProfile lam_, mu_;
    std::vector<Vec4> vol_nodes_;
    std::vector<Quaternion> mf_, mg_;       // weighted derivative caches
    std::vector<Vec4> face_nodes_;
    std::vector<double> face_ds_;
    std::vector<Quaternion> face_nu_gf_;    // nu * G_f per node (premultiplied)
    std::vector<Quaternion> face_gg_;       // G_g per node
    std::vector<Quaternion> face_nu_;       // nu per node
    double cell_vol_ = 0.0;

    Quaternion boundary_f(const Vec4& xp) const;
    Quaternion boundary_g(const Vec4& xp) const;
    Quaternion volume_f(const Vec4& xp) const;
    Quaternion volume_g(const Vec4& xp) const;
    Quaternion axis_outer(const std::function<Quaternion(double)>& F, int i, bool f_side,
                          const Vec4& x, Warnings* w) const;
    friend VerificationReport verify_cauchy(const Scenario& s);
};

struct OrderEstimate {
    double order = 0.0;
    bool conclusive = false;
};
OrderEstimate estimate_order(const std::vector<double>& h,
                             const std::vector<double>& resid);

// identity registry
std::vector<std::string> identity_ids();
std::string identity_description(const std::string& id);
bool identity_uses_mesh_grid(const std::string& id);  // ladder refines mesh.n vs nodes/axis
VerificationReport run_identity(const std::string& id, const Scenario& s);

// runs the identity over a refinement ladder; attaches the order estimate to
// the final report (ladder must have >= 3 levels for an estimate)
std::vector<VerificationReport> convergence_study(const std::string& id,
                                                  const Scenario& base,
                                                  const std::vector<int>& ladder);

// applies one ladder level to a scenario copy
Scenario scale_scenario(const std::string& id, const Scenario& base, int level);

}  // namespace qfrac::verify
