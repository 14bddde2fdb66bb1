#include "qfrac/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

namespace qfrac::scenario {

using field::Box4;
using field::Field4;
using field::FracVectorParams;
using field::PhiOnBox;
using nlohmann::json;
using verify::Scenario;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

Vec4 parse_vec4(const json& j) {
    if (!j.is_array() || j.size() != 4)
        throw std::invalid_argument("scenario: expected an array of 4 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
            j[3].get<double>()};
}

std::array<double, 4> parse_arr4(const json& j) {
    const Vec4 v = parse_vec4(j);
    return {v[0], v[1], v[2], v[3]};
}

Quaternion parse_quat(const json& j) {
    const Vec4 v = parse_vec4(j);
    return {v[0], v[1], v[2], v[3]};
}

Box4 parse_box(const json& j) {
    return Box4(parse_vec4(j.at("lo")), parse_vec4(j.at("hi")));
}

StructuralSet parse_psi(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "standard") return StructuralSet::standard();
        throw std::invalid_argument("scenario: unknown structural set '" + s + "'");
    }
    std::array<Quaternion, 4> cand;
    for (std::size_t k = 0; k < 4; ++k) cand[k] = parse_quat(j.at(k));
    return StructuralSet::validate(cand);
}

frac1d::WeightFunction parse_weight1d(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "power") return frac1d::WeightFunction::power(j.at("mu").get<double>());
    if (type == "log") return frac1d::WeightFunction::log_t();
    if (type == "identity") return frac1d::WeightFunction::identity();
    throw std::invalid_argument("scenario: unknown 1d weight '" + type + "'");
}

PhiOnBox parse_phi(const json& j) {
    const auto type = j.at("type").get<std::string>();
    if (type == "linear") {
        const Vec4 slopes = parse_vec4(j.at("slopes"));
        const double c = j.value("constant", 0.0);
        return PhiOnBox::linear(slopes, c);
    }
    if (type == "sum_identity") return PhiOnBox::sum_identity();
    if (type == "axis_power") {
        return PhiOnBox::axis_weight(j.at("axis").get<int>(),
                                     frac1d::WeightFunction::power(j.at("mu").get<double>()),
                                     parse_vec4(j.at("slopes")));
    }
    if (type == "axis_log") {
        return PhiOnBox::axis_weight(j.at("axis").get<int>(),
                                     frac1d::WeightFunction::log_t(),
                                     parse_vec4(j.at("slopes")));
    }
    throw std::invalid_argument("scenario: unknown phi type '" + type + "'");
}

}  // namespace

Field4 make_field(const json& spec, const Box4& J, const StructuralSet& psi,
                  std::uint64_t seed) {
    const auto type = spec.at("type").get<std::string>();
    if (type == "const") {
        const Quaternion c = parse_quat(spec.at("value"));
        return Field4::from_callable(J, [c](const Vec4&) { return c; });
    }
    if (type == "poly") {
        struct Term {
            Quaternion coeff;
            std::array<double, 4> pow;
        };
        std::vector<Term> terms;
        for (const auto& t : spec.at("terms"))
            terms.push_back({parse_quat(t.at("coeff")), parse_arr4(t.at("powers"))});
        return Field4::from_callable(J, [terms](const Vec4& x) {
            Quaternion v;
            for (const auto& t : terms) {
                double m = 1.0;
                for (std::size_t k = 0; k < 4; ++k)
                    for (int p = 0; p < static_cast<int>(t.pow[k]); ++p) m *= x[k];
                v += t.coeff * m;
            }
            return v;
        });
    }
    if (type == "random_poly") {
        const int degree = spec.value("degree", 2);
        const double scale = spec.value("scale", 0.5);
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> u(-scale, scale);
        // monomials of total degree <= degree over 4 variables
        std::vector<std::array<int, 4>> mono;
        for (int d0 = 0; d0 <= degree; ++d0)
            for (int d1 = 0; d1 + d0 <= degree; ++d1)
                for (int d2 = 0; d2 + d1 + d0 <= degree; ++d2)
                    for (int d3 = 0; d3 + d2 + d1 + d0 <= degree; ++d3)
                        mono.push_back({d0, d1, d2, d3});
        std::vector<Quaternion> coeff(mono.size());
        for (auto& c : coeff) c = {u(rng), u(rng), u(rng), u(rng)};
        return Field4::from_callable(J, [mono, coeff](const Vec4& x) {
            Quaternion v;
            for (std::size_t i = 0; i < mono.size(); ++i) {
                double m = 1.0;
                for (std::size_t k = 0; k < 4; ++k)
                    for (int p = 0; p < mono[i][k]; ++p) m *= x[k];
                v += coeff[i] * m;
            }
            return v;
        });
    }
    if (type == "zeta") {
        const int m = spec.at("m").get<int>();
        if (m < 1 || m > 3) throw std::invalid_argument("scenario: zeta needs m in 1..3");
        const Quaternion pm = psi.psi[static_cast<std::size_t>(m)];
        return Field4::from_callable(J, [m, pm](const Vec4& x) {
            return Quaternion::scalar(x[static_cast<std::size_t>(m)]) - pm * x[0];
        });
    }
    if (type == "exp_kernel") {
        const Vec4 rates = parse_vec4(spec.at("rates"));
        const Quaternion amp =
            spec.contains("amplitude") ? parse_quat(spec.at("amplitude")) : Quaternion::one();
        return Field4::from_callable(J, [rates, amp](const Vec4& x) {
            return amp * std::exp(rates[0] * x[0] + rates[1] * x[1] + rates[2] * x[2] +
                                  rates[3] * x[3]);
        });
    }
    if (type == "identity") {
        return Field4::from_callable(J, [&psi](const Vec4& x) { return from_coords(x, psi); });
    }
    if (type == "conj_identity") {
        return Field4::from_callable(
            J, [&psi](const Vec4& x) { return from_coords(x, psi).conj(); });
    }
    if (type == "power_axis") {
        const int axis = spec.at("axis").get<int>();
        const double expo = spec.at("exponent").get<double>();
        const Quaternion amp =
            spec.contains("amplitude") ? parse_quat(spec.at("amplitude")) : Quaternion::one();
        const double offset = spec.value("offset", J.lo[static_cast<std::size_t>(axis)]);
        return Field4::from_callable(J, [axis, expo, amp, offset](const Vec4& x) {
            const double base = x[static_cast<std::size_t>(axis)] - offset;
            return amp * (base <= 0.0 ? 0.0 : std::pow(base, expo));
        });
    }
    if (type == "sum") {
        std::vector<Field4> parts;
        std::uint64_t slot = 0;
        for (const auto& t : spec.at("terms"))
            parts.push_back(make_field(t, J, psi, seed ^ fnv1a("sum" + std::to_string(slot++))));
        return Field4::from_callable(J, [parts](const Vec4& x) {
            Quaternion v;
            for (const auto& p : parts) v += p.eval(x);
            return v;
        });
    }
    if (type == "product") {
        const Field4 a = make_field(spec.at("a"), J, psi, seed ^ fnv1a("prod_a"));
        const Field4 b = make_field(spec.at("b"), J, psi, seed ^ fnv1a("prod_b"));
        return Field4::from_callable(
            J, [a, b](const Vec4& x) { return a.eval(x) * b.eval(x); });
    }
    if (type == "scale") {
        const double factor = spec.at("factor").get<double>();
        const Field4 a = make_field(spec.at("term"), J, psi, seed ^ fnv1a("scale"));
        return Field4::from_callable(J,
                                     [a, factor](const Vec4& x) { return a.eval(x) * factor; });
    }
    throw std::invalid_argument("scenario: unknown field type '" + type + "'");
}

Scenario parse_scenario(const json& j, std::uint64_t seed) {
    Scenario s;
    s.id = j.at("id").get<std::string>();
    const std::uint64_t sid_seed = seed ^ fnv1a(s.id);

    s.psi = j.contains("psi") ? parse_psi(j.at("psi")) : StructuralSet::standard();
    s.J = parse_box(j.at("box_j"));
    s.omega = parse_box(j.at("omega"));
    for (int k = 0; k < 4; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        if (!(s.omega.lo[ks] >= s.J.lo[ks] && s.omega.hi[ks] <= s.J.hi[ks]))
            throw std::invalid_argument("scenario: omega must lie inside box_j");
    }

    s.f = make_field(j.at("f"), s.J, s.psi, sid_seed ^ fnv1a("f"));
    s.g = j.contains("g")
              ? make_field(j.at("g"), s.J, s.psi, sid_seed ^ fnv1a("g"))
              : Field4::from_callable(s.J, [](const Vec4&) { return Quaternion::zero(); });

    const auto alpha = parse_arr4(j.at("alpha"));
    const auto sigma = parse_arr4(j.at("sigma"));
    Quaternion sq = Quaternion::scalar(sigma[0]);
    if (j.contains("sigma_quat")) {
        const auto& v = j.at("sigma_quat");
        if (v.is_string()) {
            const auto str = v.get<std::string>();
            if (str == "coupled")
                sq = FracVectorParams::coupled_quat(s.psi, sigma);
            else if (str == "scalar")
                sq = Quaternion::scalar(sigma[0]);
            else
                throw std::invalid_argument("scenario: unknown sigma_quat '" + str + "'");
        } else {
            sq = parse_quat(v);
        }
    }
    s.f_params = FracVectorParams(alpha, sigma, sq);

    const auto beta = j.contains("beta") ? parse_arr4(j.at("beta")) : alpha;
    const auto rho = j.contains("rho") ? parse_arr4(j.at("rho")) : sigma;
    Quaternion rq = Quaternion::scalar(rho[0]);
    if (j.contains("rho_quat")) {
        const auto& v = j.at("rho_quat");
        if (v.is_string()) {
            const auto str = v.get<std::string>();
            if (str == "coupled")
                rq = FracVectorParams::coupled_quat(s.psi, rho);
            else if (str == "scalar")
                rq = Quaternion::scalar(rho[0]);
            else
                throw std::invalid_argument("scenario: unknown rho_quat '" + str + "'");
        } else {
            rq = parse_quat(v);
        }
    }
    s.g_params = FracVectorParams(beta, rho, rq);

    if (j.contains("phi") && !j.at("phi").is_null()) s.phi = parse_phi(j.at("phi"));
    if (j.contains("theta") && !j.at("theta").is_null()) s.theta = parse_phi(j.at("theta"));

    if (j.contains("q")) {
        const auto& v = j.at("q");
        if (v.is_string() && v.get<std::string>() == "follow_x") {
            s.q_follows_x = true;
        } else {
            s.q = parse_vec4(v);
            s.q_follows_x = false;
        }
    }
    if (s.q_follows_x) {
        for (std::size_t k = 0; k < 4; ++k) s.q[k] = 0.5 * (s.omega.lo[k] + s.omega.hi[k]);
    }

    if (j.contains("interior_points"))
        for (const auto& p : j.at("interior_points")) s.interior_points.push_back(parse_vec4(p));
    if (j.contains("exterior_points"))
        for (const auto& p : j.at("exterior_points")) s.exterior_points.push_back(parse_vec4(p));

    if (j.contains("mesh"))
        s.mesh = frac1d::Mesh1D(j.at("mesh").value("n", 64), j.at("mesh").value("grading", 2.0));
    if (j.contains("quad")) {
        const auto& q = j.at("quad");
        s.quad = geom::QuadratureSpec(q.value("face_n", 12), q.value("vol_n", 12));
        const auto policy = q.value("policy", std::string("shell"));
        s.quad.policy = policy == "exclude" ? geom::SingularPolicy::exclude
                                            : geom::SingularPolicy::exclude_with_shell;
        s.quad.fd_rel = q.value("fd_rel", 1e-4);
        s.quad.parallel_width = q.value("parallel_width", 1);
    }

    s.tier = j.value("tier", std::string("fractional"));
    s.tolerance = j.value("tolerance", 5e-2);
    s.axis = j.value("axis", 0);
    s.variant = j.value("variant", std::string{});
    if (j.contains("identities"))
        for (const auto& id : j.at("identities")) s.identities.push_back(id.get<std::string>());
    return s;
}

Scenario load_scenario(const std::filesystem::path& file, std::uint64_t seed) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open scenario file " + file.string());
    json j;
    in >> j;
    return parse_scenario(j, seed);
}

std::vector<std::string> list_scenario_ids(const std::filesystem::path& dir) {
    std::vector<std::string> out;
    if (!std::filesystem::exists(dir)) return out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().extension() == ".json") out.push_back(e.path().stem().string());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::filesystem::path scenario_path(const std::filesystem::path& dir,
                                    const std::string& id) {
    return dir / (id + ".json");
}

std::string summary_line(const std::filesystem::path& file) {
    std::ifstream in(file);
    json j;
    in >> j;
    std::string line = j.value("id", file.stem().string());
    line += "  f=" + j.at("f").at("type").get<std::string>();
    if (j.contains("g")) line += " g=" + j.at("g").at("type").get<std::string>();
    line += " alpha=" + j.at("alpha").dump() + " sigma=" + j.at("sigma").dump();
    if (j.contains("phi") && !j.at("phi").is_null())
        line += " phi=" + j.at("phi").at("type").get<std::string>();
    if (j.contains("identities")) line += " identities=" + j.at("identities").dump();
    return line;
}

}  // namespace qfrac::scenario
