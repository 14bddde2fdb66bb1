#include "qfrac/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace qfrac::report {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

std::string join_warnings(const std::vector<std::string>& w) {
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i != 0) out += '|';
        out += w[i];
    }
    return out;
}

json quat_json(const Quaternion& q) {
    return json::array({q.w0, q.w1, q.w2, q.w3});
}

}  // namespace

std::string to_json(const verify::VerificationReport& r) {
    json j;
    j["identity_id"] = r.identity_id;
    j["scenario_id"] = r.scenario_id;
    j["grid"] = r.grid;
    j["residual_abs"] = r.residual_abs;
    j["residual_rel"] = r.residual_rel;
    j["lhs"] = quat_json(r.lhs);
    j["rhs"] = quat_json(r.rhs);
    if (r.order_est.has_value())
        j["order_est"] = *r.order_est;
    else
        j["order_est"] = nullptr;
    j["warnings"] = r.warnings;
    j["skipped"] = r.skipped;
    j["skip_reason"] = r.skip_reason;
    j["tier"] = r.tier;
    j["tolerance"] = r.tolerance;
    j["passed"] = r.passed;
    return j.dump(2) + "\n";
}

std::string csv_header() {
    return "identity_id,scenario_id,grid,residual_abs,residual_rel,order_est,warnings\n";
}

std::string csv_row(const verify::VerificationReport& r) {
    std::string row = r.identity_id + "," + r.scenario_id + "," + r.grid + ",";
    row += format_double(r.residual_abs) + ",";
    row += format_double(r.residual_rel) + ",";
    if (r.order_est.has_value()) row += format_double(*r.order_est);
    row += "," + join_warnings(r.warnings) + "\n";
    return row;
}

std::string human_line(const verify::VerificationReport& r) {
    std::string line = r.skipped ? "[skip] " : (r.passed ? "[pass] " : "[FAIL] ");
    line += r.identity_id + " / " + r.scenario_id + " (" + r.grid + ")";
    if (r.skipped) {
        line += "  reason: " + r.skip_reason;
        return line;
    }
    line += "  residual_rel=" + format_double(r.residual_rel) +
            " tol=" + format_double(r.tolerance) + " tier=" + r.tier;
    if (r.order_est.has_value()) line += " order=" + format_double(*r.order_est);
    if (!r.warnings.empty()) line += " warn=" + join_warnings(r.warnings);
    return line;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

std::string file_stem(const verify::VerificationReport& r) {
    std::string grid = r.grid;
    for (char& c : grid) {
        if (c == '=' || c == ';') c = '_';
    }
    return r.identity_id + "__" + r.scenario_id + "__" + grid;
}

}  // namespace qfrac::report
