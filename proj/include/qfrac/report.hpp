#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qfrac/verify.hpp"

namespace qfrac::report {

std::string format_double(double v);  // fixed %.17g formatting for byte-stable output

std::string to_json(const verify::VerificationReport& r);
std::string csv_header();
std::string csv_row(const verify::VerificationReport& r);
std::string human_line(const verify::VerificationReport& r);

void write_file(const std::filesystem::path& path, const std::string& content);

// deterministic file stem for a report: identity__scenario__grid
std::string file_stem(const verify::VerificationReport& r);

}  // namespace qfrac::report
