#pragma once

// Scenario catalog: JSON documents describing fields, parameters, weights,
// grids and evaluation points for the verification harness.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfrac/verify.hpp"

namespace qfrac::scenario {

// field registry: const, poly, random_poly, zeta, exp_kernel, identity,
// conj_identity, power_axis, sum, product, scale
field::Field4 make_field(const nlohmann::json& spec, const field::Box4& J,
                         const StructuralSet& psi, std::uint64_t seed);

verify::Scenario parse_scenario(const nlohmann::json& j, std::uint64_t seed);
verify::Scenario load_scenario(const std::filesystem::path& file, std::uint64_t seed);

// sorted scenario ids found in a directory (empty directory -> empty list)
std::vector<std::string> list_scenario_ids(const std::filesystem::path& dir);
std::filesystem::path scenario_path(const std::filesystem::path& dir,
                                    const std::string& id);
std::string summary_line(const std::filesystem::path& file);

}  // namespace qfrac::scenario
