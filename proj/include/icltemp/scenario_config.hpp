#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "icltemp/harness.hpp"

namespace icltemp {

// Scenario documents are JSON.  Distribution matrices accept the compact
// forms "identity(d)", "scaled_identity(d, c)", "diag(v1,v2,...)" or an
// explicit array of rows; vectors accept "zeros(d)", "constant(d, v)" or an
// explicit array.  Errors name the offending field path.
ShiftScenario parse_scenario(const nlohmann::json& doc);

ShiftScenario load_scenario_file(const std::filesystem::path& path);

// "--set a.b.c=value" style override; the value is parsed as JSON when
// possible and treated as a string otherwise.
void apply_override(nlohmann::json& doc, const std::string& assignment);

Matrix parse_matrix_spec(const nlohmann::json& node, Index d,
                         const std::string& path);
Vector parse_vector_spec(const nlohmann::json& node, Index d,
                         const std::string& path);

}  // namespace icltemp
