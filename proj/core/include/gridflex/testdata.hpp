#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gridflex/caseio.hpp"

namespace gridflex {

/// Cases compiled into the library: "pjm5", "ieee24", "ieee118",
/// "ieee118_stressed".
std::vector<std::pair<std::string, CaseFile>> bundled_cases();

/// One bundled case by name; throws std::out_of_range when unknown.
CaseFile bundled_case(const std::string& name);

}  // namespace gridflex
