#pragma once

#include <string>

#include "iiotsim/harness/scenario.hpp"

namespace iiotsim::harness {

// Line-oriented scenario file format: a version header, `[section]`
// headers, one record per line with positional fields then key=value
// attributes. The grammar is documented in the repository README.
std::string serialize_scenario(const Scenario& scn);

// Throws Error(ParseError) with line diagnostics.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace iiotsim::harness
