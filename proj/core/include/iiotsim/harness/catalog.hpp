#pragma once

#include <set>
#include <string>
#include <vector>

namespace iiotsim::harness {

enum class RequirementSource { Literature, Practice };

const char* requirement_source_name(RequirementSource s);

// One row of the requirements catalog: the concrete requirement sentence,
// where it came from, and which abstract design requirements (DR1..DR11)
// it maps to.
struct RequirementEntry {
  int number = 0; // 1..44
  std::string text;
  RequirementSource source = RequirementSource::Literature;
  std::set<int> design_requirements;
};

// All 44 entries, in order.
const std::vector<RequirementEntry>& catalog();

// DR1..DR11 short names ("Quality of Service", ...). Index 1-based.
const std::string& design_requirement_name(int dr);

} // namespace iiotsim::harness
