#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "iiotsim/harness/catalog.hpp"
#include "iiotsim/harness/scenario.hpp"
#include "iiotsim/sim/trace.hpp"

namespace iiotsim::harness {

enum class VerdictStatus { Pass, Fail, NotApplicable };

const char* verdict_status_name(VerdictStatus s);

struct RequirementVerdict {
  int dr = 0; // 1..11
  VerdictStatus status = VerdictStatus::NotApplicable;
  std::vector<std::size_t> evidence;        // indexes into the trace
  std::map<std::string, double> metrics;
  std::vector<std::string> notes;           // failure reasons / context
};

// Evaluates the eleven design-requirement checks against a completed run.
// Throws IncompleteTrace if the trace ends before the scenario duration.
std::vector<RequirementVerdict> verify(const sim::Trace& trace, const Scenario& scn);

bool all_applicable_pass(const std::vector<RequirementVerdict>& verdicts);

struct CoverageItem {
  int number = 0;
  std::string text;
  RequirementSource source = RequirementSource::Literature;
  std::set<int> design_requirements;
  std::vector<std::string> checks; // concrete check names covering the entry
  std::string note;                // out-of-scope remark, when applicable
};

// Maps every catalog entry through its DR set to the concrete checks; rows
// whose substance exceeds the simulation carry an explicit note.
std::vector<CoverageItem> coverage_report();

// Name of the executable check that covers one DR.
const std::string& dr_check_name(int dr);

} // namespace iiotsim::harness
