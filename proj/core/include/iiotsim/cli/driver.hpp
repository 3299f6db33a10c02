#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "iiotsim/harness/scenario.hpp"
#include "iiotsim/harness/verify.hpp"

namespace iiotsim::cli {

inline constexpr int kReportFormatVersion = 1;

struct RunConfig {
  std::optional<std::string> scenario_path;
  std::optional<std::string> builtin;     // exactly one of path/builtin
  std::optional<std::uint64_t> seed;      // overrides the scenario seed
  std::optional<sim::SimTime> until;      // overrides the scenario duration
  std::string trace_out = "trace.log";
  std::string report_out = "report.json";
  bool quiet = false;
};

// Exit status: 0 all applicable DR verdicts pass, 1 scenario/validation
// error, 2 at least one Fail. Trace and report files are written whenever
// the scenario loads, even on Fail.
int run(const RunConfig& cfg);

std::vector<std::string> validate_file(const std::string& path);
std::vector<std::string> list_builtins();

// Deterministic JSON report (verdicts + coverage), shared by run() and the
// test suites.
std::string make_report_json(const harness::Scenario& scn,
                             const std::vector<harness::RequirementVerdict>& verdicts);

} // namespace iiotsim::cli
