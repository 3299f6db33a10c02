#include "iiotsim/cli/driver.hpp"

#include <cstdio>

#include <json.hpp>

#include "iiotsim/harness/builtins.hpp"
#include "iiotsim/harness/scenario_text.hpp"
#include "iiotsim/sim/error.hpp"
#include "iiotsim/simulation.hpp"

namespace iiotsim::cli {

using harness::RequirementVerdict;
using harness::Scenario;
using harness::VerdictStatus;
using nlohmann::json;

std::string make_report_json(const Scenario& scn,
                             const std::vector<RequirementVerdict>& verdicts) {
  json report;
  report["format_version"] = kReportFormatVersion;
  report["scenario"] = scn.name;
  report["seed"] = scn.seed;
  report["duration_us"] = scn.duration_us;

  int pass = 0, fail = 0, na = 0;
  json jverdicts = json::array();
  for (const auto& v : verdicts) {
    json jv;
    jv["dr"] = v.dr;
    jv["name"] = harness::design_requirement_name(v.dr);
    jv["check"] = harness::dr_check_name(v.dr);
    jv["status"] = harness::verdict_status_name(v.status);
    jv["metrics"] = json::object();
    for (const auto& [k, val] : v.metrics) jv["metrics"][k] = val;
    jv["evidence"] = v.evidence;
    jv["notes"] = v.notes;
    jverdicts.push_back(jv);
    switch (v.status) {
      case VerdictStatus::Pass: ++pass; break;
      case VerdictStatus::Fail: ++fail; break;
      case VerdictStatus::NotApplicable: ++na; break;
    }
  }
  report["verdicts"] = jverdicts;
  report["summary"] = {{"pass", pass}, {"fail", fail}, {"not_applicable", na}};

  json jcov = json::array();
  for (const auto& item : harness::coverage_report()) {
    json jc;
    jc["number"] = item.number;
    jc["text"] = item.text;
    jc["source"] = harness::requirement_source_name(item.source);
    jc["design_requirements"] = item.design_requirements;
    jc["checks"] = item.checks;
    if (!item.note.empty()) jc["note"] = item.note;
    jcov.push_back(jc);
  }
  report["coverage"] = jcov;
  return report.dump(2) + "\n";
}

std::vector<std::string> validate_file(const std::string& path) {
  Scenario scn = harness::load_scenario_file(path);
  return harness::validate(scn);
}

std::vector<std::string> list_builtins() { return harness::builtin_names(); }

int run(const RunConfig& cfg) {
  if (cfg.scenario_path.has_value() == cfg.builtin.has_value()) {
    std::fprintf(stderr, "error: give exactly one of a scenario file or --builtin\n");
    return 1;
  }
  Scenario scn;
  try {
    scn = cfg.builtin ? harness::builtin_scenario(*cfg.builtin)
                      : harness::load_scenario_file(*cfg.scenario_path);
    if (cfg.seed) scn.seed = *cfg.seed;
    if (cfg.until) scn.duration_us = *cfg.until;
    auto diags = harness::validate(scn);
    if (!diags.empty()) {
      for (const auto& d : diags) std::fprintf(stderr, "validation: %s\n", d.c_str());
      return 1;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  Simulation sim(scn);
  const sim::Trace& trace = sim.run();
  std::vector<RequirementVerdict> verdicts = harness::verify(trace, scn);

  harness::write_file(cfg.trace_out, trace.serialize());
  harness::write_file(cfg.report_out, make_report_json(scn, verdicts));

  bool any_fail = false;
  for (const auto& v : verdicts) {
    if (v.status == VerdictStatus::Fail) any_fail = true;
    if (!cfg.quiet) {
      std::printf("DR%-2d %-22s %-28s %s\n", v.dr,
                  harness::design_requirement_name(v.dr).c_str(),
                  harness::dr_check_name(v.dr).c_str(),
                  harness::verdict_status_name(v.status));
      for (const auto& n : v.notes) std::printf("      %s\n", n.c_str());
    }
  }
  if (!cfg.quiet)
    std::printf("trace: %s\nreport: %s\n", cfg.trace_out.c_str(), cfg.report_out.c_str());
  return any_fail ? 2 : 0;
}

} // namespace iiotsim::cli
