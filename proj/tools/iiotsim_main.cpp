#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "iiotsim/cli/driver.hpp"
#include "iiotsim/sim/error.hpp"

int main(int argc, char** argv) {
  CLI::App app{"iiotsim - deterministic industrial SDN/NFV network simulator"};
  app.require_subcommand(1);

  iiotsim::cli::RunConfig cfg;
  std::string scenario_arg;
  std::string builtin_arg;

  CLI::App* run = app.add_subcommand("run", "run a scenario and verify the DR checks");
  run->add_option("scenario", scenario_arg, "scenario file (.scn)");
  run->add_option("--builtin", builtin_arg, "built-in scenario name (see `list`)");
  run->add_option("--seed", [&cfg](const CLI::results_t& r) {
    cfg.seed = std::stoull(r[0]);
    return true;
  }, "override the scenario seed");
  run->add_option("--until", [&cfg](const CLI::results_t& r) {
    cfg.until = std::stoll(r[0]);
    return true;
  }, "override the simulated duration (microseconds)");
  run->add_option("--trace-out", cfg.trace_out, "trace output path")
      ->capture_default_str();
  run->add_option("--report-out", cfg.report_out, "JSON report output path")
      ->capture_default_str();
  run->add_flag("--quiet", cfg.quiet, "suppress per-DR output");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "static checks, no simulation");
  validate->add_option("scenario", validate_path, "scenario file (.scn)")->required();

  CLI::App* list = app.add_subcommand("list", "list built-in scenarios");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      if (!scenario_arg.empty()) cfg.scenario_path = scenario_arg;
      if (!builtin_arg.empty()) cfg.builtin = builtin_arg;
      return iiotsim::cli::run(cfg);
    }
    if (validate->parsed()) {
      auto diags = iiotsim::cli::validate_file(validate_path);
      for (const auto& d : diags) std::fprintf(stderr, "%s\n", d.c_str());
      if (diags.empty()) std::printf("ok\n");
      return diags.empty() ? 0 : 1;
    }
    if (list->parsed()) {
      for (const auto& name : iiotsim::cli::list_builtins()) std::printf("%s\n", name.c_str());
      return 0;
    }
  } catch (const iiotsim::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
