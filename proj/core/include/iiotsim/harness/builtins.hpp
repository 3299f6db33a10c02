#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iiotsim/harness/scenario.hpp"

namespace iiotsim::harness {

// The three built-in use cases: inspection-camera, external-access,
// autonomous-transport.
std::vector<Scenario> builtin_scenarios();

std::vector<std::string> builtin_names();
Scenario builtin_scenario(const std::string& name); // throws ParseError if unknown

// Named verification scenarios used by the acceptance suite. Not listed as
// built-ins; construct directly or dump with serialize_scenario.
Scenario interference_scenario();
Scenario ring_failure_scenario();
Scenario controller_kill_scenario();
Scenario tamper_integrity_scenario();
Scenario plug_and_produce_scenario();

// Deterministic randomized isolation scenario family (DR3/DR5 fuzzing):
// random small topology, random segments and policy, a mix of authorized,
// unauthorized, and unauthenticated flows.
Scenario random_isolation_scenario(std::uint64_t index);

} // namespace iiotsim::harness
