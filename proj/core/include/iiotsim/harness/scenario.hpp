#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "iiotsim/config.hpp"
#include "iiotsim/ctrl/controlplane.hpp"
#include "iiotsim/flow.hpp"
#include "iiotsim/net/topology.hpp"
#include "iiotsim/nfv/nfv.hpp"
#include "iiotsim/policy/policy.hpp"

namespace iiotsim::harness {

using sim::SimTime;

inline constexpr int kScenarioFormatVersion = 1;

struct FlowSpec {
  std::int64_t id = 0;
  std::string name;
  int src = 0;
  int dst = 0;
  TrafficClass tclass = TrafficClass::BestEffort;
  std::int64_t demand_kbps = 0;
  std::optional<std::int64_t> latency_bound_us; // admission bound (intent)
  std::optional<std::int64_t> jitter_bound_us;
  std::int64_t size_bytes = 125;
  SimTime period_us = 1000;
  SimTime start_us = 0;
  SimTime stop_us = 0;
  int principal = 0;
  bool proactive = false;
  std::optional<SimTime> request_at_us;
  std::optional<std::string> access_tag;
  // Declared measurement bounds, verified per delivered trace (DR1).
  std::optional<std::int64_t> check_latency_us;
  std::optional<std::int64_t> check_jitter_us;
  std::optional<std::int64_t> check_min_throughput_kbps;
  std::optional<double> check_max_loss;
};

struct VnfInstanceSpec {
  std::string name;
  std::string descriptor;
  std::optional<int> host;
  std::vector<nfv::Transition> transitions;
  std::vector<std::string> tags;
  bool deferred = false; // instantiated by an `instantiate` event, not at load
};

struct EventSpec {
  enum class Kind {
    LinkDown,
    LinkUp,
    PlugIn,
    Unplug,
    Authenticate,
    KillController,
    FailNfvHost,
    Tamper,
    RequestFlow,
    TeardownFlow,
    RebindFlow,
    RegisterApp,
    DeregisterApp,
    Instantiate,
  };
  SimTime at = 0;
  Kind kind = Kind::LinkDown;
  int link = 0;
  int host = 0;
  int switch_id = 0;
  int port = 0;
  int principal = 0;
  int controller = 0;
  int new_dst = 0;
  std::int64_t flow = 0;
  std::int64_t seq = 0;
  bool tamper_all_attempts = false;
  std::string credential;
  std::string entry;    // "port:<switch>:<port>" or "vpn:<instance-name>"
  std::string app;
  std::string instance; // VnfInstanceSpec name
};

struct TamperRateSpec {
  std::int64_t flow = 0;
  double probability = 0.0; // per injection, retransmissions included
};

struct Dr2Spec {
  std::int64_t flow = 0;
  SimTime baseline_lo = 0, baseline_hi = 0;
  SimTime loaded_lo = 0, loaded_hi = 0;
};

struct ChecksSpec {
  std::optional<Dr2Spec> dr2;
  double dr7_availability = 0.99;
  std::optional<SimTime> dr9_onboarding_bound_us;
  std::vector<std::pair<int, int>> redundant_pairs; // declared redundant switches
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  SimTime duration_us = sim::kSecond;
  Config config;

  std::vector<net::Node> nodes;
  std::vector<net::Link> links;
  std::vector<net::Segment> segments;
  std::vector<ctrl::ControllerCfg> controllers;
  std::map<std::string, nfv::VnfDescriptor> descriptors;
  std::vector<VnfInstanceSpec> instances;
  std::vector<policy::Principal> principals;
  std::map<std::string, policy::RolePermission> roles;
  std::vector<policy::SegmentRule> segment_rules;
  std::vector<FlowSpec> flows;
  std::vector<EventSpec> events;
  std::vector<TamperRateSpec> tamper_rates;
  ChecksSpec checks;

  const FlowSpec* find_flow(std::int64_t id) const;
  const net::Node* find_node(int id) const;
};

// Full static checks: reference resolution, hierarchy shape, policy
// compilation, redundancy declarations, legacy-region shape. Empty result
// means the scenario is runnable.
std::vector<std::string> validate(const Scenario& scn);

} // namespace iiotsim::harness
