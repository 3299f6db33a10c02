#pragma once

#include <map>
#include <string>

#include "iiotsim/ctrl/controlplane.hpp"
#include "iiotsim/harness/scenario.hpp"
#include "iiotsim/net/dataplane.hpp"
#include "iiotsim/net/topology.hpp"
#include "iiotsim/nfv/nfv.hpp"
#include "iiotsim/policy/policy.hpp"
#include "iiotsim/qos/admission.hpp"
#include "iiotsim/sim/kernel.hpp"

namespace iiotsim {

// Composition root: builds the world a scenario describes, schedules its
// flows and injected events, and runs it to completion. One Simulation per
// run; distinct runs share nothing.
class Simulation {
public:
  explicit Simulation(harness::Scenario scn);

  // Processes everything up to the scenario duration and returns the trace.
  const sim::Trace& run();

  sim::Engine& engine() { return eng_; }
  net::Topology& topology() { return topo_; }
  qos::AdmissionController& qos() { return qos_; }
  policy::PolicyEngine& policy() { return policy_; }
  nfv::NfvManager& nfv() { return nfv_; }
  net::SwitchFabric& fabric() { return fabric_; }
  ctrl::ControlPlane& control() { return ctrl_; }
  const harness::Scenario& scenario() const { return scn_; }
  int instance_id(const std::string& name) const;

private:
  harness::Scenario scn_;
  Config cfg_;
  sim::Engine eng_;
  net::Topology topo_;
  qos::AdmissionController qos_;
  policy::PolicyEngine policy_;
  nfv::NfvManager nfv_;
  net::SwitchFabric fabric_;
  ctrl::ControlPlane ctrl_;

  std::map<std::string, int> instance_ids_;
  std::map<std::pair<std::int64_t, std::int64_t>, bool> targeted_tampers_;
  std::map<std::int64_t, double> tamper_rates_;
  std::map<std::int64_t, std::int64_t> seq_counters_;

  void build_topology();
  void build_policy();
  void build_controllers();
  void build_nfv();
  void instantiate_spec(const harness::VnfInstanceSpec& spec);
  void wire_fabric();
  void schedule_events();
  void schedule_flows();
  void apply_event(const harness::EventSpec& ev);
  void inject_tick(std::int64_t flow, sim::SimTime period, sim::SimTime stop, std::int64_t size);
  std::optional<int> plug_link(int host, int switch_id, int port) const;
};

} // namespace iiotsim
