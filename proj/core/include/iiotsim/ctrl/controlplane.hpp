#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iiotsim/config.hpp"
#include "iiotsim/ctrl/apps.hpp"
#include "iiotsim/net/dataplane.hpp"
#include "iiotsim/net/topology.hpp"
#include "iiotsim/nfv/nfv.hpp"
#include "iiotsim/policy/policy.hpp"
#include "iiotsim/qos/admission.hpp"
#include "iiotsim/sim/kernel.hpp"

namespace iiotsim::ctrl {

// Southbound contract version (rule schema + install semantics).
inline constexpr int kSouthboundApiVersion = 1;

enum class CtrlLevel { Machine, Line, Facility };

const char* ctrl_level_name(CtrlLevel l);
std::optional<CtrlLevel> ctrl_level_from(std::string_view s);

struct ControllerCfg {
  int id = 0;
  std::string name;
  CtrlLevel level = CtrlLevel::Machine;
  std::set<int> scope;             // switch ids this controller may program
  std::optional<int> parent;       // none only at Facility level
  std::optional<int> standby;      // hot standby controller id
};

enum class FlowState { Idle, Pending, Active, Suspended, Denied, TornDown };

const char* flow_state_name(FlowState s);

struct FlowRecord {
  std::int64_t flow = 0;
  FlowIntent intent;
  FlowState state = FlowState::Idle;
  net::Path path;
  std::optional<int> reservation;
  int owner = 0;                   // controller id currently responsible
  int session = 0;
  std::vector<int> waypoint_instances;            // VNFs in traversal order
  std::vector<std::pair<int, std::int64_t>> rules; // (switch, rule id)
  std::vector<int> chain_nodes;                    // NFV hosts with chain entries
  sim::SimTime established_at = -1;
  std::uint64_t epoch = 0;         // invalidates in-flight install events
  std::optional<int> held_at_;     // switch buffering this flow fail-secure
};

// Hierarchically scoped controllers: packet-in handling with escalation up
// the tree, intent-based proactive setup, policy + admission pipeline,
// link-failure rerouting (make-before-break), hot-standby failover, NFV
// orchestration, and runtime-registered northbound applications.
class ControlPlane : public net::ControlHooks {
public:
  ControlPlane(sim::Engine& eng, net::Topology& topo, net::SwitchFabric& fabric,
               nfv::NfvManager& nfv, policy::PolicyEngine& policy,
               qos::AdmissionController& qos, const Config& cfg);

  void add_controller(ControllerCfg cfg);
  // Validates the hierarchy (single root, sibling disjointness, unique home
  // controller per switch) and assigns switches. Throws ValidationError.
  void finalize();

  void set_compiled_policy(policy::CompiledPolicy compiled);
  const policy::CompiledPolicy& compiled_policy() const { return compiled_; }

  // Scenario flows announce their intents up front; packets carry only the
  // flow id.
  void register_flow_spec(std::int64_t flow, FlowIntent intent);
  const FlowIntent& flow_intent(std::int64_t flow) const;

  // --- northbound ---
  void request_flow(std::int64_t flow);
  void teardown_flow(std::int64_t flow, const std::string& reason);
  void rebind_flow(std::int64_t flow, int new_dst);
  void register_app(int ctrl_id, std::unique_ptr<NorthboundApp> app);
  void deregister_app(int ctrl_id, const std::string& name);

  // Credential check via an Authenticator instance; Device principals get
  // their port moved out of quarantine and a baseline rule installed.
  void authenticate(int principal, const std::string& credential, policy::SessionEntry entry);

  // --- world events ---
  void on_link_event(int link_id, bool up); // schedules grid-aligned detection
  void kill_controller(int ctrl_id);
  void fail_nfv_host(int host);
  int orchestrate_instantiate(const nfv::VnfDescriptor& desc, std::optional<int> host,
                              std::set<nfv::Transition> transitions,
                              std::set<std::string> tags);

  // --- ControlHooks ---
  void on_packet_in(int switch_id, int in_port, const net::Packet& pkt) override;
  void on_auth_request(int switch_id, int in_port, int host, int principal,
                       const std::string& credential) override;
  bool install_authorized(int switch_id, int controller_id) const override;

  // --- introspection ---
  const std::map<std::int64_t, FlowRecord>& flows() const { return records_; }
  const std::map<int, ControllerCfg>& controllers() const { return controllers_; }
  bool controller_alive(int id) const;
  int facility_controller() const { return facility_; }
  NetworkView make_view(int ctrl_id) const;

private:
  enum class InstallMode { Initial, Reroute, Resume };
  struct ReactiveCtx {
    int switch_id = 0;
    int in_port = 0;
  };
  struct ParkedPacketIn {
    int switch_id = 0;
    int in_port = 0;
    net::Packet pkt;
  };

  sim::Engine& eng_;
  net::Topology& topo_;
  net::SwitchFabric& fabric_;
  nfv::NfvManager& nfv_;
  policy::PolicyEngine& policy_;
  qos::AdmissionController& qos_;
  const Config& cfg_;
  policy::CompiledPolicy compiled_;

  std::map<int, ControllerCfg> controllers_;
  std::map<int, bool> alive_;
  int facility_ = 0;
  std::map<std::int64_t, FlowIntent> specs_;
  std::map<std::int64_t, FlowRecord> records_;
  std::map<int, std::vector<std::unique_ptr<NorthboundApp>>> apps_;
  std::map<int, std::vector<ParkedPacketIn>> parked_;
  std::map<int, std::vector<std::int64_t>> pending_reroutes_; // dead ctrl -> flows
  std::map<int, std::vector<std::int64_t>> waiting_on_instance_;
  std::map<std::int64_t, std::optional<ReactiveCtx>> deferred_ctx_;
  std::deque<std::function<void()>> parked_orchestration_;
  std::int64_t next_rule_id_ = 1;
  bool finalized_ = false;

  const ControllerCfg& ctrl(int id) const;
  const std::string& ctrl_name(int id) const;
  bool is_ancestor_or_self(int maybe_ancestor, int ctrl_id) const;
  // Access switch of a host; for legacy-attached hosts, the gateway SDN
  // switch serving that legacy region.
  std::optional<int> anchor_switch(int host) const;
  bool covers(int ctrl_id, std::int64_t flow) const;
  int ingress_switch(const FlowRecord& rec) const;

  void dispatch_setup(int ctrl_id, std::int64_t flow, std::optional<ReactiveCtx> ctx);
  void run_pipeline(int ctrl_id, std::int64_t flow, std::optional<ReactiveCtx> ctx);
  void deny_flow(int ctrl_id, std::int64_t flow, std::optional<ReactiveCtx> ctx,
                 const std::string& reason, bool policy_denial);
  void install_path(int ctrl_id, std::int64_t flow, const net::Path& path, InstallMode mode);
  struct DesiredRule {
    int switch_id;
    net::FlowRule rule;
  };
  std::vector<DesiredRule> desired_rules(int ctrl_id, const FlowRecord& rec,
                                         const net::Path& path) const;
  void do_reroute(std::int64_t flow);
  void suspend_flow(std::int64_t flow, const std::string& reason);
  void resume_suspended();
  void remove_flow_state(FlowRecord& rec, const std::string& reason);
  void activate_standby(int dead_id);
  void on_instance_migrated(int instance);
  void schedule_session_expiry(int session_id);

  friend class ControlPlaneTestPeer;
};

} // namespace iiotsim::ctrl
