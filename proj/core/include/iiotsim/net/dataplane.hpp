#pragma once

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iiotsim/config.hpp"
#include "iiotsim/net/packet.hpp"
#include "iiotsim/net/topology.hpp"
#include "iiotsim/nfv/nfv.hpp"
#include "iiotsim/policy/policy.hpp"
#include "iiotsim/sim/kernel.hpp"

namespace iiotsim::net {

// Partial predicate over packet coordinates; an absent field is a wildcard.
struct Match {
  std::optional<int> in_port;
  std::optional<int> src;
  std::optional<int> dst;
  std::optional<int> vlan;
  std::optional<TrafficClass> tclass;

  int specificity() const;
  bool matches(int in_port_arg, const Packet& pkt) const;
  bool operator==(const Match&) const = default;
};

struct Action {
  enum class Kind { ForwardPort, SetQueue, Drop, ToController };
  Kind kind = Kind::Drop;
  int arg = 0;
  bool operator==(const Action&) const = default;
};

struct FlowRule {
  std::int64_t id = 0;
  Match match;
  int priority = 0; // 0..65535
  std::vector<Action> actions;
  std::optional<sim::SimTime> idle_timeout;
  std::optional<sim::SimTime> hard_timeout;
  int installed_by = 0;          // controller id
  std::int64_t flow_tag = 0;     // flow this rule serves (0 = none)
  std::string drop_reason;       // trace reason when a Drop action fires

  sim::SimTime installed_at = 0;
  sim::SimTime last_hit = 0;

  // Equal observable behavior: reinstalling such a rule is a no-op.
  bool same_behavior(const FlowRule& o) const {
    return match == o.match && priority == o.priority && actions == o.actions &&
           flow_tag == o.flow_tag && drop_reason == o.drop_reason;
  }
};

// Callbacks from the data plane into the control plane. Invocations are
// scheduled after the configured control-channel delay.
class ControlHooks {
public:
  virtual ~ControlHooks() = default;
  virtual void on_packet_in(int switch_id, int in_port, const Packet& pkt) = 0;
  virtual void on_auth_request(int switch_id, int in_port, int host, int principal,
                               const std::string& credential) = 0;
  virtual bool install_authorized(int switch_id, int controller_id) const = 0;
};

// Test instrumentation: egress queue activity.
struct QueueEvent {
  enum class What { Enqueue, TxStart, TxEnd, Drop };
  sim::SimTime at = 0;
  int node = 0;
  int port = 0;
  What what = What::Enqueue;
  TrafficClass tclass = TrafficClass::BestEffort;
  std::int64_t flow = 0;
  std::int64_t seq = 0;
};

// Switch, host, and NFV-host packet handling: SDN match-action tables with
// packet-in on miss, strict-priority non-preemptive egress queues, link
// transmission with serialization + propagation + bounded jitter, legacy
// learning switches with single-FIFO ports, and the integrity sink with
// nack-driven retransmission.
class SwitchFabric {
public:
  SwitchFabric(sim::Engine& eng, Topology& topo, nfv::NfvManager& nfv, const Config& cfg);

  void set_hooks(ControlHooks* hooks) { hooks_ = hooks; }
  void set_compiled_policy(const policy::CompiledPolicy* p) { compiled_ = p; }
  void set_tamper_decider(std::function<bool(const Packet&)> f) { tamper_ = std::move(f); }
  void set_vpn_session_checker(std::function<bool(std::int64_t, int)> f) {
    vpn_check_ = std::move(f);
  }
  void set_queue_observer(std::function<void(const QueueEvent&)> f) {
    observer_ = std::move(f);
  }

  // --- host side ---

  // Injects one data packet at its source host NIC. Stamps injection index,
  // payload tag and checksum, applies tamper injection, traces.
  void inject(Packet pkt);

  // 802.1X: the device at `host` presents a credential. Modeled as an auth
  // frame that is consumed by the first switch and relayed northbound.
  void inject_auth(int host, int principal, const std::string& credential);

  // --- southbound ---

  std::int64_t install_rule(int switch_id, FlowRule rule);
  void remove_rule(int switch_id, std::int64_t rule_id, const std::string& reason);
  void remove_flow_rules(int switch_id, std::int64_t flow_tag, const std::string& reason);
  // Expired rules purged first.
  std::vector<FlowRule> rules_snapshot(int switch_id);

  void install_chain(int nfv_node, std::int64_t flow, std::vector<int> instances, int out_port);
  void remove_chain(int nfv_node, std::int64_t flow);
  bool has_chain(int nfv_node, std::int64_t flow) const;

  // Fail-secure buffering: while held, the flow's packets queue in the miss
  // buffer at this switch instead of forwarding.
  void hold_flow_at(int switch_id, std::int64_t flow);
  void release_flow_at(int switch_id, std::int64_t flow);
  void drop_held(int switch_id, std::int64_t flow, const std::string& reason);
  // Discards any buffered packets of the flow (teardown path).
  void drop_buffered(int switch_id, std::int64_t flow, const std::string& reason);

  // --- world orchestration ---

  // Reacts to a link state flip: a Down link drops its in-flight and queued
  // packets with reason link-down.
  void on_link_state_changed(int link_id);

  void send_from(int node, int out_port, Packet pkt,
                 std::optional<int> queue_override = std::nullopt);

  std::int64_t serialization_us(std::int64_t bytes, std::int64_t bandwidth_kbps) const {
    return bytes * 8 * 1000 / bandwidth_kbps;
  }

private:
  struct Egress {
    std::deque<Packet> q[3];
    bool busy = false;
  };
  struct BufEntry {
    int in_port = 0;
    Packet pkt;
    bool held = false;
  };
  struct SwitchState {
    std::vector<FlowRule> rules;
    std::deque<BufEntry> buffer;
    std::set<std::int64_t> pending_packet_in;
    std::set<std::int64_t> held_flows;
  };
  struct LegacyState {
    std::map<int, int> mac; // learned host -> port
  };
  struct ChainEntry {
    std::vector<int> instances;
    int out_port = 0;
  };
  struct InFlight {
    std::uint64_t token;
    sim::EventId ev;
    Packet pkt;
  };

  sim::Engine& eng_;
  Topology& topo_;
  nfv::NfvManager& nfv_;
  const Config& cfg_;
  ControlHooks* hooks_ = nullptr;
  const policy::CompiledPolicy* compiled_ = nullptr;
  std::function<bool(const Packet&)> tamper_;
  std::function<bool(std::int64_t, int)> vpn_check_;
  std::function<void(const QueueEvent&)> observer_;

  std::map<PortRef, Egress> egress_;
  std::map<int, std::vector<InFlight>> in_flight_;          // per link
  std::map<std::pair<int, bool>, sim::SimTime> last_arrival_; // wire FIFO clamp
  std::map<int, SwitchState> sdn_;
  std::map<int, LegacyState> legacy_;
  std::map<int, std::map<std::int64_t, ChainEntry>> chains_;
  std::map<std::int64_t, std::uint64_t> next_txi_;
  std::map<int, std::deque<std::pair<int, std::string>>> pending_auth_;
  std::uint64_t next_token_ = 1;

  SwitchState& sdn_state(int switch_id);
  const std::string& node_name(int id) const { return topo_.node(id).name; }
  int queue_index(const Node& n, const Packet& pkt, std::optional<int> override_q) const;
  std::optional<int> access_port(int host) const;

  void observe(QueueEvent::What what, int node, int port, const Packet& pkt);
  void drop(int node, const Packet& pkt, const std::string& reason);
  void try_start_tx(int node, int port);
  void complete_arrival(int link_id, PortRef to, Packet pkt);
  void host_receive(int host, Packet pkt);
  void sdn_pipeline(int switch_id, int in_port, Packet pkt, bool replay);
  void legacy_forward(int switch_id, int in_port, Packet pkt);
  void nfv_receive(int node, int in_port, Packet pkt);
  void purge_expired(int switch_id);
  const FlowRule* best_match(SwitchState& st, int in_port, const Packet& pkt);
  void buffer_or_drop(int switch_id, int in_port, Packet pkt, bool held, bool notify);
  void replay_buffered(int switch_id, std::int64_t flow);
  void schedule_retransmit(const Packet& delivered_tampered);
};

} // namespace iiotsim::net
