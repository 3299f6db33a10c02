#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iiotsim/config.hpp"
#include "iiotsim/net/topology.hpp"
#include "iiotsim/policy/policy.hpp"
#include "iiotsim/sim/kernel.hpp"

namespace iiotsim::net {
struct Packet;
}

namespace iiotsim::nfv {

enum class VnfKind { Firewall, VpnGateway, Authenticator, TrafficMonitor };

const char* vnf_kind_name(VnfKind k);
std::optional<VnfKind> vnf_kind_from(std::string_view s);

struct VnfDescriptor {
  std::string name;
  VnfKind kind = VnfKind::Firewall;
  int cpu_demand = 1;
  int mem_demand = 1;
  std::int64_t processing_delay_us = 0;
};

enum class VnfState { Booting, Running, Migrating, Failed };

const char* vnf_state_name(VnfState s);

// Directed segment transition an instance is attached to.
struct Transition {
  int from = 0;
  int to = 0;
  auto operator<=>(const Transition&) const = default;
};

struct VnfInstance {
  int id = 0;
  std::string name;
  VnfDescriptor desc;
  int host = 0;
  VnfState state = VnfState::Booting;
  std::set<Transition> transitions;
  std::set<std::string> access_tags;
};

struct HostState {
  int node = 0;
  int cpu_capacity = 0;
  int mem_capacity = 0;
  int cpu_used = 0;
  int mem_used = 0;
  bool failed = false;
};

struct TraverseResult {
  enum class Act { Forward, Drop } act = Act::Forward;
  std::string drop_reason;
  std::int64_t delay_us = 0;
};

struct TraverseContext {
  const policy::CompiledPolicy* compiled = nullptr;
  int dst_segment = 0;
  bool vpn_session_ok = false; // set by the control plane for VpnGateway hops
};

struct MigrationReport {
  std::vector<int> migrated;   // instance ids re-placed (Running after migration delay)
  std::vector<int> unplaced;   // instance ids left Failed
};

// NFV infrastructure: hosts with abstract capacity, first-fit placement by
// host id, boot and migration timing, and the per-packet traversal
// semantics of the four function kinds.
class NfvManager {
public:
  NfvManager(sim::Engine& eng, const net::Topology& topo, const Config& cfg)
      : eng_(eng), topo_(topo), cfg_(cfg) {}

  void register_host(int node_id); // reads capacities from the topology node

  // First-fit over hosts ordered by id; Running after the boot delay.
  // Throws NoCapacity when nothing fits.
  int instantiate(const VnfDescriptor& desc, std::optional<int> host_constraint,
                  std::set<Transition> transitions, std::set<std::string> access_tags,
                  std::function<void(int)> on_running = {});

  const VnfInstance& instance(int id) const;
  const std::map<int, VnfInstance>& instances() const { return instances_; }
  const std::map<int, HostState>& hosts() const { return hosts_; }
  bool host_failed(int node_id) const;

  bool running(int id) const;
  std::optional<int> instance_for_transition(Transition t) const;
  std::optional<int> by_tag(const std::string& tag) const;
  std::optional<int> by_name(const std::string& name) const;
  // Instance ids on a given host, ascending.
  std::vector<int> instances_on(int host) const;

  // Applies one instance to a packet. Emits vnf-traversed / flow-stats
  // records; the caller disposes of the packet per the result.
  TraverseResult traverse(int instance_id, const net::Packet& pkt, const TraverseContext& ctx);

  // Marks the host failed and first-fit re-places its instances on the
  // surviving hosts. Re-placed instances are Migrating for the migration
  // delay, then Running (on_remigrated fires). Unplaceable instances stay
  // Failed and their transitions close.
  MigrationReport fail_host(int node_id, const std::function<void(int)>& on_remigrated);

  // Capacity conservation: used <= capacity on every host.
  bool capacity_consistent() const;

private:
  sim::Engine& eng_;
  const net::Topology& topo_;
  const Config& cfg_;
  std::map<int, HostState> hosts_;
  std::map<int, VnfInstance> instances_;
  int next_id_ = 1;

  std::optional<int> first_fit(const VnfDescriptor& d, std::optional<int> constraint) const;
  const std::string& emitter() const;
};

} // namespace iiotsim::nfv
