#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iiotsim/sim/error.hpp"
#include "iiotsim/sim/time.hpp"

namespace iiotsim::net {

using sim::SimTime;

enum class NodeKind { SdnSwitch, LegacySwitch, Host, NfvHost };
enum class Region { Sdn, Legacy };
enum class LinkState { Up, Down };

const char* node_kind_name(NodeKind k);

struct PortRef {
  int node = 0;
  int port = 0;
  auto operator<=>(const PortRef&) const = default;
};

struct Node {
  int id = 0;
  NodeKind kind = NodeKind::Host;
  Region region = Region::Sdn;
  std::vector<int> ports;
  std::string name;                 // trace emitter name; defaults to n<id>
  int cpu_capacity = 0;             // NfvHost only
  int mem_capacity = 0;             // NfvHost only
  std::set<int> gateway_ports;      // SdnSwitch ports that face a legacy region

  bool has_port(int p) const;
};

struct Link {
  int id = 0;
  PortRef a;
  PortRef b;
  std::int64_t latency_us = 1;
  std::int64_t bandwidth_kbps = 1;
  std::int64_t jitter_bound_us = 0;
  LinkState state = LinkState::Up;

  PortRef far(int node) const { return a.node == node ? b : a; }
  PortRef near(int node) const { return a.node == node ? a : b; }
  bool touches(int node) const { return a.node == node || b.node == node; }
};

// Reserved VLAN for unauthenticated device ports.
inline constexpr int kQuarantineVlan = 4094;

struct Segment {
  int vlan = 0;                     // 1..4094, 4094 reserved for quarantine
  std::string name;
  int security_level = 0;           // 0..3
  std::set<PortRef> members;
};

struct PathHop {
  int link = 0;
  int from_node = 0;
  int from_port = 0;
  int to_node = 0;
  int to_port = 0;
};

struct Path {
  std::vector<int> nodes;           // src .. dst, hosts included
  std::vector<PathHop> hops;        // nodes.size() - 1 entries
  std::int64_t total_latency_us = 0;

  bool empty() const { return nodes.empty(); }
  bool uses_link(int link_id) const;
  std::string format() const;       // "10-3-1-11"
};

enum class PathMetric { Latency };

// Residual capacity available on a link when traversed from `from_node`.
// Defaults to the full configured bandwidth when no function is supplied.
using ResidualFn = std::function<std::int64_t(const Link&, int from_node)>;

// Extra per-link weight used by the latency-constrained search (worst-case
// blocking plus jitter, supplied by admission control).
using LinkWeightFn = std::function<std::int64_t(const Link&)>;

struct ConstrainedPath {
  Path path;
  std::int64_t worst_case_us = 0;   // latency + extra weight summed over hops
};

// The network model: nodes, links, segments, plus the graph queries used by
// routing and the redundancy checks. Mutated only from the simulation
// context; query methods are const and side-effect free.
class Topology {
public:
  int add_node(Node node);
  int add_link(Link link);
  void add_segment(Segment seg);

  LinkState set_link_state(int link_id, LinkState state);

  bool has_node(int id) const { return nodes_.count(id) != 0; }
  const Node& node(int id) const;
  const Link& link(int id) const;
  const Segment& segment(int vlan) const;
  bool has_segment(int vlan) const { return segments_.count(vlan) != 0; }

  const std::map<int, Node>& nodes() const { return nodes_; }
  const std::map<int, Link>& links() const { return links_; }
  const std::map<int, Segment>& segments() const { return segments_; }

  std::optional<int> link_at(PortRef p) const;
  std::optional<int> segment_of(PortRef p) const;

  // Moves a port between segments (802.1X re-homing). Removes the port from
  // every segment, then adds it to `vlan` (0 = leave unassigned).
  void assign_port_segment(PortRef p, int vlan);

  void assign_controller(int node_id, int controller_id);
  std::optional<int> controller_of(int node_id) const;
  const std::map<int, int>& controller_assignment() const { return controller_assignment_; }

  std::uint64_t revision() const { return revision_; }

  // Minimum-total-latency path over Up links whose residual bandwidth (per
  // traversal direction) covers `demand_kbps`. Deterministic tie-break:
  // lexicographically smallest node-id sequence. Empty optional when no
  // feasible path exists.
  std::optional<Path> shortest_feasible_path(int src, int dst, std::int64_t demand_kbps,
                                             const ResidualFn& residual = {},
                                             PathMetric metric = PathMetric::Latency) const;

  // Pareto frontier of (latency, latency+extra) over feasible simple paths;
  // used for latency-bounded admission. Sorted by (latency, worst, nodes).
  std::vector<ConstrainedPath> pareto_paths(int src, int dst, std::int64_t demand_kbps,
                                            const ResidualFn& residual,
                                            const LinkWeightFn& extra_weight) const;

  // Number of pairwise link-disjoint paths between a and b over Up links
  // (max-flow with unit link capacities). 0 when disconnected.
  int disjoint_path_count(int a, int b) const;

  bool connected(int a, int b) const;

  // Validates the returned path shape: Up links, consecutive adjacency, no
  // repeated (node, in-flight direction) pair beyond what in_port rules
  // disambiguate. Used by admission when checking app proposals.
  bool path_valid(const Path& p, std::int64_t demand_kbps, const ResidualFn& residual) const;

  // Builds a Path from a node-id sequence, selecting for each consecutive
  // pair the feasible Up link with minimum latency (tie: lowest link id).
  std::optional<Path> path_from_nodes(const std::vector<int>& nodes, std::int64_t demand_kbps,
                                      const ResidualFn& residual) const;

private:
  std::map<int, Node> nodes_;
  std::map<int, Link> links_;
  std::map<int, Segment> segments_;
  std::map<PortRef, int> port_link_;
  std::map<int, int> controller_assignment_;
  std::uint64_t revision_ = 0;

  std::int64_t residual_or_cap(const ResidualFn& fn, const Link& l, int from) const {
    return fn ? fn(l, from) : l.bandwidth_kbps;
  }
};

} // namespace iiotsim::net
