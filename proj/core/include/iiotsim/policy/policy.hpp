#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "iiotsim/flow.hpp"
#include "iiotsim/net/topology.hpp"
#include "iiotsim/sim/time.hpp"

namespace iiotsim::policy {

using sim::SimTime;

enum class PrincipalKind { HumanUser, Service, Device };

const char* principal_kind_name(PrincipalKind k);

struct DeviceProfile {
  int expected_segment = 0;
  TrafficClass default_class = TrafficClass::Guaranteed;
};

struct Principal {
  int id = 0;
  std::string name;
  PrincipalKind kind = PrincipalKind::Service;
  std::set<std::string> roles;
  std::string credential;                 // opaque token, exact-match checked
  std::optional<DeviceProfile> profile;   // required for Devices
};

// What a role may reach. A destination is permitted when its host id or its
// segment is listed.
struct RolePermission {
  std::set<int> segments;
  std::set<int> hosts;
};

struct SegmentRule {
  int from = 0;
  int to = 0;
  std::optional<TrafficClass> tclass;     // absent = any
  bool allow = false;
  bool require_firewall = false;
};

// Ordered, first-match-wins; an implicit deny-everything rule is always
// last.
struct SegmentPolicy {
  std::vector<SegmentRule> rules;
};

enum class EntryKind { InternalPort, Vpn };

struct SessionEntry {
  EntryKind kind = EntryKind::InternalPort;
  net::PortRef port;                      // InternalPort
  int gateway_instance = 0;               // Vpn
};

struct Session {
  int id = 0;
  int principal = 0;
  std::set<std::string> roles;
  SimTime established_at = 0;
  SimTime expiry = 0;
  SessionEntry entry;

  bool valid_at(SimTime now) const { return now < expiry; }
};

struct Verdict {
  bool allow = false;
  bool require_firewall = false;
};

// Two artifacts compiled from one SegmentPolicy: per-transition rule lists
// evaluated by firewall instances, and the full ordered list evaluated as
// an admission predicate. The harness checks that both always agree.
struct CompiledPolicy {
  std::map<std::pair<int, int>, std::vector<SegmentRule>> transition_rules;
  std::vector<SegmentRule> ordered_rules;

  Verdict firewall_verdict(int from, int to, TrafficClass c) const;
  Verdict predicate(int from, int to, TrafficClass c) const;
};

struct AuthzResult {
  bool allowed = false;
  bool require_firewall = false;
  std::string reason;                     // set when denied
};

class PolicyEngine {
public:
  void add_principal(Principal p);
  void set_role_permission(const std::string& role, RolePermission perm);
  void set_segment_policy(SegmentPolicy p) { segment_policy_ = std::move(p); }
  void set_session_ttl(SimTime ttl) { session_ttl_ = ttl; }
  SimTime session_ttl() const { return session_ttl_; }

  bool principal_known(int id) const { return principals_.count(id) != 0; }
  const Principal& principal(int id) const;
  const std::map<int, Principal>& principals() const { return principals_; }
  const SegmentPolicy& segment_policy() const { return segment_policy_; }
  const std::map<std::string, RolePermission>& role_permissions() const { return role_perms_; }

  bool check_credential(int principal, std::string_view credential) const;

  Session& create_session(int principal, SessionEntry entry, SimTime now);
  const Session* session(int session_id) const;
  // Most recent unexpired session of a principal, if any.
  const Session* active_session_for(int principal, SimTime now) const;

  // Role check on the destination plus segment-policy check on the
  // transition; expired sessions and quarantined sources deny.
  AuthzResult authorize_flow(const Session& s, const FlowIntent& intent,
                             const net::Topology& topo, const CompiledPolicy& compiled,
                             SimTime now) const;

  // Pure translation of the segment policy; throws UnknownSegment when a
  // rule references a segment the topology does not declare.
  CompiledPolicy compile(const net::Topology& topo) const;

private:
  std::map<int, Principal> principals_;
  std::map<std::string, RolePermission> role_perms_;
  SegmentPolicy segment_policy_;
  std::map<int, Session> sessions_;
  int next_session_ = 1;
  SimTime session_ttl_ = 60 * sim::kSecond;
};

// Segment of a node's lowest-numbered segmented port (hosts have one port).
std::optional<int> segment_of_node(const net::Topology& topo, int node_id);

} // namespace iiotsim::policy
