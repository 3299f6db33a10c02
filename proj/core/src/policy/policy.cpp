#include "iiotsim/policy/policy.hpp"

#include <algorithm>

#include "iiotsim/sim/error.hpp"

namespace iiotsim::policy {

using iiotsim::Errc;
using iiotsim::Error;

const char* principal_kind_name(PrincipalKind k) {
  switch (k) {
    case PrincipalKind::HumanUser: return "human";
    case PrincipalKind::Service: return "service";
    case PrincipalKind::Device: return "device";
  }
  return "?";
}

namespace {

Verdict eval_rules(const std::vector<SegmentRule>& rules, int from, int to, TrafficClass c) {
  for (const auto& r : rules) {
    if (r.from != from || r.to != to) continue;
    if (r.tclass && *r.tclass != c) continue;
    return {r.allow, r.require_firewall};
  }
  return {false, false}; // implicit default deny
}

} // namespace

Verdict CompiledPolicy::firewall_verdict(int from, int to, TrafficClass c) const {
  auto it = transition_rules.find({from, to});
  if (it == transition_rules.end()) return {false, false};
  return eval_rules(it->second, from, to, c);
}

Verdict CompiledPolicy::predicate(int from, int to, TrafficClass c) const {
  return eval_rules(ordered_rules, from, to, c);
}

void PolicyEngine::add_principal(Principal p) {
  if (principals_.count(p.id)) throw Error(Errc::DuplicateId, "principal " + std::to_string(p.id));
  if (p.credential.empty())
    throw Error(Errc::ValidationError, "principal " + std::to_string(p.id) + " without credential");
  if (p.kind == PrincipalKind::Device && !p.profile)
    throw Error(Errc::ValidationError,
                "device principal " + std::to_string(p.id) + " without device profile");
  if (p.name.empty()) p.name = "p" + std::to_string(p.id);
  principals_.emplace(p.id, std::move(p));
}

void PolicyEngine::set_role_permission(const std::string& role, RolePermission perm) {
  role_perms_[role] = std::move(perm);
}

const Principal& PolicyEngine::principal(int id) const {
  auto it = principals_.find(id);
  if (it == principals_.end()) throw Error(Errc::UnknownPrincipal, std::to_string(id));
  return it->second;
}

bool PolicyEngine::check_credential(int id, std::string_view credential) const {
  return principal(id).credential == credential;
}

Session& PolicyEngine::create_session(int principal_id, SessionEntry entry, SimTime now) {
  const Principal& p = principal(principal_id);
  Session s;
  s.id = next_session_++;
  s.principal = principal_id;
  s.roles = p.roles;
  s.established_at = now;
  s.expiry = now + session_ttl_;
  s.entry = entry;
  auto [it, ok] = sessions_.emplace(s.id, std::move(s));
  return it->second;
}

const Session* PolicyEngine::session(int session_id) const {
  auto it = sessions_.find(session_id);
  return it == sessions_.end() ? nullptr : &it->second;
}

const Session* PolicyEngine::active_session_for(int principal_id, SimTime now) const {
  const Session* best = nullptr;
  for (const auto& [id, s] : sessions_) {
    if (s.principal != principal_id || !s.valid_at(now)) continue;
    if (!best || s.established_at >= best->established_at) best = &s;
  }
  return best;
}

AuthzResult PolicyEngine::authorize_flow(const Session& s, const FlowIntent& intent,
                                         const net::Topology& topo,
                                         const CompiledPolicy& compiled, SimTime now) const {
  if (!s.valid_at(now)) return {false, false, "session-expired"};

  auto src_seg = segment_of_node(topo, intent.src);
  auto dst_seg = segment_of_node(topo, intent.dst);
  if (!src_seg || !dst_seg) return {false, false, "unsegmented-endpoint"};
  if (*src_seg == net::kQuarantineVlan || *dst_seg == net::kQuarantineVlan)
    return {false, false, "quarantine"};

  bool role_ok = false;
  for (const auto& role : s.roles) {
    auto it = role_perms_.find(role);
    if (it == role_perms_.end()) continue;
    if (it->second.hosts.count(intent.dst) || it->second.segments.count(*dst_seg)) {
      role_ok = true;
      break;
    }
  }
  if (!role_ok) return {false, false, "role"};

  if (*src_seg == *dst_seg) return {true, false, ""}; // policy governs transitions only

  Verdict v = compiled.predicate(*src_seg, *dst_seg, intent.tclass);
  if (!v.allow) return {false, false, "segment-policy"};
  return {true, true, ""};
}

CompiledPolicy PolicyEngine::compile(const net::Topology& topo) const {
  CompiledPolicy out;
  for (const auto& r : segment_policy_.rules) {
    for (int vlan : {r.from, r.to}) {
      if (!topo.has_segment(vlan))
        throw Error(Errc::UnknownSegment, "segment policy references vlan " + std::to_string(vlan));
    }
    out.transition_rules[{r.from, r.to}].push_back(r);
    out.ordered_rules.push_back(r);
  }
  return out;
}

std::optional<int> segment_of_node(const net::Topology& topo, int node_id) {
  // Segment membership lives on the access-switch port (802.1X semantics):
  // follow the node's Up link and look up the far port, falling back to the
  // node's own ports for directly segmented gear.
  const net::Node& n = topo.node(node_id);
  std::vector<int> ports = n.ports;
  std::sort(ports.begin(), ports.end());
  for (int p : ports) {
    auto lid = topo.link_at({node_id, p});
    if (!lid || topo.link(*lid).state != net::LinkState::Up) continue;
    auto seg = topo.segment_of(topo.link(*lid).far(node_id));
    if (seg) return seg;
  }
  for (int p : ports) {
    auto seg = topo.segment_of({node_id, p});
    if (seg) return seg;
  }
  return std::nullopt;
}

} // namespace iiotsim::policy
