#include "iiotsim/harness/scenario.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "iiotsim/simulation.hpp"

namespace iiotsim::harness {

const FlowSpec* Scenario::find_flow(std::int64_t id) const {
  for (const auto& f : flows)
    if (f.id == id) return &f;
  return nullptr;
}

const net::Node* Scenario::find_node(int id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

namespace {

bool legacy_region_acyclic(const net::Topology& topo) {
  // Union-find over legacy switches; a legacy-legacy link closing a cycle
  // would make flooding storm.
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [id, n] : topo.nodes())
    if (n.kind == net::NodeKind::LegacySwitch) parent[id] = id;
  for (const auto& [lid, l] : topo.links()) {
    const auto& a = topo.node(l.a.node);
    const auto& b = topo.node(l.b.node);
    if (a.kind != net::NodeKind::LegacySwitch || b.kind != net::NodeKind::LegacySwitch) continue;
    int ra = find(a.id), rb = find(b.id);
    if (ra == rb) return false;
    parent[ra] = rb;
  }
  return true;
}

} // namespace

std::vector<std::string> validate(const Scenario& scn) {
  std::vector<std::string> diags;
  auto complain = [&](const std::string& msg) { diags.push_back(msg); };

  if (scn.name.empty()) complain("scenario: missing name");
  if (scn.duration_us <= 0) complain("scenario: duration must be positive");

  std::set<int> node_ids;
  for (const auto& n : scn.nodes) {
    if (!node_ids.insert(n.id).second)
      complain("nodes: duplicate id " + std::to_string(n.id));
    if (n.kind == net::NodeKind::NfvHost && (n.cpu_capacity <= 0 || n.mem_capacity <= 0))
      complain("nodes: nfv-host " + std::to_string(n.id) + " needs cpu/mem capacity");
  }
  for (const auto& s : scn.segments) {
    if (s.vlan == net::kQuarantineVlan)
      complain("segments: vlan 4094 is reserved for quarantine");
  }
  std::set<int> principal_ids;
  for (const auto& p : scn.principals) {
    principal_ids.insert(p.id);
    for (const auto& r : p.roles)
      if (!scn.roles.count(r))
        complain("principals: " + std::to_string(p.id) + " references unknown role " + r);
    if (p.kind == policy::PrincipalKind::Device && !p.profile)
      complain("principals: device " + std::to_string(p.id) + " needs a device profile");
  }
  for (const auto& r : scn.segment_rules) {
    if (r.allow && r.from != r.to && !r.require_firewall)
      complain("policy: cross-segment allow " + std::to_string(r.from) + ">" +
               std::to_string(r.to) + " must require a firewall");
  }

  std::set<std::int64_t> flow_ids;
  for (const auto& f : scn.flows) {
    if (!flow_ids.insert(f.id).second)
      complain("flows: duplicate id " + std::to_string(f.id));
    if (!node_ids.count(f.src) || !node_ids.count(f.dst))
      complain("flows: " + std::to_string(f.id) + " references unknown endpoint");
    if (f.src == f.dst) complain("flows: " + std::to_string(f.id) + " has src == dst");
    if (f.tclass == TrafficClass::TimeCritical && !f.latency_bound_us)
      complain("flows: time-critical flow " + std::to_string(f.id) + " needs latency-bound");
    if (!principal_ids.count(f.principal))
      complain("flows: " + std::to_string(f.id) + " references unknown principal");
  }
  std::set<std::string> instance_names;
  for (const auto& i : scn.instances) {
    instance_names.insert(i.name);
    if (!scn.descriptors.count(i.descriptor))
      complain("nfv: instance " + i.name + " references unknown descriptor " + i.descriptor);
    if (i.host && !node_ids.count(*i.host))
      complain("nfv: instance " + i.name + " placed on unknown host");
  }
  for (const auto& ev : scn.events) {
    using K = EventSpec::Kind;
    switch (ev.kind) {
      case K::PlugIn:
      case K::Unplug:
      case K::FailNfvHost:
        if (!node_ids.count(ev.host)) complain("events: unknown host " + std::to_string(ev.host));
        break;
      case K::RequestFlow:
      case K::TeardownFlow:
      case K::Tamper:
        if (!flow_ids.count(ev.flow)) complain("events: unknown flow " + std::to_string(ev.flow));
        break;
      case K::RebindFlow:
        if (!flow_ids.count(ev.flow)) complain("events: unknown flow " + std::to_string(ev.flow));
        if (!node_ids.count(ev.new_dst))
          complain("events: rebind to unknown host " + std::to_string(ev.new_dst));
        break;
      case K::Authenticate:
        if (!principal_ids.count(ev.principal))
          complain("events: unknown principal " + std::to_string(ev.principal));
        if (ev.entry.rfind("vpn:", 0) == 0 && !instance_names.count(ev.entry.substr(4)))
          complain("events: unknown vpn gateway instance " + ev.entry.substr(4));
        break;
      case K::RegisterApp:
        if (!ctrl::make_builtin_app(ev.app)) complain("events: unknown app " + ev.app);
        break;
      case K::Instantiate:
        if (!instance_names.count(ev.instance))
          complain("events: unknown instance " + ev.instance);
        break;
      default:
        break;
    }
  }

  if (!diags.empty()) return diags;

  // Structural build: topology, hierarchy, policy compile all throw with
  // the offending field named.
  try {
    Simulation sim(scn);
    if (!legacy_region_acyclic(sim.topology()))
      complain("topology: legacy region contains a cycle (flooding would storm)");
    for (auto [a, b] : scn.checks.redundant_pairs) {
      int count = sim.topology().disjoint_path_count(a, b);
      if (count < 2)
        complain("checks: declared-redundant pair " + std::to_string(a) + "," +
                 std::to_string(b) + " has only " + std::to_string(count) +
                 " disjoint paths");
    }
  } catch (const Error& e) {
    complain(e.what());
  } catch (const std::exception& e) {
    complain(std::string("build: ") + e.what());
  }
  return diags;
}

} // namespace iiotsim::harness
