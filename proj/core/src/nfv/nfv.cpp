#include "iiotsim/nfv/nfv.hpp"

#include <algorithm>

#include "iiotsim/net/packet.hpp"
#include "iiotsim/sim/error.hpp"

namespace iiotsim::nfv {

using iiotsim::Errc;
using iiotsim::Error;
using sim::Kv;

const char* vnf_kind_name(VnfKind k) {
  switch (k) {
    case VnfKind::Firewall: return "firewall";
    case VnfKind::VpnGateway: return "vpn-gateway";
    case VnfKind::Authenticator: return "authenticator";
    case VnfKind::TrafficMonitor: return "traffic-monitor";
  }
  return "?";
}

std::optional<VnfKind> vnf_kind_from(std::string_view s) {
  if (s == "firewall") return VnfKind::Firewall;
  if (s == "vpn-gateway") return VnfKind::VpnGateway;
  if (s == "authenticator") return VnfKind::Authenticator;
  if (s == "traffic-monitor") return VnfKind::TrafficMonitor;
  return std::nullopt;
}

const char* vnf_state_name(VnfState s) {
  switch (s) {
    case VnfState::Booting: return "booting";
    case VnfState::Running: return "running";
    case VnfState::Migrating: return "migrating";
    case VnfState::Failed: return "failed";
  }
  return "?";
}

namespace {
const std::string kEmitter = "nfv";
}

void NfvManager::register_host(int node_id) {
  const net::Node& n = topo_.node(node_id);
  if (n.kind != net::NodeKind::NfvHost)
    throw Error(Errc::ValidationError, "node " + std::to_string(node_id) + " is not an NFV host");
  if (hosts_.count(node_id)) throw Error(Errc::DuplicateId, "host " + std::to_string(node_id));
  hosts_[node_id] = HostState{node_id, n.cpu_capacity, n.mem_capacity, 0, 0, false};
}

std::optional<int> NfvManager::first_fit(const VnfDescriptor& d,
                                         std::optional<int> constraint) const {
  for (const auto& [id, h] : hosts_) {
    if (constraint && id != *constraint) continue;
    if (h.failed) continue;
    if (h.cpu_used + d.cpu_demand <= h.cpu_capacity && h.mem_used + d.mem_demand <= h.mem_capacity)
      return id;
  }
  return std::nullopt;
}

int NfvManager::instantiate(const VnfDescriptor& desc, std::optional<int> host_constraint,
                            std::set<Transition> transitions, std::set<std::string> access_tags,
                            std::function<void(int)> on_running) {
  if (desc.cpu_demand <= 0 || desc.mem_demand <= 0 || desc.processing_delay_us < 0)
    throw Error(Errc::ValidationError, "bad descriptor " + desc.name);
  auto host = first_fit(desc, host_constraint);
  if (!host) throw Error(Errc::NoCapacity, "no host fits " + desc.name);

  HostState& h = hosts_.at(*host);
  h.cpu_used += desc.cpu_demand;
  h.mem_used += desc.mem_demand;

  VnfInstance inst;
  inst.id = next_id_++;
  inst.name = desc.name + "#" + std::to_string(inst.id);
  inst.desc = desc;
  inst.host = *host;
  inst.state = VnfState::Booting;
  inst.transitions = std::move(transitions);
  inst.access_tags = std::move(access_tags);
  int id = inst.id;
  instances_.emplace(id, std::move(inst));

  eng_.emit(kEmitter, "vnf-instantiated",
            {Kv{"instance", id}, Kv{"kind", vnf_kind_name(desc.kind)}, Kv{"host", *host}});
  eng_.schedule(eng_.now() + cfg_.vnf_boot_us, sim::EventKind::VnfTimer,
                [this, id, cb = std::move(on_running)] {
                  auto it = instances_.find(id);
                  if (it == instances_.end() || it->second.state != VnfState::Booting) return;
                  it->second.state = VnfState::Running;
                  eng_.emit(kEmitter, "vnf-running", {Kv{"instance", id}});
                  if (cb) cb(id);
                });
  return id;
}

const VnfInstance& NfvManager::instance(int id) const {
  auto it = instances_.find(id);
  if (it == instances_.end()) throw Error(Errc::UnknownInstance, std::to_string(id));
  return it->second;
}

bool NfvManager::host_failed(int node_id) const {
  auto it = hosts_.find(node_id);
  return it != hosts_.end() && it->second.failed;
}

bool NfvManager::running(int id) const {
  auto it = instances_.find(id);
  return it != instances_.end() && it->second.state == VnfState::Running;
}

std::optional<int> NfvManager::instance_for_transition(Transition t) const {
  for (const auto& [id, inst] : instances_) {
    if (inst.state == VnfState::Failed) continue;
    if (inst.transitions.count(t)) return id;
  }
  return std::nullopt;
}

std::optional<int> NfvManager::by_tag(const std::string& tag) const {
  for (const auto& [id, inst] : instances_) {
    if (inst.state == VnfState::Failed) continue;
    if (inst.access_tags.count(tag)) return id;
  }
  return std::nullopt;
}

std::optional<int> NfvManager::by_name(const std::string& name) const {
  for (const auto& [id, inst] : instances_) {
    if (inst.name == name || inst.desc.name == name) return id;
  }
  return std::nullopt;
}

std::vector<int> NfvManager::instances_on(int host) const {
  std::vector<int> out;
  for (const auto& [id, inst] : instances_) {
    if (inst.host == host && inst.state != VnfState::Failed) out.push_back(id);
  }
  return out;
}

TraverseResult NfvManager::traverse(int instance_id, const net::Packet& pkt,
                                    const TraverseContext& ctx) {
  const VnfInstance& inst = instance(instance_id);
  if (inst.state != VnfState::Running)
    return {TraverseResult::Act::Drop, "instance-not-running", 0};

  TraverseResult out;
  out.delay_us = inst.desc.processing_delay_us;
  switch (inst.desc.kind) {
    case VnfKind::Firewall: {
      policy::Verdict v =
          ctx.compiled->firewall_verdict(pkt.vlan, ctx.dst_segment, pkt.tclass);
      eng_.emit(kEmitter, "vnf-traversed",
                {Kv{"instance", instance_id}, Kv{"kind", "firewall"},
                 Kv{"verdict", v.allow ? "allow" : "deny"}, Kv{"flow", pkt.flow},
                 Kv{"seq", pkt.seq}, Kv{"attempt", pkt.attempt}});
      if (!v.allow) {
        out.act = TraverseResult::Act::Drop;
        out.drop_reason = "firewall-deny";
      }
      return out;
    }
    case VnfKind::VpnGateway: {
      bool ok = ctx.vpn_session_ok;
      eng_.emit(kEmitter, "vnf-traversed",
                {Kv{"instance", instance_id}, Kv{"kind", "vpn-gateway"},
                 Kv{"verdict", ok ? "allow" : "deny"}, Kv{"flow", pkt.flow},
                 Kv{"seq", pkt.seq}, Kv{"attempt", pkt.attempt}});
      if (!ok) {
        out.act = TraverseResult::Act::Drop;
        out.drop_reason = "vpn-no-session";
      }
      return out;
    }
    case VnfKind::Authenticator:
      eng_.emit(kEmitter, "vnf-traversed",
                {Kv{"instance", instance_id}, Kv{"kind", "authenticator"},
                 Kv{"verdict", "allow"}, Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq},
                 Kv{"attempt", pkt.attempt}});
      return out;
    case VnfKind::TrafficMonitor:
      eng_.emit(kEmitter, "vnf-traversed",
                {Kv{"instance", instance_id}, Kv{"kind", "traffic-monitor"},
                 Kv{"verdict", "allow"}, Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq},
                 Kv{"attempt", pkt.attempt}});
      eng_.emit(kEmitter, "flow-stats",
                {Kv{"instance", instance_id}, Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq},
                 Kv{"bytes", pkt.size_bytes}});
      return out;
  }
  return out;
}

MigrationReport NfvManager::fail_host(int node_id, const std::function<void(int)>& on_remigrated) {
  auto hit = hosts_.find(node_id);
  if (hit == hosts_.end()) throw Error(Errc::UnknownNode, std::to_string(node_id));
  hit->second.failed = true;
  eng_.emit(kEmitter, "nfv-host-failed", {Kv{"host", node_id}});

  MigrationReport report;
  for (auto& [id, inst] : instances_) {
    if (inst.host != node_id || inst.state == VnfState::Failed) continue;
    auto target = first_fit(inst.desc, std::nullopt);
    if (!target) {
      inst.state = VnfState::Failed;
      eng_.emit(kEmitter, "vnf-failed", {Kv{"instance", id}});
      for (const Transition& t : inst.transitions)
        eng_.emit(kEmitter, "transition-closed", {Kv{"from", t.from}, Kv{"to", t.to}});
      report.unplaced.push_back(id);
      continue;
    }
    HostState& dst = hosts_.at(*target);
    dst.cpu_used += inst.desc.cpu_demand;
    dst.mem_used += inst.desc.mem_demand;
    int old_host = inst.host;
    inst.host = *target;
    inst.state = VnfState::Migrating;
    eng_.emit(kEmitter, "vnf-migrating",
              {Kv{"instance", id}, Kv{"from", old_host}, Kv{"to", *target}});
    int iid = id;
    eng_.schedule(eng_.now() + cfg_.vnf_migration_us, sim::EventKind::VnfTimer,
                  [this, iid, on_remigrated] {
                    auto it = instances_.find(iid);
                    if (it == instances_.end() || it->second.state != VnfState::Migrating) return;
                    it->second.state = VnfState::Running;
                    eng_.emit(kEmitter, "vnf-migrated",
                              {Kv{"instance", iid}, Kv{"host", it->second.host}});
                    if (on_remigrated) on_remigrated(iid);
                  });
    report.migrated.push_back(id);
  }
  return report;
}

bool NfvManager::capacity_consistent() const {
  for (const auto& [id, h] : hosts_) {
    if (h.cpu_used < 0 || h.mem_used < 0) return false;
    if (h.cpu_used > h.cpu_capacity || h.mem_used > h.mem_capacity) return false;
  }
  return true;
}

} // namespace iiotsim::nfv
