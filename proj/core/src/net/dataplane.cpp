#include "iiotsim/net/dataplane.hpp"

#include <algorithm>
#include <cassert>

#include "iiotsim/sim/error.hpp"

namespace iiotsim::net {

using iiotsim::Errc;
using iiotsim::Error;
using sim::EventKind;
using sim::Kv;

const char* traffic_class_short(TrafficClass c) {
  switch (c) {
    case TrafficClass::TimeCritical: return "tc";
    case TrafficClass::Guaranteed: return "guaranteed";
    case TrafficClass::BestEffort: return "be";
  }
  return "?";
}

int Match::specificity() const {
  int n = 0;
  n += in_port.has_value();
  n += src.has_value();
  n += dst.has_value();
  n += vlan.has_value();
  n += tclass.has_value();
  return n;
}

bool Match::matches(int in_port_arg, const Packet& pkt) const {
  if (in_port && *in_port != in_port_arg) return false;
  if (src && *src != pkt.src) return false;
  if (dst && *dst != pkt.dst) return false;
  if (vlan && *vlan != pkt.vlan) return false;
  if (tclass && *tclass != pkt.tclass) return false;
  return true;
}

namespace {

std::uint64_t base_payload_tag(std::int64_t flow, std::int64_t seq) {
  std::uint64_t z = static_cast<std::uint64_t>(flow) * 0x9E3779B97F4A7C15ull +
                    static_cast<std::uint64_t>(seq) * 2 + 1;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  return z ^ (z >> 31);
}

void validate_actions(const FlowRule& r) {
  int forwards = 0;
  bool to_ctrl = false;
  for (const auto& a : r.actions) {
    if (a.kind == Action::Kind::ForwardPort) ++forwards;
    if (a.kind == Action::Kind::ToController) to_ctrl = true;
  }
  if (forwards > 1)
    throw Error(Errc::ValidationError, "rule " + std::to_string(r.id) + " has two ForwardPort");
  if (forwards > 0 && to_ctrl)
    throw Error(Errc::ValidationError,
                "rule " + std::to_string(r.id) + " mixes ForwardPort and ToController");
}

} // namespace

SwitchFabric::SwitchFabric(sim::Engine& eng, Topology& topo, nfv::NfvManager& nfv,
                           const Config& cfg)
    : eng_(eng), topo_(topo), nfv_(nfv), cfg_(cfg) {}

SwitchFabric::SwitchState& SwitchFabric::sdn_state(int switch_id) {
  const Node& n = topo_.node(switch_id);
  if (n.kind != NodeKind::SdnSwitch)
    throw Error(Errc::UnknownSwitch, std::to_string(switch_id) + " is not an SDN switch");
  return sdn_[switch_id];
}

int SwitchFabric::queue_index(const Node& n, const Packet& pkt,
                              std::optional<int> override_q) const {
  // Legacy gear has a single FIFO and no prioritization; everything in the
  // SDN region (switches, host NICs, NFV hosts) schedules by class.
  if (n.kind == NodeKind::LegacySwitch || n.region == Region::Legacy) return 0;
  if (override_q) return std::clamp(*override_q, 0, 2);
  switch (pkt.tclass) {
    case TrafficClass::TimeCritical: return 0;
    case TrafficClass::Guaranteed: return 1;
    case TrafficClass::BestEffort: return 2;
  }
  return 2;
}

std::optional<int> SwitchFabric::access_port(int host) const {
  const Node& n = topo_.node(host);
  std::vector<int> ports = n.ports;
  std::sort(ports.begin(), ports.end());
  for (int p : ports) {
    auto lid = topo_.link_at({host, p});
    if (lid && topo_.link(*lid).state == LinkState::Up) return p;
  }
  return std::nullopt;
}

void SwitchFabric::observe(QueueEvent::What what, int node, int port, const Packet& pkt) {
  if (!observer_) return;
  observer_(QueueEvent{eng_.now(), node, port, what, pkt.tclass, pkt.flow, pkt.seq});
}

void SwitchFabric::drop(int node, const Packet& pkt, const std::string& reason) {
  if (pkt.purpose == PacketPurpose::Auth) return; // auth frames are control traffic
  eng_.emit(node_name(node), "packet-dropped",
            {Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq}, Kv{"attempt", pkt.attempt},
             Kv{"reason", reason}});
}

void SwitchFabric::inject(Packet pkt) {
  pkt.txi = next_txi_[pkt.flow]++;
  pkt.created_at = eng_.now();
  pkt.hops = 0;
  pkt.hop_links.clear();
  auto seg = policy::segment_of_node(topo_, pkt.src);
  pkt.vlan = seg.value_or(0);
  pkt.payload_tag = base_payload_tag(pkt.flow, pkt.seq);
  pkt.checksum = packet_checksum(pkt.payload_tag, pkt.flow, pkt.seq);
  pkt.tampered = false;
  if (tamper_ && tamper_(pkt)) {
    pkt.payload_tag ^= 1;
    pkt.tampered = true;
    eng_.emit(node_name(pkt.src), "tamper-injected",
              {Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq}, Kv{"attempt", pkt.attempt}});
  }
  eng_.emit(node_name(pkt.src), "packet-injected",
            {Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq}, Kv{"attempt", pkt.attempt},
             Kv{"txi", pkt.txi}, Kv{"src", pkt.src}, Kv{"dst", pkt.dst}, Kv{"vlan", pkt.vlan},
             Kv{"class", traffic_class_short(pkt.tclass)}, Kv{"size", pkt.size_bytes}});
  auto port = access_port(pkt.src);
  if (!port) {
    drop(pkt.src, pkt, "no-link");
    return;
  }
  send_from(pkt.src, *port, std::move(pkt));
}

void SwitchFabric::inject_auth(int host, int principal, const std::string& credential) {
  pending_auth_[host].emplace_back(principal, credential);
  Packet pkt;
  pkt.flow = -static_cast<std::int64_t>(principal);
  pkt.purpose = PacketPurpose::Auth;
  pkt.src = host;
  pkt.dst = host;
  pkt.size_bytes = 64;
  pkt.created_at = eng_.now();
  eng_.emit(node_name(host), "auth-frame", {Kv{"host", host}, Kv{"principal", principal}});
  auto port = access_port(host);
  if (!port) {
    pending_auth_[host].pop_back();
    eng_.emit(node_name(host), "auth-denied",
              {Kv{"principal", principal}, Kv{"reason", "no-link"}});
    return;
  }
  send_from(host, *port, std::move(pkt));
}

void SwitchFabric::send_from(int node, int out_port, Packet pkt,
                             std::optional<int> queue_override) {
  const Node& n = topo_.node(node);
  auto lid = topo_.link_at({node, out_port});
  if (!lid || topo_.link(*lid).state != LinkState::Up) {
    drop(node, pkt, "link-down");
    return;
  }
  if (n.kind == NodeKind::SdnSwitch && n.gateway_ports.count(out_port))
    eng_.emit(node_name(node), "gateway-crossed",
              {Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq}, Kv{"attempt", pkt.attempt},
               Kv{"port", out_port}, Kv{"dir", "out"}});
  Egress& eg = egress_[{node, out_port}];
  int qi = queue_index(n, pkt, queue_override);
  if (static_cast<int>(eg.q[qi].size()) >= cfg_.queue_capacity_packets) {
    drop(node, pkt, "queue-overflow");
    observe(QueueEvent::What::Drop, node, out_port, pkt);
    return;
  }
  observe(QueueEvent::What::Enqueue, node, out_port, pkt);
  eg.q[qi].push_back(std::move(pkt));
  try_start_tx(node, out_port);
}

void SwitchFabric::try_start_tx(int node, int port) {
  Egress& eg = egress_[{node, port}];
  if (eg.busy) return;
  Packet* next = nullptr;
  int qi = 0;
  for (; qi < 3; ++qi) {
    if (!eg.q[qi].empty()) {
      next = &eg.q[qi].front();
      break;
    }
  }
  if (!next) return;

  auto lid = topo_.link_at({node, port});
  if (!lid || topo_.link(*lid).state != LinkState::Up) {
    // Drained on the Down transition; nothing should linger here.
    Packet pkt = std::move(*next);
    eg.q[qi].pop_front();
    drop(node, pkt, "link-down");
    try_start_tx(node, port);
    return;
  }
  const Link& l = topo_.link(*lid);
  Packet pkt = std::move(*next);
  eg.q[qi].pop_front();

  const std::int64_t ser = serialization_us(pkt.size_bytes, l.bandwidth_kbps);
  const std::int64_t jitter = l.jitter_bound_us > 0 ? eng_.rng().uniform(0, l.jitter_bound_us) : 0;
  const sim::SimTime depart = eng_.now() + ser;
  sim::SimTime arrive = depart + l.latency_us + jitter;

  // Links are FIFO wires: a later frame never overtakes an earlier one.
  const bool dir_ab = l.a.node == node;
  auto& last = last_arrival_[{l.id, dir_ab}];
  arrive = std::max(arrive, last);
  last = arrive;

  eg.busy = true;
  observe(QueueEvent::What::TxStart, node, port, pkt);

  eng_.schedule(depart, EventKind::PacketDeparture, [this, node, port, pkt] {
    egress_[{node, port}].busy = false;
    observe(QueueEvent::What::TxEnd, node, port, pkt);
    try_start_tx(node, port);
  });

  PortRef to = l.far(node);
  std::uint64_t token = next_token_++;
  int link_id = l.id;
  sim::EventId ev =
      eng_.schedule(arrive, EventKind::PacketArrival, [this, link_id, to, pkt, token] {
        auto& v = in_flight_[link_id];
        std::erase_if(v, [token](const InFlight& f) { return f.token == token; });
        complete_arrival(link_id, to, pkt);
      });
  in_flight_[l.id].push_back(InFlight{token, ev, pkt});
}

void SwitchFabric::complete_arrival(int link_id, PortRef to, Packet pkt) {
  ++pkt.hops;
  pkt.hop_links.push_back(link_id);
  if (pkt.hops > cfg_.max_hops) {
    drop(to.node, pkt, "hop-limit");
    return;
  }
  const Node& n = topo_.node(to.node);
  switch (n.kind) {
    case NodeKind::Host: host_receive(to.node, std::move(pkt)); break;
    case NodeKind::SdnSwitch: sdn_pipeline(to.node, to.port, std::move(pkt), false); break;
    case NodeKind::LegacySwitch: legacy_forward(to.node, to.port, std::move(pkt)); break;
    case NodeKind::NfvHost: nfv_receive(to.node, to.port, std::move(pkt)); break;
  }
}

void SwitchFabric::host_receive(int host, Packet pkt) {
  if (pkt.purpose == PacketPurpose::Auth) return; // not addressed to hosts
  if (host != pkt.dst) {
    drop(host, pkt, pkt.flood_copy ? "flood-discard" : "wrong-host");
    return;
  }
  if (!checksum_ok(pkt)) {
    eng_.emit(node_name(host), "integrity-nack",
              {Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq}, Kv{"attempt", pkt.attempt}});
    drop(host, pkt, "integrity-reject");
    if (pkt.attempt <= cfg_.retransmit_budget) {
      schedule_retransmit(pkt);
    } else {
      eng_.emit(node_name(host), "integrity-failure",
                {Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq}, Kv{"attempts", pkt.attempt}});
    }
    return;
  }
  auto dst_seg = policy::segment_of_node(topo_, host);
  eng_.emit(node_name(host), "packet-delivered",
            {Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq}, Kv{"attempt", pkt.attempt},
             Kv{"txi", pkt.txi}, Kv{"latency", eng_.now() - pkt.created_at},
             Kv{"vlan", pkt.vlan}, Kv{"dst_segment", dst_seg.value_or(0)},
             Kv{"hops", pkt.hops}});
}

void SwitchFabric::schedule_retransmit(const Packet& bad) {
  // The nack travels back along the delivery path; its latency is the sum of
  // per-link propagation plus nack-frame serialization, no jitter.
  std::int64_t delay = 0;
  for (int lid : bad.hop_links) {
    const Link& l = topo_.link(lid);
    delay += l.latency_us + serialization_us(cfg_.nack_frame_bytes, l.bandwidth_kbps);
  }
  Packet fresh;
  fresh.flow = bad.flow;
  fresh.seq = bad.seq;
  fresh.attempt = bad.attempt + 1;
  fresh.src = bad.src;
  fresh.dst = bad.dst;
  fresh.tclass = bad.tclass;
  fresh.size_bytes = bad.size_bytes;
  eng_.schedule(eng_.now() + delay, EventKind::FlowTimer, [this, fresh] {
    eng_.emit(node_name(fresh.src), "retransmit",
              {Kv{"flow", fresh.flow}, Kv{"seq", fresh.seq}, Kv{"attempt", fresh.attempt}});
    inject(fresh);
  });
}

void SwitchFabric::purge_expired(int switch_id) {
  SwitchState& st = sdn_[switch_id];
  const sim::SimTime now = eng_.now();
  std::erase_if(st.rules, [&](const FlowRule& r) {
    bool hard = r.hard_timeout && now > r.installed_at + *r.hard_timeout;
    bool idle = r.idle_timeout && now > r.last_hit + *r.idle_timeout;
    if (hard || idle)
      eng_.emit(node_name(switch_id), "rule-removed",
                {Kv{"rule", r.id}, Kv{"flow", r.flow_tag},
                 Kv{"reason", hard ? "hard-timeout" : "idle-timeout"}});
    return hard || idle;
  });
}

const FlowRule* SwitchFabric::best_match(SwitchState& st, int in_port, const Packet& pkt) {
  const FlowRule* best = nullptr;
  for (const FlowRule& r : st.rules) {
    if (!r.match.matches(in_port, pkt)) continue;
    if (!best || r.priority > best->priority ||
        (r.priority == best->priority &&
         (r.match.specificity() > best->match.specificity() ||
          (r.match.specificity() == best->match.specificity() && r.id < best->id))))
      best = &r;
  }
  return best;
}

void SwitchFabric::buffer_or_drop(int switch_id, int in_port, Packet pkt, bool held,
                                  bool notify) {
  SwitchState& st = sdn_[switch_id];
  if (static_cast<int>(st.buffer.size()) >= cfg_.miss_buffer_packets) {
    drop(switch_id, pkt, "miss-buffer-full");
    return;
  }
  const std::int64_t flow = pkt.flow;
  st.buffer.push_back(BufEntry{in_port, std::move(pkt), held});
  if (notify && !st.pending_packet_in.count(flow)) {
    st.pending_packet_in.insert(flow);
    const BufEntry& entry = st.buffer.back();
    eng_.emit(node_name(switch_id), "packet-in",
              {Kv{"flow", flow}, Kv{"seq", entry.pkt.seq}, Kv{"port", in_port}});
    Packet copy = entry.pkt;
    eng_.schedule(eng_.now() + cfg_.control_delay_us, EventKind::ControlMessage,
                  [this, switch_id, in_port, copy] {
                    if (hooks_) hooks_->on_packet_in(switch_id, in_port, copy);
                  });
  }
}

void SwitchFabric::sdn_pipeline(int switch_id, int in_port, Packet pkt, bool replay) {
  SwitchState& st = sdn_state(switch_id);
  purge_expired(switch_id);
  const Node& n = topo_.node(switch_id);

  if (!replay) {
    if (n.gateway_ports.count(in_port)) {
      eng_.emit(node_name(switch_id), "gateway-crossed",
                {Kv{"flow", pkt.flow}, Kv{"seq", pkt.seq}, Kv{"attempt", pkt.attempt},
                 Kv{"port", in_port}, Kv{"dir", "in"}});
      auto lid = topo_.link_at({switch_id, in_port});
      if (lid && topo_.node(topo_.link(*lid).far(switch_id).node).region == Region::Legacy)
        pkt.tclass = TrafficClass::BestEffort;
    }

    auto seg = topo_.segment_of({switch_id, in_port});
    if (pkt.purpose == PacketPurpose::Auth) {
      // 802.1X frames are consumed by the access switch and relayed over the
      // control channel; they never enter the forwarding pipeline.
      auto& q = pending_auth_[pkt.src];
      if (q.empty()) return;
      auto [principal, credential] = q.front();
      q.pop_front();
      int host = pkt.src;
      eng_.schedule(eng_.now() + cfg_.control_delay_us, EventKind::ControlMessage,
                    [this, switch_id, in_port, host, principal, credential] {
                      if (hooks_)
                        hooks_->on_auth_request(switch_id, in_port, host, principal, credential);
                    });
      return;
    }
    if (seg && *seg == kQuarantineVlan) {
      drop(switch_id, pkt, "quarantine");
      return;
    }
  }

  if (st.held_flows.count(pkt.flow)) {
    buffer_or_drop(switch_id, in_port, std::move(pkt), true, false);
    return;
  }

  const FlowRule* rule = best_match(st, in_port, pkt);
  if (!rule) {
    if (replay) {
      // A replayed packet that still matches nothing is stale (the flow was
      // re-pointed while it sat buffered); re-buffering would loop.
      drop(switch_id, pkt, "no-route");
      return;
    }
    buffer_or_drop(switch_id, in_port, std::move(pkt), false, true);
    return;
  }

  // Refresh idle timeout on hit.
  const std::int64_t rid = rule->id;
  for (FlowRule& r : st.rules)
    if (r.id == rid) r.last_hit = eng_.now();

  std::optional<int> queue_override;
  for (const Action& a : rule->actions) {
    switch (a.kind) {
      case Action::Kind::SetQueue:
        queue_override = a.arg;
        break;
      case Action::Kind::Drop:
        drop(switch_id, pkt, rule->drop_reason.empty() ? "rule-drop" : rule->drop_reason);
        return;
      case Action::Kind::ToController:
        buffer_or_drop(switch_id, in_port, std::move(pkt), false, true);
        return;
      case Action::Kind::ForwardPort:
        send_from(switch_id, a.arg, std::move(pkt), queue_override);
        return;
    }
  }
  // A rule with no terminal action drops implicitly.
  drop(switch_id, pkt, "no-action");
}

void SwitchFabric::legacy_forward(int switch_id, int in_port, Packet pkt) {
  const Node& n = topo_.node(switch_id);
  if (n.kind != NodeKind::LegacySwitch)
    throw Error(Errc::UnknownSwitch, std::to_string(switch_id) + " is not a legacy switch");
  LegacyState& st = legacy_[switch_id];
  if (pkt.purpose == PacketPurpose::Auth) return; // no 802.1X support on legacy gear
  st.mac[pkt.src] = in_port;

  auto it = st.mac.find(pkt.dst);
  if (it != st.mac.end() && it->second != in_port) {
    send_from(switch_id, it->second, std::move(pkt));
    return;
  }
  // Flood within the packet's segment plus trunk ports toward other
  // switches; no packet-in, no priority queues.
  std::vector<int> ports = n.ports;
  std::sort(ports.begin(), ports.end());
  for (int p : ports) {
    if (p == in_port) continue;
    auto lid = topo_.link_at({switch_id, p});
    if (!lid || topo_.link(*lid).state != LinkState::Up) continue;
    const Node& peer = topo_.node(topo_.link(*lid).far(switch_id).node);
    bool trunk = peer.kind == NodeKind::SdnSwitch || peer.kind == NodeKind::LegacySwitch;
    if (!trunk) {
      auto seg = topo_.segment_of({switch_id, p});
      if (!seg || *seg != pkt.vlan) continue;
    }
    Packet copy = pkt;
    copy.flood_copy = true;
    send_from(switch_id, p, std::move(copy));
  }
}

void SwitchFabric::nfv_receive(int node, int in_port, Packet pkt) {
  if (nfv_.host_failed(node)) {
    drop(node, pkt, "host-failed");
    return;
  }
  auto nit = chains_.find(node);
  if (nit == chains_.end() || !nit->second.count(pkt.flow)) {
    drop(node, pkt, "no-chain");
    return;
  }
  const ChainEntry& chain = nit->second.at(pkt.flow);
  std::int64_t delay = 0;
  for (int inst : chain.instances) {
    nfv::TraverseContext ctx;
    ctx.compiled = compiled_;
    auto dst_seg = policy::segment_of_node(topo_, pkt.dst);
    ctx.dst_segment = dst_seg.value_or(0);
    ctx.vpn_session_ok = vpn_check_ ? vpn_check_(pkt.flow, inst) : false;
    nfv::TraverseResult res = nfv_.traverse(inst, pkt, ctx);
    if (res.act == nfv::TraverseResult::Act::Drop) {
      drop(node, pkt, res.drop_reason);
      return;
    }
    delay += res.delay_us;
  }
  int out_port = chain.out_port;
  if (delay == 0) {
    send_from(node, out_port, std::move(pkt));
    return;
  }
  eng_.schedule(eng_.now() + delay, EventKind::VnfTimer,
                [this, node, out_port, pkt] { send_from(node, out_port, pkt); });
}

std::int64_t SwitchFabric::install_rule(int switch_id, FlowRule rule) {
  SwitchState& st = sdn_state(switch_id);
  purge_expired(switch_id);
  validate_actions(rule);
  if (hooks_ && !hooks_->install_authorized(switch_id, rule.installed_by))
    throw Error(Errc::UnauthorizedController,
                "controller " + std::to_string(rule.installed_by) + " cannot program switch " +
                    std::to_string(switch_id));
  for (const FlowRule& r : st.rules)
    if (r.id == rule.id) throw Error(Errc::DuplicateRuleId, std::to_string(rule.id));

  // Same match+priority from the same flow replaces the previous rule.
  std::erase_if(st.rules, [&](const FlowRule& r) {
    return r.match == rule.match && r.priority == rule.priority && r.flow_tag == rule.flow_tag;
  });

  rule.installed_at = eng_.now();
  rule.last_hit = eng_.now();
  std::int64_t id = rule.id;
  std::int64_t flow = rule.flow_tag;
  eng_.emit(node_name(switch_id), "rule-installed",
            {Kv{"rule", id}, Kv{"flow", flow}, Kv{"by", rule.installed_by},
             Kv{"priority", rule.priority}});
  st.rules.push_back(std::move(rule));

  // Buffered miss packets are re-evaluated against the new table.
  st.pending_packet_in.erase(flow);
  replay_buffered(switch_id, flow);
  return id;
}

void SwitchFabric::replay_buffered(int switch_id, std::int64_t flow) {
  SwitchState& st = sdn_[switch_id];
  std::deque<BufEntry> keep;
  std::vector<BufEntry> ready;
  for (auto& e : st.buffer) {
    if (!e.held && e.pkt.flow == flow)
      ready.push_back(std::move(e));
    else
      keep.push_back(std::move(e));
  }
  st.buffer = std::move(keep);
  for (auto& e : ready) sdn_pipeline(switch_id, e.in_port, std::move(e.pkt), true);
}

void SwitchFabric::remove_rule(int switch_id, std::int64_t rule_id, const std::string& reason) {
  SwitchState& st = sdn_state(switch_id);
  std::erase_if(st.rules, [&](const FlowRule& r) {
    if (r.id != rule_id) return false;
    eng_.emit(node_name(switch_id), "rule-removed",
              {Kv{"rule", r.id}, Kv{"flow", r.flow_tag}, Kv{"reason", reason}});
    return true;
  });
}

void SwitchFabric::remove_flow_rules(int switch_id, std::int64_t flow_tag,
                                     const std::string& reason) {
  SwitchState& st = sdn_state(switch_id);
  std::erase_if(st.rules, [&](const FlowRule& r) {
    if (r.flow_tag != flow_tag) return false;
    eng_.emit(node_name(switch_id), "rule-removed",
              {Kv{"rule", r.id}, Kv{"flow", r.flow_tag}, Kv{"reason", reason}});
    return true;
  });
}

std::vector<FlowRule> SwitchFabric::rules_snapshot(int switch_id) {
  sdn_state(switch_id);
  purge_expired(switch_id);
  return sdn_[switch_id].rules;
}

void SwitchFabric::install_chain(int nfv_node, std::int64_t flow, std::vector<int> instances,
                                 int out_port) {
  if (topo_.node(nfv_node).kind != NodeKind::NfvHost)
    throw Error(Errc::UnknownNode, std::to_string(nfv_node) + " is not an NFV host");
  chains_[nfv_node][flow] = ChainEntry{std::move(instances), out_port};
}

void SwitchFabric::remove_chain(int nfv_node, std::int64_t flow) {
  auto it = chains_.find(nfv_node);
  if (it != chains_.end()) it->second.erase(flow);
}

bool SwitchFabric::has_chain(int nfv_node, std::int64_t flow) const {
  auto it = chains_.find(nfv_node);
  return it != chains_.end() && it->second.count(flow) != 0;
}

void SwitchFabric::hold_flow_at(int switch_id, std::int64_t flow) {
  sdn_state(switch_id).held_flows.insert(flow);
}

void SwitchFabric::release_flow_at(int switch_id, std::int64_t flow) {
  SwitchState& st = sdn_state(switch_id);
  st.held_flows.erase(flow);
  std::deque<BufEntry> keep;
  std::vector<BufEntry> ready;
  for (auto& e : st.buffer) {
    if (e.pkt.flow == flow)
      ready.push_back(std::move(e));
    else
      keep.push_back(std::move(e));
  }
  st.buffer = std::move(keep);
  for (auto& e : ready) sdn_pipeline(switch_id, e.in_port, std::move(e.pkt), true);
}

void SwitchFabric::drop_held(int switch_id, std::int64_t flow, const std::string& reason) {
  SwitchState& st = sdn_state(switch_id);
  st.held_flows.erase(flow);
  std::deque<BufEntry> keep;
  for (auto& e : st.buffer) {
    if (e.pkt.flow == flow)
      drop(switch_id, e.pkt, reason);
    else
      keep.push_back(std::move(e));
  }
  st.buffer = std::move(keep);
}

void SwitchFabric::drop_buffered(int switch_id, std::int64_t flow, const std::string& reason) {
  auto it = sdn_.find(switch_id);
  if (it == sdn_.end()) return;
  SwitchState& st = it->second;
  st.pending_packet_in.erase(flow);
  std::deque<BufEntry> keep;
  for (auto& e : st.buffer) {
    if (e.pkt.flow == flow)
      drop(switch_id, e.pkt, reason);
    else
      keep.push_back(std::move(e));
  }
  st.buffer = std::move(keep);
}

void SwitchFabric::on_link_state_changed(int link_id) {
  const Link& l = topo_.link(link_id);
  if (l.state == LinkState::Up) return;

  // In-flight frames on a failed link are lost.
  auto it = in_flight_.find(link_id);
  if (it != in_flight_.end()) {
    for (const InFlight& f : it->second) {
      eng_.cancel(f.ev);
      drop(f.pkt.src, f.pkt, "link-down");
    }
    it->second.clear();
  }
  // Queued packets at both egress ports are lost too.
  for (PortRef p : {l.a, l.b}) {
    auto eit = egress_.find(p);
    if (eit == egress_.end()) continue;
    for (auto& q : eit->second.q) {
      for (Packet& pkt : q) drop(p.node, pkt, "link-down");
      q.clear();
    }
  }
}

} // namespace iiotsim::net
