#include "iiotsim/ctrl/controlplane.hpp"

#include <algorithm>
#include <cassert>

#include "iiotsim/sim/error.hpp"

namespace iiotsim::ctrl {

using iiotsim::Errc;
using iiotsim::Error;
using net::FlowRule;
using net::Packet;
using net::Path;
using sim::EventKind;
using sim::Kv;

const char* ctrl_level_name(CtrlLevel l) {
  switch (l) {
    case CtrlLevel::Machine: return "machine";
    case CtrlLevel::Line: return "line";
    case CtrlLevel::Facility: return "facility";
  }
  return "?";
}

std::optional<CtrlLevel> ctrl_level_from(std::string_view s) {
  if (s == "machine") return CtrlLevel::Machine;
  if (s == "line") return CtrlLevel::Line;
  if (s == "facility") return CtrlLevel::Facility;
  return std::nullopt;
}

const char* flow_state_name(FlowState s) {
  switch (s) {
    case FlowState::Idle: return "idle";
    case FlowState::Pending: return "pending";
    case FlowState::Active: return "active";
    case FlowState::Suspended: return "suspended";
    case FlowState::Denied: return "denied";
    case FlowState::TornDown: return "torn-down";
  }
  return "?";
}

ControlPlane::ControlPlane(sim::Engine& eng, net::Topology& topo, net::SwitchFabric& fabric,
                           nfv::NfvManager& nfv, policy::PolicyEngine& policy,
                           qos::AdmissionController& qos, const Config& cfg)
    : eng_(eng), topo_(topo), fabric_(fabric), nfv_(nfv), policy_(policy), qos_(qos),
      cfg_(cfg) {}

void ControlPlane::add_controller(ControllerCfg cfg) {
  if (controllers_.count(cfg.id))
    throw Error(Errc::DuplicateId, "controller " + std::to_string(cfg.id));
  if (cfg.name.empty()) cfg.name = "c" + std::to_string(cfg.id);
  alive_[cfg.id] = true;
  controllers_.emplace(cfg.id, std::move(cfg));
}

void ControlPlane::finalize() {
  int facilities = 0;
  for (const auto& [id, c] : controllers_) {
    if (c.level == CtrlLevel::Facility) {
      ++facilities;
      facility_ = id;
      if (c.parent)
        throw Error(Errc::ValidationError, "facility controller " + c.name + " has a parent");
    } else if (!c.parent) {
      throw Error(Errc::ValidationError, "controller " + c.name + " has no parent");
    }
    if (c.parent && !controllers_.count(*c.parent))
      throw Error(Errc::ValidationError, "controller " + c.name + " parent unknown");
    for (int sw : c.scope) {
      if (!topo_.has_node(sw) || topo_.node(sw).kind != net::NodeKind::SdnSwitch)
        throw Error(Errc::ValidationError,
                    "controller " + c.name + " scope has non-SDN node " + std::to_string(sw));
    }
  }
  if (facilities != 1)
    throw Error(Errc::ValidationError,
                "expected exactly one facility controller, found " + std::to_string(facilities));

  // The parent relation must be a tree rooted at the facility.
  for (const auto& [id, c] : controllers_) {
    int hops = 0;
    std::optional<int> cur = id;
    while (cur && hops <= static_cast<int>(controllers_.size())) {
      const ControllerCfg& cc = controllers_.at(*cur);
      if (!cc.parent) break;
      cur = cc.parent;
      ++hops;
    }
    if (hops > static_cast<int>(controllers_.size()))
      throw Error(Errc::ValidationError, "controller hierarchy has a cycle");
    // A parent's scope covers the union of its children's scopes.
    if (c.parent) {
      const ControllerCfg& p = controllers_.at(*c.parent);
      for (int sw : c.scope)
        if (!p.scope.count(sw))
          throw Error(Errc::ValidationError,
                      "scope of " + c.name + " not contained in parent " + p.name);
    }
  }
  // Sibling scopes are disjoint.
  for (const auto& [id1, c1] : controllers_)
    for (const auto& [id2, c2] : controllers_) {
      if (id1 >= id2 || c1.parent != c2.parent || !c1.parent) continue;
      for (int sw : c1.scope)
        if (c2.scope.count(sw))
          throw Error(Errc::ValidationError, "sibling controllers " + c1.name + " and " +
                                                 c2.name + " overlap on switch " +
                                                 std::to_string(sw));
    }
  // Every SDN switch homes to exactly one Machine- or Line-level controller.
  for (const auto& [nid, n] : topo_.nodes()) {
    if (n.kind != net::NodeKind::SdnSwitch) continue;
    std::vector<int> homes;
    for (const auto& [cid, c] : controllers_)
      if (c.level != CtrlLevel::Facility && c.scope.count(nid)) homes.push_back(cid);
    if (homes.empty()) {
      // Directly homed to the facility controller.
      if (!controllers_.at(facility_).scope.count(nid))
        throw Error(Errc::ValidationError,
                    "switch " + std::to_string(nid) + " not in any controller scope");
      homes.push_back(facility_);
    }
    // Nested Machine-under-Line scopes home to the most specific level.
    int best = homes.front();
    for (int cid : homes) {
      const auto lvl = [&](int c) { return static_cast<int>(controllers_.at(c).level); };
      if (lvl(cid) < lvl(best) || (lvl(cid) == lvl(best) && cid < best)) best = cid;
    }
    int machine_like = 0;
    for (int cid : homes)
      if (controllers_.at(cid).level == controllers_.at(best).level) ++machine_like;
    if (machine_like != 1)
      throw Error(Errc::ValidationError, "switch " + std::to_string(nid) +
                                             " is in several same-level controller scopes");
    topo_.assign_controller(nid, best);
  }
  finalized_ = true;
}

void ControlPlane::set_compiled_policy(policy::CompiledPolicy compiled) {
  compiled_ = std::move(compiled);
}

void ControlPlane::register_flow_spec(std::int64_t flow, FlowIntent intent) {
  specs_[flow] = std::move(intent);
}

const FlowIntent& ControlPlane::flow_intent(std::int64_t flow) const {
  auto it = specs_.find(flow);
  if (it == specs_.end()) throw Error(Errc::UnknownFlow, std::to_string(flow));
  return it->second;
}

const ControllerCfg& ControlPlane::ctrl(int id) const {
  auto it = controllers_.find(id);
  if (it == controllers_.end()) throw Error(Errc::UnknownNode, "controller " + std::to_string(id));
  return it->second;
}

const std::string& ControlPlane::ctrl_name(int id) const { return ctrl(id).name; }

bool ControlPlane::controller_alive(int id) const {
  auto it = alive_.find(id);
  return it != alive_.end() && it->second;
}

bool ControlPlane::is_ancestor_or_self(int maybe_ancestor, int ctrl_id) const {
  std::optional<int> cur = ctrl_id;
  int hops = 0;
  while (cur && hops++ <= static_cast<int>(controllers_.size())) {
    if (*cur == maybe_ancestor) return true;
    cur = ctrl(*cur).parent;
  }
  return false;
}

bool ControlPlane::install_authorized(int switch_id, int controller_id) const {
  auto assigned = topo_.controller_of(switch_id);
  if (!assigned) return false;
  return is_ancestor_or_self(controller_id, *assigned);
}

std::optional<int> ControlPlane::anchor_switch(int host) const {
  const net::Node& h = topo_.node(host);
  std::vector<int> ports = h.ports;
  std::sort(ports.begin(), ports.end());
  for (int p : ports) {
    auto lid = topo_.link_at({host, p});
    if (!lid || topo_.link(*lid).state != net::LinkState::Up) continue;
    int peer = topo_.link(*lid).far(host).node;
    const net::Node& pn = topo_.node(peer);
    if (pn.kind == net::NodeKind::SdnSwitch) return peer;
    if (pn.kind == net::NodeKind::LegacySwitch) {
      // Gateway SDN switch serving this legacy region, smallest id.
      std::set<int> seen{peer};
      std::deque<int> q{peer};
      std::optional<int> best;
      while (!q.empty()) {
        int u = q.front();
        q.pop_front();
        for (const auto& [lid2, l] : topo_.links()) {
          if (l.state != net::LinkState::Up || !l.touches(u)) continue;
          int v = l.far(u).node;
          const net::Node& vn = topo_.node(v);
          if (vn.kind == net::NodeKind::LegacySwitch && seen.insert(v).second) q.push_back(v);
          if (vn.kind == net::NodeKind::SdnSwitch && (!best || v < *best)) best = v;
        }
      }
      return best;
    }
    if (pn.kind == net::NodeKind::NfvHost) return std::nullopt;
  }
  return std::nullopt;
}

bool ControlPlane::covers(int ctrl_id, std::int64_t flow) const {
  const FlowIntent& intent = flow_intent(flow);
  auto a = anchor_switch(intent.src);
  auto b = anchor_switch(intent.dst);
  if (!a || !b) return false;
  const ControllerCfg& c = ctrl(ctrl_id);
  return c.scope.count(*a) && c.scope.count(*b);
}

int ControlPlane::ingress_switch(const FlowRecord& rec) const {
  for (int n : rec.path.nodes)
    if (topo_.node(n).kind == net::NodeKind::SdnSwitch) return n;
  auto a = anchor_switch(rec.intent.src);
  return a.value_or(0);
}

// ---------------------------------------------------------------- setup --

void ControlPlane::on_packet_in(int switch_id, int in_port, const Packet& pkt) {
  auto assigned = topo_.controller_of(switch_id);
  if (!assigned) return;
  if (!controller_alive(*assigned)) {
    parked_[*assigned].push_back(ParkedPacketIn{switch_id, in_port, pkt});
    return;
  }
  dispatch_setup(*assigned, pkt.flow, ReactiveCtx{switch_id, in_port});
}

void ControlPlane::request_flow(std::int64_t flow) {
  const FlowIntent& intent = flow_intent(flow);
  eng_.emit("northbound", "flow-requested",
            {Kv{"flow", flow}, Kv{"src", intent.src}, Kv{"dst", intent.dst},
             Kv{"class", traffic_class_name(intent.tclass)}, Kv{"demand", intent.demand_kbps}});
  auto a = anchor_switch(intent.src);
  if (!a) {
    eng_.emit("northbound", "flow-rejected", {Kv{"flow", flow}, Kv{"reason", "no-anchor"}});
    return;
  }
  auto assigned = topo_.controller_of(*a);
  std::optional<int> target = assigned;
  while (target && !controller_alive(*target)) target = ctrl(*target).parent;
  if (!target) {
    eng_.emit("northbound", "flow-rejected", {Kv{"flow", flow}, Kv{"reason", "no-controller"}});
    return;
  }
  dispatch_setup(*target, flow, std::nullopt);
}

void ControlPlane::dispatch_setup(int ctrl_id, std::int64_t flow,
                                  std::optional<ReactiveCtx> ctx) {
  if (!specs_.count(flow)) {
    deny_flow(ctrl_id, flow, ctx, "unknown-flow", false);
    return;
  }
  if (!covers(ctrl_id, flow)) {
    const ControllerCfg& c = ctrl(ctrl_id);
    if (!c.parent) {
      deny_flow(ctrl_id, flow, ctx, "no-anchor", false);
      return;
    }
    int parent = *c.parent;
    eng_.emit(c.name, "escalated", {Kv{"flow", flow}, Kv{"to", ctrl_name(parent)}});
    eng_.schedule(eng_.now() + cfg_.control_delay_us, EventKind::ControlMessage,
                  [this, parent, flow, ctx] {
                    if (!controller_alive(parent)) {
                      if (ctx)
                        parked_[parent].push_back(
                            ParkedPacketIn{ctx->switch_id, ctx->in_port, Packet{.flow = flow}});
                      return;
                    }
                    dispatch_setup(parent, flow, ctx);
                  });
    return;
  }
  run_pipeline(ctrl_id, flow, ctx);
}

void ControlPlane::deny_flow(int ctrl_id, std::int64_t flow, std::optional<ReactiveCtx> ctx,
                             const std::string& reason, bool policy_denial) {
  eng_.emit(ctrl_name(ctrl_id), policy_denial ? "auth-denied" : "flow-rejected",
            {Kv{"flow", flow}, Kv{"reason", reason}});
  auto& rec = records_[flow];
  rec.flow = flow;
  if (rec.state != FlowState::TornDown) rec.state = FlowState::Denied;
  rec.owner = ctrl_id;
  if (specs_.count(flow)) rec.intent = specs_.at(flow);
  if (!ctx) return;
  // Negative caching: a short-lived Drop rule at the ingress suppresses
  // repeat packet-ins for the denied flow.
  FlowRule drop;
  drop.id = next_rule_id_++;
  if (specs_.count(flow)) {
    drop.match.src = specs_.at(flow).src;
    drop.match.dst = specs_.at(flow).dst;
  } else {
    drop.match.in_port = ctx->in_port;
  }
  drop.priority = 50;
  drop.actions = {net::Action{net::Action::Kind::Drop, 0}};
  drop.hard_timeout = cfg_.deny_cache_us;
  drop.installed_by = ctrl_id;
  drop.flow_tag = flow;
  drop.drop_reason = "denied";
  int sw = ctx->switch_id;
  eng_.schedule(eng_.now() + cfg_.rule_install_us, EventKind::ControlMessage,
                [this, sw, drop] { fabric_.install_rule(sw, drop); });
}

void ControlPlane::run_pipeline(int ctrl_id, std::int64_t flow, std::optional<ReactiveCtx> ctx) {
  const FlowIntent intent = specs_.at(flow);
  FlowRecord& rec = records_[flow];
  // Packet-ins racing an in-flight or finished setup must not re-admit.
  if (rec.state == FlowState::Pending || rec.state == FlowState::Suspended) return;
  if (rec.state == FlowState::TornDown) {
    deny_flow(ctrl_id, flow, ctx, "torn-down", false);
    return;
  }
  if (rec.state == FlowState::Active) {
    // Rules exist; reprogram the same path so buffered packets are released.
    install_path(rec.owner, flow, rec.path, InstallMode::Initial);
    return;
  }
  rec.flow = flow;
  rec.intent = intent;
  rec.owner = ctrl_id;

  const policy::Session* session =
      policy_.active_session_for(intent.requester, eng_.now());
  if (!session) {
    deny_flow(ctrl_id, flow, ctx, "no-session", true);
    return;
  }
  rec.session = session->id;

  policy::AuthzResult authz =
      policy_.authorize_flow(*session, intent, topo_, compiled_, eng_.now());
  if (!authz.allowed) {
    deny_flow(ctrl_id, flow, ctx, authz.reason, true);
    return;
  }

  // Waypoint VNFs, in traversal order: VPN gateway, access tap, firewall.
  std::vector<int> instances;
  if (session->entry.kind == policy::EntryKind::Vpn) {
    int gw = session->entry.gateway_instance;
    if (!nfv_.running(gw)) {
      deny_flow(ctrl_id, flow, ctx, "vpn-gateway-down", false);
      return;
    }
    instances.push_back(gw);
  }
  if (intent.access_tag) {
    auto tap = nfv_.by_tag(*intent.access_tag);
    if (!tap || !nfv_.running(*tap)) {
      deny_flow(ctrl_id, flow, ctx, "no-tap", false);
      return;
    }
    instances.push_back(*tap);
  }
  if (authz.require_firewall) {
    auto src_seg = policy::segment_of_node(topo_, intent.src);
    auto dst_seg = policy::segment_of_node(topo_, intent.dst);
    auto fw = nfv_.instance_for_transition({src_seg.value_or(0), dst_seg.value_or(0)});
    if (!fw) {
      deny_flow(ctrl_id, flow, ctx, "no-firewall", false);
      return;
    }
    nfv::VnfState st = nfv_.instance(*fw).state;
    if (st == nfv::VnfState::Migrating || st == nfv::VnfState::Booting) {
      // Fail-secure: buffer at the ingress until the firewall is back.
      auto a = anchor_switch(intent.src);
      if (a) {
        fabric_.hold_flow_at(*a, flow);
        rec.held_at_ = *a;
      }
      rec.state = FlowState::Pending;
      waiting_on_instance_[*fw].push_back(flow);
      deferred_ctx_[flow] = ctx;
      eng_.emit(ctrl_name(ctrl_id), "flow-held",
                {Kv{"flow", flow}, Kv{"reason", "firewall-unavailable"}});
      return;
    }
    if (st != nfv::VnfState::Running) {
      deny_flow(ctrl_id, flow, ctx, "no-firewall", false);
      return;
    }
    instances.push_back(*fw);
  }
  rec.waypoint_instances = instances;

  std::vector<int> waypoints;
  for (int inst : instances) {
    int host = nfv_.instance(inst).host;
    if (waypoints.empty() || waypoints.back() != host) waypoints.push_back(host);
  }

  // Northbound applications may steer the path.
  std::optional<Path> forced;
  qos::AdmitResult default_plan;
  auto ait = apps_.find(ctrl_id);
  if (ait != apps_.end() && !ait->second.empty()) {
    default_plan = qos_.plan(intent, waypoints);
    NetworkView view = make_view(ctrl_id);
    for (const auto& app : ait->second) {
      auto proposal = app->propose_path(view, intent);
      if (!proposal) continue;
      auto cand = topo_.path_from_nodes(
          *proposal, intent.tclass == TrafficClass::BestEffort ? 0 : intent.demand_kbps,
          qos_.residual_fn());
      if (!cand) continue;
      qos::AdmitResult trial = qos_.plan(intent, waypoints, std::nullopt, cand);
      if (trial.accepted) {
        forced = trial.path;
        break;
      }
    }
  }

  // A path that leaves this controller's scope (a firewall detour, say) is
  // the parent's job, even when both endpoints are local.
  qos::AdmitResult probe = qos_.plan(intent, waypoints, std::nullopt, forced);
  if (probe.accepted) {
    const ControllerCfg& c = ctrl(ctrl_id);
    bool in_scope = true;
    for (int n : probe.path.nodes)
      if (topo_.node(n).kind == net::NodeKind::SdnSwitch && !c.scope.count(n))
        in_scope = false;
    if (!in_scope && c.parent) {
      int parent = *c.parent;
      eng_.emit(c.name, "escalated", {Kv{"flow", flow}, Kv{"to", ctrl_name(parent)}});
      eng_.schedule(eng_.now() + cfg_.control_delay_us, EventKind::ControlMessage,
                    [this, parent, flow, ctx] {
                      if (controller_alive(parent)) dispatch_setup(parent, flow, ctx);
                    });
      return;
    }
  }

  qos::AdmitResult res = qos_.admit(intent, flow, waypoints, forced);
  if (!res.accepted) {
    deny_flow(ctrl_id, flow, ctx, reject_reason_name(res.reason), false);
    return;
  }
  if (forced && default_plan.accepted && default_plan.path.nodes != res.path.nodes)
    eng_.emit(ctrl_name(ctrl_id), "app-steered",
              {Kv{"flow", flow}, Kv{"default", default_plan.path.format()},
               Kv{"chosen", res.path.format()}});

  rec.reservation = res.reservation;
  rec.state = FlowState::Pending;
  install_path(ctrl_id, flow, res.path, InstallMode::Initial);
}

std::vector<ControlPlane::DesiredRule> ControlPlane::desired_rules(int ctrl_id,
                                                                   const FlowRecord& rec,
                                                                   const Path& path) const {
  std::vector<DesiredRule> out;
  std::map<int, int> visits;
  for (int n : path.nodes) ++visits[n];
  for (std::size_t i = 1; i + 1 < path.nodes.size(); ++i) {
    int node = path.nodes[i];
    if (topo_.node(node).kind != net::NodeKind::SdnSwitch) continue;
    FlowRule r;
    r.match.src = rec.intent.src;
    r.match.dst = rec.intent.dst;
    r.match.tclass = rec.intent.tclass;
    if (visits[node] > 1) r.match.in_port = path.hops[i - 1].to_port;
    r.priority = 100;
    r.actions = {net::Action{net::Action::Kind::ForwardPort, path.hops[i].from_port}};
    r.installed_by = ctrl_id;
    r.flow_tag = rec.flow;
    out.push_back(DesiredRule{node, std::move(r)});
  }
  return out;
}

void ControlPlane::install_path(int ctrl_id, std::int64_t flow, const Path& path,
                                InstallMode mode) {
  FlowRecord& rec = records_[flow];
  const std::uint64_t epoch = rec.epoch;

  std::vector<DesiredRule> desired = desired_rules(ctrl_id, rec, path);

  // Service-chain entries for NFV hosts on the path.
  struct DesiredChain {
    int node;
    std::vector<int> instances;
    int out_port;
  };
  std::vector<DesiredChain> chains;
  for (std::size_t i = 1; i + 1 < path.nodes.size(); ++i) {
    int node = path.nodes[i];
    if (topo_.node(node).kind != net::NodeKind::NfvHost) continue;
    std::vector<int> here;
    for (int inst : rec.waypoint_instances)
      if (nfv_.instance(inst).host == node) here.push_back(inst);
    chains.push_back(DesiredChain{node, std::move(here), path.hops[i].from_port});
  }

  // Skip switches whose installed rule already behaves as desired.
  struct Step {
    bool chain;
    DesiredRule rule{0, {}};
    DesiredChain chain_entry{0, {}, 0};
  };
  std::vector<Step> steps;
  std::vector<std::pair<int, std::int64_t>> kept;
  for (auto& d : desired) {
    bool unchanged = false;
    for (const auto& [sw, rid] : rec.rules) {
      if (sw != d.switch_id) continue;
      for (const FlowRule& cur : fabric_.rules_snapshot(sw)) {
        if (cur.id == rid && cur.same_behavior(d.rule)) {
          unchanged = true;
          kept.emplace_back(sw, rid);
          break;
        }
      }
      if (unchanged) break;
    }
    if (!unchanged) {
      d.rule.id = next_rule_id_++;
      steps.push_back(Step{false, d, {}});
    }
  }
  for (auto& c : chains) {
    bool unchanged = fabric_.has_chain(c.node, flow) &&
                     std::find(rec.chain_nodes.begin(), rec.chain_nodes.end(), c.node) !=
                         rec.chain_nodes.end();
    if (!unchanged) steps.push_back(Step{true, {0, {}}, c});
  }

  // Install from the far end toward the ingress so released packets meet a
  // fully programmed path.
  std::reverse(steps.begin(), steps.end());
  sim::SimTime t = eng_.now();
  std::vector<std::pair<int, std::int64_t>> installed = kept;
  std::vector<int> new_chain_nodes;
  for (const auto& c : chains) new_chain_nodes.push_back(c.node);

  for (const Step& step : steps) {
    t += cfg_.rule_install_us;
    if (step.chain) {
      DesiredChain c = step.chain_entry;
      eng_.schedule(t, EventKind::ControlMessage, [this, flow, epoch, c] {
        if (records_[flow].epoch != epoch) return;
        fabric_.install_chain(c.node, flow, c.instances, c.out_port);
      });
    } else {
      DesiredRule d = step.rule;
      installed.emplace_back(d.switch_id, d.rule.id);
      eng_.schedule(t, EventKind::ControlMessage, [this, flow, epoch, d] {
        if (records_[flow].epoch != epoch) return;
        fabric_.install_rule(d.switch_id, d.rule);
      });
    }
  }

  std::vector<std::pair<int, std::int64_t>> stale;
  for (const auto& e : rec.rules)
    if (std::find(installed.begin(), installed.end(), e) == installed.end()) stale.push_back(e);
  std::vector<int> stale_chains;
  for (int n : rec.chain_nodes)
    if (std::find(new_chain_nodes.begin(), new_chain_nodes.end(), n) == new_chain_nodes.end())
      stale_chains.push_back(n);

  eng_.schedule(t, EventKind::ControlMessage, [this, ctrl_id, flow, epoch, path, mode,
                                               installed, stale, stale_chains,
                                               new_chain_nodes] {
    FlowRecord& r = records_[flow];
    if (r.epoch != epoch) return;
    const char* removal_reason = mode == InstallMode::Initial ? "superseded" : "reroute";
    for (const auto& [sw, rid] : stale) fabric_.remove_rule(sw, rid, removal_reason);
    for (int n : stale_chains) fabric_.remove_chain(n, flow);
    r.rules = installed;
    r.chain_nodes = new_chain_nodes;
    r.path = path;
    r.state = FlowState::Active;
    if (r.established_at < 0) r.established_at = eng_.now();
    if (r.held_at_) {
      fabric_.release_flow_at(*r.held_at_, flow);
      r.held_at_.reset();
    }
    switch (mode) {
      case InstallMode::Initial:
        eng_.emit(ctrl_name(ctrl_id), "flow-admitted",
                  {Kv{"flow", flow}, Kv{"class", traffic_class_name(r.intent.tclass)},
                   Kv{"path", path.format()}, Kv{"demand", r.intent.demand_kbps},
                   Kv{"worst_case", qos_.worst_case_us(path)}});
        break;
      case InstallMode::Reroute:
        eng_.emit(ctrl_name(ctrl_id), "reroute-completed",
                  {Kv{"flow", flow}, Kv{"path", path.format()}});
        break;
      case InstallMode::Resume:
        eng_.emit(ctrl_name(ctrl_id), "flow-resumed",
                  {Kv{"flow", flow}, Kv{"path", path.format()}});
        break;
    }
  });
}

// ------------------------------------------------------------- teardown --

void ControlPlane::remove_flow_state(FlowRecord& rec, const std::string& reason) {
  ++rec.epoch;
  std::set<int> touched;
  for (const auto& [sw, rid] : rec.rules) {
    fabric_.remove_rule(sw, rid, reason);
    touched.insert(sw);
  }
  rec.rules.clear();
  for (int n : rec.path.nodes)
    if (topo_.has_node(n) && topo_.node(n).kind == net::NodeKind::SdnSwitch) touched.insert(n);
  for (int sw : touched) fabric_.drop_buffered(sw, rec.flow, reason);
  for (int n : rec.chain_nodes) fabric_.remove_chain(n, rec.flow);
  rec.chain_nodes.clear();
  if (rec.held_at_) {
    fabric_.drop_held(*rec.held_at_, rec.flow, reason);
    rec.held_at_.reset();
  }
  if (rec.reservation) {
    qos_.release(*rec.reservation);
    rec.reservation.reset();
  }
}

void ControlPlane::teardown_flow(std::int64_t flow, const std::string& reason) {
  auto it = records_.find(flow);
  if (it == records_.end()) throw Error(Errc::UnknownFlow, std::to_string(flow));
  FlowRecord& rec = it->second;
  remove_flow_state(rec, reason);
  rec.state = FlowState::TornDown;
  eng_.emit(ctrl_name(rec.owner ? rec.owner : facility_), "flow-torn-down",
            {Kv{"flow", flow}, Kv{"reason", reason}});
}

void ControlPlane::rebind_flow(std::int64_t flow, int new_dst) {
  eng_.emit("northbound", "scenario-action",
            {Kv{"kind", "rebind-flow"}, Kv{"flow", flow}, Kv{"dst", new_dst}});
  if (records_.count(flow) && records_[flow].state == FlowState::Active)
    teardown_flow(flow, "rebind");
  specs_.at(flow).dst = new_dst;
  records_.erase(flow);
  request_flow(flow);
}

// ------------------------------------------------------- authentication --

void ControlPlane::on_auth_request(int switch_id, int in_port, int host, int principal,
                                   const std::string& credential) {
  policy::SessionEntry entry;
  entry.kind = policy::EntryKind::InternalPort;
  entry.port = {switch_id, in_port};
  (void)host;
  authenticate(principal, credential, entry);
}

void ControlPlane::authenticate(int principal, const std::string& credential,
                                policy::SessionEntry entry) {
  if (!policy_.principal_known(principal)) {
    eng_.emit("policy", "auth-denied",
              {Kv{"principal", principal}, Kv{"reason", "unknown-principal"}});
    return;
  }
  if (entry.kind == policy::EntryKind::Vpn && !nfv_.running(entry.gateway_instance)) {
    eng_.emit("policy", "auth-denied", {Kv{"principal", principal}, Kv{"reason", "no-gateway"}});
    return;
  }
  // The credential check runs on an Authenticator instance.
  std::optional<int> auth_inst;
  for (const auto& [id, inst] : nfv_.instances()) {
    if (inst.desc.kind != nfv::VnfKind::Authenticator || inst.state != nfv::VnfState::Running)
      continue;
    if (entry.kind == policy::EntryKind::InternalPort &&
        !topo_.connected(entry.port.node, inst.host))
      continue;
    auth_inst = id;
    break;
  }
  if (!auth_inst) {
    eng_.emit("policy", "auth-denied",
              {Kv{"principal", principal}, Kv{"reason", "no-authenticator"}});
    return;
  }
  sim::SimTime delay =
      2 * cfg_.control_delay_us + nfv_.instance(*auth_inst).desc.processing_delay_us;
  eng_.schedule(eng_.now() + delay, EventKind::ControlMessage,
                [this, principal, credential, entry] {
                  if (!policy_.check_credential(principal, credential)) {
                    eng_.emit("policy", "auth-denied",
                              {Kv{"principal", principal}, Kv{"reason", "bad-credential"}});
                    return;
                  }
                  policy::Session& s = policy_.create_session(principal, entry, eng_.now());
                  eng_.emit("policy", "auth-granted",
                            {Kv{"principal", principal}, Kv{"session", s.id},
                             Kv{"entry",
                                entry.kind == policy::EntryKind::Vpn ? "vpn" : "port"}});
                  schedule_session_expiry(s.id);

                  const policy::Principal& p = policy_.principal(principal);
                  if (p.kind == policy::PrincipalKind::Device &&
                      entry.kind == policy::EntryKind::InternalPort && p.profile) {
                    topo_.assign_port_segment(entry.port, p.profile->expected_segment);
                    eng_.emit(topo_.node(entry.port.node).name, "port-segmented",
                              {Kv{"port", entry.port.port},
                               Kv{"vlan", p.profile->expected_segment}});
                    auto lid = topo_.link_at(entry.port);
                    if (lid) {
                      int device_host = topo_.link(*lid).far(entry.port.node).node;
                      FlowRule base;
                      base.id = next_rule_id_++;
                      base.match.src = device_host;
                      base.priority = 1;
                      base.actions = {net::Action{net::Action::Kind::ToController, 0}};
                      base.installed_by =
                          topo_.controller_of(entry.port.node).value_or(facility_);
                      base.flow_tag = -device_host;
                      int sw = entry.port.node;
                      eng_.schedule(eng_.now() + cfg_.rule_install_us,
                                    EventKind::ControlMessage,
                                    [this, sw, base] { fabric_.install_rule(sw, base); });
                    }
                  }
                });
}

void ControlPlane::schedule_session_expiry(int session_id) {
  const policy::Session* s = policy_.session(session_id);
  if (!s) return;
  eng_.schedule(s->expiry, EventKind::ControllerTimeout, [this, session_id] {
    for (auto& [flow, rec] : records_) {
      if (rec.session != session_id) continue;
      if (rec.state == FlowState::Active || rec.state == FlowState::Pending ||
          rec.state == FlowState::Suspended)
        teardown_flow(flow, "session-expired");
    }
  });
}

// ------------------------------------------------------------- failures --

void ControlPlane::on_link_event(int link_id, bool up) {
  sim::SimTime detect = cfg_.detect_at(eng_.now(), cfg_.link_fail_detect_beats);
  eng_.schedule(detect, up ? EventKind::LinkRepair : EventKind::LinkFailure,
                [this, link_id, up] {
                  const net::Link& l = topo_.link(link_id);
                  bool still = (l.state == net::LinkState::Down) == !up;
                  if (!still) return;
                  eng_.emit("ctrl", "link-detected",
                            {Kv{"link", link_id}, Kv{"state", up ? "up" : "down"}});
                  if (!up) {
                    std::vector<std::int64_t> affected;
                    for (const auto& [flow, rec] : records_)
                      if (rec.state == FlowState::Active && rec.path.uses_link(link_id))
                        affected.push_back(flow);
                    for (std::int64_t flow : affected) {
                      int owner = records_[flow].owner;
                      if (!controller_alive(owner))
                        pending_reroutes_[owner].push_back(flow);
                      else
                        do_reroute(flow);
                    }
                  } else {
                    resume_suspended();
                  }
                });
}

void ControlPlane::do_reroute(std::int64_t flow) {
  FlowRecord& rec = records_[flow];
  if (rec.state != FlowState::Active) return;
  ++rec.epoch;
  eng_.emit(ctrl_name(rec.owner), "reroute-started", {Kv{"flow", flow}});

  std::vector<int> waypoints;
  for (int inst : rec.waypoint_instances) {
    if (!nfv_.running(inst)) {
      suspend_flow(flow, "waypoint-down");
      return;
    }
    int host = nfv_.instance(inst).host;
    if (waypoints.empty() || waypoints.back() != host) waypoints.push_back(host);
  }

  qos::AdmitResult plan = qos_.plan(rec.intent, waypoints, rec.reservation);
  if (!plan.accepted) {
    suspend_flow(flow, reject_reason_name(plan.reason));
    return;
  }
  // Reservations move atomically at decision time; rules follow
  // make-before-break.
  if (rec.reservation) qos_.move(*rec.reservation, plan.path);
  install_path(rec.owner, flow, plan.path, InstallMode::Reroute);
}

void ControlPlane::suspend_flow(std::int64_t flow, const std::string& reason) {
  FlowRecord& rec = records_[flow];
  remove_flow_state(rec, "suspended");
  rec.state = FlowState::Suspended;
  eng_.emit(ctrl_name(rec.owner ? rec.owner : facility_), "flow-suspended",
            {Kv{"flow", flow}, Kv{"reason", reason}});
  auto a = anchor_switch(rec.intent.src);
  if (!a) return;
  FlowRule drop;
  drop.id = next_rule_id_++;
  drop.match.src = rec.intent.src;
  drop.match.dst = rec.intent.dst;
  drop.priority = 60;
  drop.actions = {net::Action{net::Action::Kind::Drop, 0}};
  drop.installed_by = rec.owner ? rec.owner : facility_;
  drop.flow_tag = flow;
  drop.drop_reason = "suspended";
  int sw = *a;
  rec.rules.emplace_back(sw, drop.id);
  const std::uint64_t epoch = rec.epoch;
  eng_.schedule(eng_.now() + cfg_.rule_install_us, EventKind::ControlMessage,
                [this, sw, drop, flow, epoch] {
                  if (records_[flow].epoch != epoch) return;
                  fabric_.install_rule(sw, drop);
                });
}

void ControlPlane::resume_suspended() {
  std::vector<std::int64_t> suspended;
  for (const auto& [flow, rec] : records_)
    if (rec.state == FlowState::Suspended && controller_alive(rec.owner))
      suspended.push_back(flow);
  for (std::int64_t flow : suspended) {
    FlowRecord& rec = records_[flow];
    std::vector<int> waypoints;
    bool ok = true;
    for (int inst : rec.waypoint_instances) {
      if (!nfv_.running(inst)) {
        ok = false;
        break;
      }
      int host = nfv_.instance(inst).host;
      if (waypoints.empty() || waypoints.back() != host) waypoints.push_back(host);
    }
    if (!ok) continue;
    qos::AdmitResult res = qos_.admit(rec.intent, flow, waypoints);
    if (!res.accepted) continue;
    ++rec.epoch;
    rec.reservation = res.reservation;
    install_path(rec.owner, flow, res.path, InstallMode::Resume);
  }
}

void ControlPlane::kill_controller(int ctrl_id) {
  ctrl(ctrl_id);
  if (!controller_alive(ctrl_id)) return;
  alive_[ctrl_id] = false;
  eng_.emit(ctrl_name(ctrl_id), "controller-killed", {Kv{"ctrl", ctrl_id}});
  sim::SimTime detect = cfg_.detect_at(eng_.now(), cfg_.ctrl_fail_detect_beats);
  eng_.schedule(detect, EventKind::ControllerTimeout,
                [this, ctrl_id] { activate_standby(ctrl_id); });
}

void ControlPlane::activate_standby(int dead_id) {
  const ControllerCfg dead = ctrl(dead_id);
  int successor = 0;
  if (dead.standby) {
    ControllerCfg sb;
    sb.id = *dead.standby;
    sb.name = dead.name + "-standby";
    sb.level = dead.level;
    sb.scope = dead.scope;
    sb.parent = dead.parent;
    if (!controllers_.count(sb.id)) controllers_.emplace(sb.id, sb);
    alive_[sb.id] = true;
    successor = sb.id;
    eng_.emit(ctrl_name(dead_id), "failover-activated",
              {Kv{"ctrl", dead_id}, Kv{"standby", successor}});
  } else if (dead.parent) {
    successor = *dead.parent;
    eng_.emit(ctrl_name(dead_id), "degraded-mode",
              {Kv{"ctrl", dead_id}, Kv{"parent", successor}});
  } else {
    eng_.emit(ctrl_name(dead_id), "degraded-mode", {Kv{"ctrl", dead_id}, Kv{"parent", 0}});
    return;
  }

  if (facility_ == dead_id) facility_ = successor;
  for (auto& [id, c] : controllers_)
    if (c.parent && *c.parent == dead_id) c.parent = successor;
  for (auto& [flow, rec] : records_)
    if (rec.owner == dead_id) rec.owner = successor;
  if (!apps_[dead_id].empty()) {
    auto& dst = apps_[successor];
    for (auto& app : apps_[dead_id]) dst.push_back(std::move(app));
    apps_[dead_id].clear();
  }

  // Switches re-home, then parked work resumes.
  for (int sw : dead.scope) {
    eng_.schedule(eng_.now() + cfg_.rehome_us, EventKind::ControlMessage,
                  [this, sw, successor] {
                    topo_.assign_controller(sw, successor);
                    eng_.emit(topo_.node(sw).name, "switch-rehomed", {Kv{"ctrl", successor}});
                  });
  }
  eng_.schedule(eng_.now() + cfg_.rehome_us + cfg_.control_delay_us, EventKind::ControlMessage,
                [this, dead_id, successor] {
                  auto parked = std::move(parked_[dead_id]);
                  parked_[dead_id].clear();
                  for (const ParkedPacketIn& p : parked)
                    dispatch_setup(successor, p.pkt.flow, ReactiveCtx{p.switch_id, p.in_port});
                  auto reroutes = std::move(pending_reroutes_[dead_id]);
                  pending_reroutes_[dead_id].clear();
                  for (std::int64_t flow : reroutes) do_reroute(flow);
                  auto orchestration = std::move(parked_orchestration_);
                  parked_orchestration_.clear();
                  for (auto& fn : orchestration) fn();
                });
}

void ControlPlane::fail_nfv_host(int host) {
  std::vector<int> affected = nfv_.instances_on(host);
  std::set<int> affected_set(affected.begin(), affected.end());

  for (auto& [flow, rec] : records_) {
    if (rec.state != FlowState::Active) continue;
    bool hit = false;
    for (int inst : rec.waypoint_instances)
      if (affected_set.count(inst)) hit = true;
    if (!hit) continue;
    ++rec.epoch;
    int ingress = ingress_switch(rec);
    if (ingress) {
      fabric_.hold_flow_at(ingress, flow);
      rec.held_at_ = ingress;
    }
    eng_.emit(ctrl_name(rec.owner), "reroute-started",
              {Kv{"flow", flow}, Kv{"reason", "vnf-migration"}});
    for (int inst : rec.waypoint_instances)
      if (affected_set.count(inst)) waiting_on_instance_[inst].push_back(flow);
  }

  nfv::MigrationReport report =
      nfv_.fail_host(host, [this](int inst) { on_instance_migrated(inst); });

  for (int inst : report.unplaced) {
    auto flows = std::move(waiting_on_instance_[inst]);
    waiting_on_instance_.erase(inst);
    for (std::int64_t flow : flows) {
      FlowRecord& rec = records_[flow];
      if (rec.state == FlowState::Pending) deferred_ctx_.erase(flow);
      suspend_flow(flow, "no-firewall");
    }
  }
}

void ControlPlane::on_instance_migrated(int instance) {
  auto it = waiting_on_instance_.find(instance);
  if (it == waiting_on_instance_.end()) return;
  std::vector<std::int64_t> flows = std::move(it->second);
  waiting_on_instance_.erase(it);
  for (std::int64_t flow : flows) {
    FlowRecord& rec = records_[flow];
    bool ready = true;
    for (int inst : rec.waypoint_instances)
      if (!nfv_.running(inst)) ready = false;
    if (!ready) continue;

    if (rec.state == FlowState::Pending && deferred_ctx_.count(flow)) {
      auto ctx = deferred_ctx_[flow];
      deferred_ctx_.erase(flow);
      dispatch_setup(rec.owner ? rec.owner : facility_, flow, ctx);
      continue;
    }
    if (rec.state != FlowState::Active) continue;
    std::vector<int> waypoints;
    for (int inst : rec.waypoint_instances) {
      int h = nfv_.instance(inst).host;
      if (waypoints.empty() || waypoints.back() != h) waypoints.push_back(h);
    }
    ++rec.epoch;
    qos::AdmitResult plan = qos_.plan(rec.intent, waypoints, rec.reservation);
    if (!plan.accepted) {
      suspend_flow(flow, reject_reason_name(plan.reason));
      continue;
    }
    if (rec.reservation) qos_.move(*rec.reservation, plan.path);
    install_path(rec.owner, flow, plan.path, InstallMode::Reroute);
  }
}

int ControlPlane::orchestrate_instantiate(const nfv::VnfDescriptor& desc,
                                          std::optional<int> host,
                                          std::set<nfv::Transition> transitions,
                                          std::set<std::string> tags) {
  if (!controller_alive(facility_)) {
    parked_orchestration_.push_back([this, desc, host, transitions, tags] {
      nfv_.instantiate(desc, host, transitions, tags, [this](int i) { on_instance_migrated(i); });
    });
    return 0;
  }
  return nfv_.instantiate(desc, host, std::move(transitions), std::move(tags),
                          [this](int i) { on_instance_migrated(i); });
}

// ----------------------------------------------------------------- apps --

void ControlPlane::register_app(int ctrl_id, std::unique_ptr<NorthboundApp> app) {
  ctrl(ctrl_id);
  auto& list = apps_[ctrl_id];
  for (const auto& a : list)
    if (a->name() == app->name()) throw Error(Errc::DuplicateApp, app->name());
  eng_.emit(ctrl_name(ctrl_id), "app-registered",
            {Kv{"app", app->name()}, Kv{"api", kNorthboundApiVersion}});
  list.push_back(std::move(app));
}

void ControlPlane::deregister_app(int ctrl_id, const std::string& name) {
  auto& list = apps_[ctrl_id];
  std::erase_if(list, [&](const std::unique_ptr<NorthboundApp>& a) { return a->name() == name; });
  eng_.emit(ctrl_name(ctrl_id), "app-deregistered", {Kv{"app", name}});
}

NetworkView ControlPlane::make_view(int ctrl_id) const {
  const ControllerCfg& c = ctrl(ctrl_id);
  NetworkView v;
  v.at = eng_.now();
  v.revision = topo_.revision();

  std::set<int> in_scope(c.scope.begin(), c.scope.end());
  // Non-switch nodes adjacent to scoped switches are visible too.
  for (const auto& [lid, l] : topo_.links()) {
    for (int side : {l.a.node, l.b.node}) {
      int other = l.far(side).node;
      if (in_scope.count(side) && topo_.node(other).kind != net::NodeKind::SdnSwitch)
        in_scope.insert(other);
    }
  }
  for (const auto& [nid, n] : topo_.nodes()) {
    if (!in_scope.count(nid)) continue;
    v.nodes[nid] = n.kind;
    if (n.kind == net::NodeKind::Host) {
      auto seg = policy::segment_of_node(topo_, nid);
      if (seg) v.host_segments[nid] = *seg;
    }
  }
  for (const auto& [lid, l] : topo_.links()) {
    if (!in_scope.count(l.a.node) || !in_scope.count(l.b.node)) continue;
    LinkView lv;
    lv.id = lid;
    lv.a_node = l.a.node;
    lv.b_node = l.b.node;
    lv.state = l.state;
    lv.latency_us = l.latency_us;
    lv.bandwidth_kbps = l.bandwidth_kbps;
    lv.jitter_bound_us = l.jitter_bound_us;
    lv.residual_ab_kbps = qos_.residual_kbps(l, l.a.node);
    lv.residual_ba_kbps = qos_.residual_kbps(l, l.b.node);
    v.links.push_back(lv);
  }
  return v;
}

} // namespace iiotsim::ctrl
