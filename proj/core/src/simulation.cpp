#include "iiotsim/simulation.hpp"

#include <algorithm>

#include "iiotsim/sim/error.hpp"

namespace iiotsim {

using harness::EventSpec;
using harness::Scenario;
using sim::EventKind;
using sim::Kv;

const char* traffic_class_name(TrafficClass c) {
  switch (c) {
    case TrafficClass::TimeCritical: return "time-critical";
    case TrafficClass::Guaranteed: return "guaranteed";
    case TrafficClass::BestEffort: return "best-effort";
  }
  return "?";
}

std::optional<TrafficClass> traffic_class_from(std::string_view s) {
  if (s == "time-critical" || s == "tc") return TrafficClass::TimeCritical;
  if (s == "guaranteed") return TrafficClass::Guaranteed;
  if (s == "best-effort" || s == "be") return TrafficClass::BestEffort;
  return std::nullopt;
}

Simulation::Simulation(Scenario scn)
    : scn_(std::move(scn)),
      cfg_(scn_.config),
      eng_(scn_.seed),
      topo_(),
      qos_(topo_, cfg_.max_frame_bytes),
      policy_(),
      nfv_(eng_, topo_, cfg_),
      fabric_(eng_, topo_, nfv_, cfg_),
      ctrl_(eng_, topo_, fabric_, nfv_, policy_, qos_, cfg_) {
  build_topology();
  build_policy();
  build_controllers();
  wire_fabric();
  build_nfv();
  schedule_events();
  schedule_flows();
}

void Simulation::build_topology() {
  for (const auto& n : scn_.nodes) topo_.add_node(n);
  for (const auto& l : scn_.links) topo_.add_link(l);
  for (const auto& s : scn_.segments) topo_.add_segment(s);
  if (!topo_.has_segment(net::kQuarantineVlan)) {
    net::Segment q;
    q.vlan = net::kQuarantineVlan;
    q.name = "quarantine";
    q.security_level = 3;
    topo_.add_segment(q);
  }
}

void Simulation::build_policy() {
  policy_.set_session_ttl(cfg_.session_ttl_us);
  for (const auto& p : scn_.principals) policy_.add_principal(p);
  for (const auto& [role, perm] : scn_.roles) policy_.set_role_permission(role, perm);
  policy::SegmentPolicy sp;
  sp.rules = scn_.segment_rules;
  policy_.set_segment_policy(std::move(sp));
  ctrl_.set_compiled_policy(policy_.compile(topo_));
}

void Simulation::build_controllers() {
  for (const auto& c : scn_.controllers) ctrl_.add_controller(c);
  ctrl_.finalize();
}

void Simulation::wire_fabric() {
  fabric_.set_hooks(&ctrl_);
  fabric_.set_compiled_policy(&ctrl_.compiled_policy());
  fabric_.set_tamper_decider([this](const net::Packet& pkt) {
    auto it = targeted_tampers_.find({pkt.flow, pkt.seq});
    if (it != targeted_tampers_.end() && (it->second || pkt.attempt == 1)) return true;
    auto rit = tamper_rates_.find(pkt.flow);
    if (rit != tamper_rates_.end() && rit->second > 0.0) {
      std::int64_t threshold = static_cast<std::int64_t>(rit->second * 1'000'000.0);
      return eng_.rng().uniform(0, 999'999) < threshold;
    }
    return false;
  });
  fabric_.set_vpn_session_checker([this](std::int64_t flow, int instance) {
    auto it = ctrl_.flows().find(flow);
    if (it == ctrl_.flows().end()) return false;
    const policy::Session* s = policy_.session(it->second.session);
    return s && s->entry.kind == policy::EntryKind::Vpn &&
           s->entry.gateway_instance == instance;
  });
}

void Simulation::build_nfv() {
  for (const auto& [id, n] : topo_.nodes())
    if (n.kind == net::NodeKind::NfvHost) nfv_.register_host(id);
  for (const auto& spec : scn_.instances) {
    if (spec.deferred) continue;
    instantiate_spec(spec);
  }
}

void Simulation::instantiate_spec(const harness::VnfInstanceSpec& spec) {
  auto dit = scn_.descriptors.find(spec.descriptor);
  if (dit == scn_.descriptors.end())
    throw Error(Errc::ValidationError,
                "instance " + spec.name + " references unknown descriptor");
  std::set<nfv::Transition> tr(spec.transitions.begin(), spec.transitions.end());
  std::set<std::string> tags(spec.tags.begin(), spec.tags.end());
  int id = ctrl_.orchestrate_instantiate(dit->second, spec.host, std::move(tr), std::move(tags));
  instance_ids_[spec.name] = id;
}

int Simulation::instance_id(const std::string& name) const {
  auto it = instance_ids_.find(name);
  if (it == instance_ids_.end()) throw Error(Errc::UnknownInstance, name);
  return it->second;
}

std::optional<int> Simulation::plug_link(int host, int switch_id, int port) const {
  for (const auto& [lid, l] : topo_.links()) {
    if ((l.a.node == host && l.b.node == switch_id && l.b.port == port) ||
        (l.b.node == host && l.a.node == switch_id && l.a.port == port))
      return lid;
  }
  return std::nullopt;
}

void Simulation::schedule_events() {
  for (const auto& ev : scn_.events) {
    if (ev.kind == EventSpec::Kind::Tamper) {
      targeted_tampers_[{ev.flow, ev.seq}] = ev.tamper_all_attempts;
      continue;
    }
    eng_.schedule(ev.at,
                  ev.kind == EventSpec::Kind::LinkDown    ? EventKind::LinkFailure
                  : ev.kind == EventSpec::Kind::LinkUp    ? EventKind::LinkRepair
                  : ev.kind == EventSpec::Kind::PlugIn    ? EventKind::DevicePlugIn
                  : ev.kind == EventSpec::Kind::Unplug    ? EventKind::DevicePlugIn
                                                          : EventKind::ScenarioAction,
                  [this, ev] { apply_event(ev); });
  }
  for (const auto& tr : scn_.tamper_rates) tamper_rates_[tr.flow] = tr.probability;
}

void Simulation::apply_event(const EventSpec& ev) {
  switch (ev.kind) {
    case EventSpec::Kind::LinkDown: {
      topo_.set_link_state(ev.link, net::LinkState::Down);
      eng_.emit("world", "link-down", {Kv{"link", ev.link}});
      fabric_.on_link_state_changed(ev.link);
      ctrl_.on_link_event(ev.link, false);
      break;
    }
    case EventSpec::Kind::LinkUp: {
      topo_.set_link_state(ev.link, net::LinkState::Up);
      eng_.emit("world", "link-up", {Kv{"link", ev.link}});
      ctrl_.on_link_event(ev.link, true);
      break;
    }
    case EventSpec::Kind::PlugIn: {
      auto lid = plug_link(ev.host, ev.switch_id, ev.port);
      if (!lid) throw Error(Errc::UnknownLink, "no access link for plug-in");
      topo_.set_link_state(*lid, net::LinkState::Up);
      topo_.assign_port_segment({ev.switch_id, ev.port}, net::kQuarantineVlan);
      eng_.emit("world", "device-plug-in",
                {Kv{"host", ev.host}, Kv{"switch", ev.switch_id}, Kv{"port", ev.port},
                 Kv{"principal", ev.principal}});
      std::string cred = ev.credential;
      if (cred.empty() && policy_.principal_known(ev.principal))
        cred = policy_.principal(ev.principal).credential;
      fabric_.inject_auth(ev.host, ev.principal, cred);
      break;
    }
    case EventSpec::Kind::Unplug: {
      const net::Node& h = topo_.node(ev.host);
      for (int p : h.ports) {
        auto lid = topo_.link_at({ev.host, p});
        if (!lid || topo_.link(*lid).state != net::LinkState::Up) continue;
        net::PortRef sw_side = topo_.link(*lid).far(ev.host);
        topo_.set_link_state(*lid, net::LinkState::Down);
        topo_.assign_port_segment(sw_side, 0);
        eng_.emit("world", "device-unplug", {Kv{"host", ev.host}});
        fabric_.on_link_state_changed(*lid);
        ctrl_.on_link_event(*lid, false);
      }
      break;
    }
    case EventSpec::Kind::Authenticate: {
      policy::SessionEntry entry;
      if (ev.entry.rfind("vpn:", 0) == 0) {
        entry.kind = policy::EntryKind::Vpn;
        entry.gateway_instance = instance_id(ev.entry.substr(4));
      } else if (ev.entry.rfind("port:", 0) == 0) {
        entry.kind = policy::EntryKind::InternalPort;
        auto rest = ev.entry.substr(5);
        auto colon = rest.find(':');
        entry.port = {std::stoi(rest.substr(0, colon)), std::stoi(rest.substr(colon + 1))};
      }
      std::string cred = ev.credential;
      if (cred.empty() && policy_.principal_known(ev.principal))
        cred = policy_.principal(ev.principal).credential;
      ctrl_.authenticate(ev.principal, cred, entry);
      break;
    }
    case EventSpec::Kind::KillController:
      ctrl_.kill_controller(ev.controller);
      break;
    case EventSpec::Kind::FailNfvHost:
      ctrl_.fail_nfv_host(ev.host);
      break;
    case EventSpec::Kind::Tamper:
      break; // consumed at schedule time
    case EventSpec::Kind::RequestFlow:
      ctrl_.request_flow(ev.flow);
      break;
    case EventSpec::Kind::TeardownFlow:
      ctrl_.teardown_flow(ev.flow, "scenario");
      break;
    case EventSpec::Kind::RebindFlow:
      ctrl_.rebind_flow(ev.flow, ev.new_dst);
      break;
    case EventSpec::Kind::RegisterApp: {
      auto app = ctrl::make_builtin_app(ev.app);
      if (!app) throw Error(Errc::ValidationError, "unknown app " + ev.app);
      ctrl_.register_app(ev.controller, std::move(app));
      break;
    }
    case EventSpec::Kind::DeregisterApp:
      ctrl_.deregister_app(ev.controller, ev.app);
      break;
    case EventSpec::Kind::Instantiate: {
      auto it = std::find_if(
          scn_.instances.begin(), scn_.instances.end(),
          [&](const harness::VnfInstanceSpec& s) { return s.name == ev.instance; });
      if (it == scn_.instances.end()) throw Error(Errc::UnknownInstance, ev.instance);
      instantiate_spec(*it);
      break;
    }
  }
}

void Simulation::schedule_flows() {
  for (const auto& f : scn_.flows) {
    FlowIntent intent;
    intent.src = f.src;
    intent.dst = f.dst;
    intent.tclass = f.tclass;
    intent.demand_kbps = f.demand_kbps;
    intent.latency_bound_us = f.latency_bound_us;
    intent.jitter_bound_us = f.jitter_bound_us;
    intent.requester = f.principal;
    intent.access_tag = f.access_tag;
    ctrl_.register_flow_spec(f.id, intent);

    if (f.proactive) {
      sim::SimTime req = f.request_at_us.value_or(std::max<sim::SimTime>(0, f.start_us - 2000));
      std::int64_t flow = f.id;
      eng_.schedule(req, EventKind::ScenarioAction, [this, flow] { ctrl_.request_flow(flow); });
    }
    if (f.period_us > 0 && f.start_us < scn_.duration_us) {
      std::int64_t flow = f.id;
      sim::SimTime period = f.period_us;
      sim::SimTime stop = f.stop_us > 0 ? f.stop_us : scn_.duration_us;
      std::int64_t size = f.size_bytes;
      eng_.schedule(f.start_us, EventKind::FlowTimer,
                    [this, flow, period, stop, size] { inject_tick(flow, period, stop, size); });
    }
  }
}

void Simulation::inject_tick(std::int64_t flow, sim::SimTime period, sim::SimTime stop,
                             std::int64_t size) {
  const FlowIntent& intent = ctrl_.flow_intent(flow);
  net::Packet p;
  p.flow = flow;
  p.seq = ++seq_counters_[flow];
  p.src = intent.src;
  p.dst = intent.dst;
  p.tclass = intent.tclass;
  p.size_bytes = size;
  fabric_.inject(std::move(p));
  sim::SimTime next = eng_.now() + period;
  if (next < stop && next < scn_.duration_us)
    eng_.schedule(next, EventKind::FlowTimer,
                  [this, flow, period, stop, size] { inject_tick(flow, period, stop, size); });
}

const sim::Trace& Simulation::run() {
  eng_.run_until(scn_.duration_us);
  return eng_.trace();
}

} // namespace iiotsim
