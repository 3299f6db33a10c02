#include "iiotsim/harness/builtins.hpp"

#include "iiotsim/sim/error.hpp"
#include "iiotsim/sim/rng.hpp"

namespace iiotsim::harness {

namespace {

using net::LinkState;
using net::NodeKind;
using net::PortRef;
using net::Region;

net::Node sw(int id, std::vector<int> ports, const std::string& name,
             std::set<int> gateway = {}) {
  net::Node n;
  n.id = id;
  n.kind = NodeKind::SdnSwitch;
  n.region = Region::Sdn;
  n.ports = std::move(ports);
  n.name = name;
  n.gateway_ports = std::move(gateway);
  return n;
}

net::Node legacy_sw(int id, std::vector<int> ports, const std::string& name) {
  net::Node n;
  n.id = id;
  n.kind = NodeKind::LegacySwitch;
  n.region = Region::Legacy;
  n.ports = std::move(ports);
  n.name = name;
  return n;
}

net::Node host(int id, const std::string& name, Region region = Region::Sdn) {
  net::Node n;
  n.id = id;
  n.kind = NodeKind::Host;
  n.region = region;
  n.ports = {1};
  n.name = name;
  return n;
}

net::Node nfv_host(int id, const std::string& name, int cpu, int mem) {
  net::Node n;
  n.id = id;
  n.kind = NodeKind::NfvHost;
  n.region = Region::Sdn;
  n.ports = {1};
  n.name = name;
  n.cpu_capacity = cpu;
  n.mem_capacity = mem;
  return n;
}

net::Link mklink(int id, PortRef a, PortRef b, std::int64_t lat, std::int64_t bw,
                 std::int64_t jitter = 0, bool up = true) {
  net::Link l;
  l.id = id;
  l.a = a;
  l.b = b;
  l.latency_us = lat;
  l.bandwidth_kbps = bw;
  l.jitter_bound_us = jitter;
  l.state = up ? LinkState::Up : LinkState::Down;
  return l;
}

net::Segment seg(int vlan, const std::string& name, int level, std::set<PortRef> members) {
  net::Segment s;
  s.vlan = vlan;
  s.name = name;
  s.security_level = level;
  s.members = std::move(members);
  return s;
}

ctrl::ControllerCfg controller(int id, ctrl::CtrlLevel level, const std::string& name,
                               std::set<int> scope, std::optional<int> parent = std::nullopt,
                               std::optional<int> standby = std::nullopt) {
  ctrl::ControllerCfg c;
  c.id = id;
  c.level = level;
  c.name = name;
  c.scope = std::move(scope);
  c.parent = parent;
  c.standby = standby;
  return c;
}

nfv::VnfDescriptor descriptor(const std::string& name, nfv::VnfKind kind, std::int64_t delay) {
  nfv::VnfDescriptor d;
  d.name = name;
  d.kind = kind;
  d.cpu_demand = 1;
  d.mem_demand = 1;
  d.processing_delay_us = delay;
  return d;
}

policy::Principal principal(int id, const std::string& name, policy::PrincipalKind kind,
                            std::set<std::string> roles, const std::string& credential,
                            std::optional<policy::DeviceProfile> profile = std::nullopt) {
  policy::Principal p;
  p.id = id;
  p.name = name;
  p.kind = kind;
  p.roles = std::move(roles);
  p.credential = credential;
  p.profile = profile;
  return p;
}

policy::SegmentRule allow_fw(int from, int to) {
  policy::SegmentRule r;
  r.from = from;
  r.to = to;
  r.allow = true;
  r.require_firewall = true;
  return r;
}

FlowSpec flow(std::int64_t id, const std::string& name, int src, int dst, TrafficClass cls,
              std::int64_t demand, std::int64_t size, sim::SimTime period, sim::SimTime start,
              sim::SimTime stop, int principal_id) {
  FlowSpec f;
  f.id = id;
  f.name = name;
  f.src = src;
  f.dst = dst;
  f.tclass = cls;
  f.demand_kbps = demand;
  f.size_bytes = size;
  f.period_us = period;
  f.start_us = start;
  f.stop_us = stop;
  f.principal = principal_id;
  return f;
}

EventSpec auth_event(sim::SimTime at, int principal_id, const std::string& entry,
                     const std::string& credential = "") {
  EventSpec ev;
  ev.at = at;
  ev.kind = EventSpec::Kind::Authenticate;
  ev.principal = principal_id;
  ev.entry = entry;
  ev.credential = credential;
  return ev;
}

EventSpec link_event(sim::SimTime at, bool up, int link) {
  EventSpec ev;
  ev.at = at;
  ev.kind = up ? EventSpec::Kind::LinkUp : EventSpec::Kind::LinkDown;
  ev.link = link;
  return ev;
}

} // namespace

// ---------------------------------------------------------------------------
// Use case 1: a visual inspection camera temporarily bound to machine A,
// re-bound to machine B mid-run. Time-critical machine control shares the
// fabric with a saturating best-effort bulk transfer; a balancer app steers
// a late flow off the loaded uplink.
Scenario inspection_camera_scenario() {
  Scenario s;
  s.name = "inspection-camera";
  s.seed = 42;
  s.duration_us = 1'000'000;

  s.nodes = {
      sw(1, {1, 2, 3, 4}, "swF"),
      sw(2, {1, 2, 3}, "swL1"),
      sw(3, {1, 2, 3, 4, 5}, "swM1"),
      sw(4, {1, 2, 3, 4, 5, 6}, "swM2"),
      nfv_host(5, "nfv1", 4, 4),
      host(10, "cam"),
      host(11, "mca"),
      host(12, "mca2"),
      host(13, "mcb"),
      host(14, "an"),
      host(15, "console"),
      host(16, "an2"),
  };
  s.links = {
      mklink(1, {1, 1}, {2, 1}, 10, 100'000),
      mklink(2, {2, 2}, {3, 1}, 10, 100'000),
      mklink(3, {2, 3}, {4, 1}, 10, 100'000),
      mklink(4, {1, 2}, {5, 1}, 5, 1'000'000),
      mklink(5, {3, 2}, {4, 2}, 10, 100'000),
      mklink(6, {3, 3}, {10, 1}, 5, 100'000),
      mklink(7, {3, 4}, {11, 1}, 5, 100'000),
      mklink(8, {4, 3}, {12, 1}, 5, 100'000),
      mklink(9, {4, 4}, {13, 1}, 5, 100'000),
      mklink(10, {1, 3}, {14, 1}, 5, 100'000),
      mklink(11, {3, 5}, {15, 1}, 5, 100'000),
      mklink(12, {4, 5}, {16, 1}, 5, 100'000),
      mklink(13, {1, 4}, {4, 6}, 10, 100'000),
  };
  s.segments = {
      seg(10, "machine-a", 2, {{3, 4}, {4, 3}}),
      seg(11, "machine-b", 2, {{4, 4}}),
      seg(20, "services", 1, {{1, 3}, {3, 5}, {4, 5}}),
      seg(30, "sensors", 1, {{3, 3}}),
  };
  s.controllers = {
      controller(1, ctrl::CtrlLevel::Facility, "cf", {1, 2, 3, 4}),
      controller(2, ctrl::CtrlLevel::Line, "cl", {2, 3, 4}, 1),
      controller(3, ctrl::CtrlLevel::Machine, "cm1", {3}, 2),
      controller(4, ctrl::CtrlLevel::Machine, "cm2", {4}, 2),
  };
  s.descriptors["fw"] = descriptor("fw", nfv::VnfKind::Firewall, 10);
  s.descriptors["mon"] = descriptor("mon", nfv::VnfKind::TrafficMonitor, 5);
  s.descriptors["auth"] = descriptor("auth", nfv::VnfKind::Authenticator, 50);
  s.instances = {
      {"auth1", "auth", 5, {}, {}, false},
      {"fw1", "fw", 5, {{30, 10}, {30, 11}, {20, 30}}, {}, false},
      {"mon1", "mon", 5, {}, {"camera-tap"}, false},
  };
  s.roles["camera-op"] = {{10, 11}, {}};
  s.roles["analytics"] = {{30}, {}};
  s.roles["ops"] = {{20}, {}};
  s.roles["machine"] = {{10}, {}};
  s.principals = {
      principal(1, "cam-svc", policy::PrincipalKind::Service, {"camera-op"}, "tok-cam"),
      principal(2, "analytics-svc", policy::PrincipalKind::Service, {"analytics"}, "tok-an"),
      principal(3, "ops-svc", policy::PrincipalKind::Service, {"ops"}, "tok-ops"),
      principal(4, "machine-a-svc", policy::PrincipalKind::Service, {"machine"}, "tok-ma"),
  };
  s.segment_rules = {allow_fw(30, 10), allow_fw(30, 11), allow_fw(20, 30)};

  {
    FlowSpec f = flow(1, "tc-control", 11, 12, TrafficClass::TimeCritical, 10'000, 125, 1'000,
                      5'000, 995'000, 4);
    f.latency_bound_us = 400;
    f.proactive = true;
    f.request_at_us = 2'500;
    f.check_latency_us = 400;
    f.check_jitter_us = 400;
    f.check_max_loss = 0.0;
    s.flows.push_back(f);
  }
  {
    FlowSpec f = flow(2, "camera-stream", 10, 11, TrafficClass::Guaranteed, 50'000, 1'250, 200,
                      6'000, 995'000, 1);
    f.proactive = true;
    f.request_at_us = 3'000;
    f.access_tag = "camera-tap";
    f.check_latency_us = 5'000;
    f.check_max_loss = 0.005;
    s.flows.push_back(f);
  }
  {
    FlowSpec f = flow(3, "analytics-pull", 14, 10, TrafficClass::Guaranteed, 20'000, 1'250, 500,
                      10'000, 990'000, 2);
    f.proactive = true;
    f.request_at_us = 8'000;
    f.check_latency_us = 5'000;
    f.check_max_loss = 0.0;
    s.flows.push_back(f);
  }
  s.flows.push_back(
      flow(4, "be-bulk", 15, 16, TrafficClass::BestEffort, 0, 1'500, 100, 500'000, 990'000, 3));
  {
    FlowSpec f = flow(5, "steered", 15, 14, TrafficClass::Guaranteed, 20'000, 500, 1'000,
                      710'000, 990'000, 3);
    f.proactive = true;
    f.request_at_us = 700'000;
    f.check_latency_us = 5'000;
    s.flows.push_back(f);
  }

  s.events.push_back(auth_event(1'500, 1, "port:3:3"));
  s.events.push_back(auth_event(1'600, 2, "port:1:3"));
  s.events.push_back(auth_event(1'700, 3, "port:3:5"));
  s.events.push_back(auth_event(1'800, 4, "port:3:4"));
  {
    EventSpec ev;
    ev.at = 300'000;
    ev.kind = EventSpec::Kind::RegisterApp;
    ev.controller = 1;
    ev.app = "alt-path-balancer";
    s.events.push_back(ev);
  }
  {
    EventSpec ev;
    ev.at = 305'800;
    ev.kind = EventSpec::Kind::Tamper;
    ev.flow = 2;
    ev.seq = 1'500;
    s.events.push_back(ev);
  }
  {
    EventSpec ev;
    ev.at = 600'000;
    ev.kind = EventSpec::Kind::RebindFlow;
    ev.flow = 2;
    ev.new_dst = 13;
    s.events.push_back(ev);
  }

  s.checks.dr2 = Dr2Spec{1, 5'000, 500'000, 500'000, 995'000};
  s.checks.dr7_availability = 0.99;
  s.checks.redundant_pairs = {{3, 4}};
  return s;
}

// ---------------------------------------------------------------------------
// Use case 2: direct machine access from outside the network. A maintenance
// user authenticates through a VPN gateway (one bad credential first), opens
// a flow to a machine component across segments, and a ring failure forces a
// mid-session reroute. A probe toward an off-limits historian is denied.
Scenario external_access_scenario() {
  Scenario s;
  s.name = "external-access";
  s.seed = 7;
  s.duration_us = 1'000'000;

  s.nodes = {
      sw(1, {1, 2, 3, 4}, "swF"),
      sw(2, {1, 2, 3, 4}, "swL1"),
      sw(3, {1, 2, 3, 4}, "swM1"),
      nfv_host(4, "nfv1", 4, 4),
      nfv_host(5, "nfv2", 2, 2),
      host(10, "ext"),
      host(11, "mc"),
      host(12, "hist"),
      host(13, "ds"),
  };
  s.links = {
      mklink(1, {1, 1}, {2, 1}, 10, 100'000, 5),
      mklink(2, {2, 2}, {3, 2}, 10, 100'000, 5),
      mklink(3, {3, 1}, {1, 2}, 10, 100'000, 5),
      mklink(4, {1, 4}, {4, 1}, 5, 1'000'000),
      mklink(5, {2, 4}, {5, 1}, 5, 1'000'000),
      mklink(6, {1, 3}, {10, 1}, 50, 100'000, 10),
      mklink(7, {3, 3}, {11, 1}, 5, 100'000),
      mklink(8, {3, 4}, {12, 1}, 5, 100'000),
      mklink(9, {2, 3}, {13, 1}, 5, 100'000),
  };
  s.segments = {
      seg(99, "external", 3, {{1, 3}}),
      seg(10, "machine", 2, {{3, 3}}),
      seg(12, "historian", 2, {{3, 4}}),
      seg(20, "services", 1, {{2, 3}}),
  };
  s.controllers = {
      controller(1, ctrl::CtrlLevel::Facility, "cf", {1, 2, 3}),
      controller(2, ctrl::CtrlLevel::Line, "cl", {2, 3}, 1),
      controller(3, ctrl::CtrlLevel::Machine, "cm1", {3}, 2),
  };
  s.descriptors["fw"] = descriptor("fw", nfv::VnfKind::Firewall, 10);
  s.descriptors["vpn"] = descriptor("vpn", nfv::VnfKind::VpnGateway, 20);
  s.descriptors["auth"] = descriptor("auth", nfv::VnfKind::Authenticator, 50);
  s.descriptors["mon"] = descriptor("mon", nfv::VnfKind::TrafficMonitor, 5);
  s.instances = {
      {"auth1", "auth", 4, {}, {}, false},
      {"vpn1", "vpn", 4, {}, {"vpn"}, false},
      {"fw1", "fw", 4, {{99, 10}, {10, 20}}, {}, false},
      {"mon1", "mon", 5, {}, {"maint-tap"}, false},
  };
  s.roles["maintenance"] = {{10}, {}};
  s.roles["machine-data"] = {{20}, {}};
  s.principals = {
      principal(1, "maint-user", policy::PrincipalKind::HumanUser, {"maintenance"}, "tok-maint"),
      principal(2, "mc-svc", policy::PrincipalKind::Service, {"machine-data"}, "tok-mc"),
  };
  s.segment_rules = {allow_fw(99, 10), allow_fw(10, 20)};

  {
    FlowSpec f = flow(1, "remote-access", 10, 11, TrafficClass::Guaranteed, 10'000, 625, 500,
                      12'000, 990'000, 1);
    f.proactive = true;
    f.request_at_us = 10'000;
    f.check_latency_us = 5'000;
    f.check_max_loss = 0.02;
    s.flows.push_back(f);
  }
  {
    FlowSpec f = flow(2, "machine-stream", 11, 13, TrafficClass::Guaranteed, 20'000, 1'250,
                      1'000, 25'000, 985'000, 2);
    f.proactive = true;
    f.request_at_us = 20'000;
    f.access_tag = "maint-tap";
    f.check_latency_us = 8'000;
    f.check_max_loss = 0.02;
    s.flows.push_back(f);
  }
  s.flows.push_back(
      flow(3, "probe-denied", 10, 12, TrafficClass::Guaranteed, 5'000, 500, 5'000, 16'000,
           100'000, 1));

  s.events.push_back(auth_event(1'500, 2, "port:3:3"));
  s.events.push_back(auth_event(2'000, 1, "vpn:vpn1", "wrong-token"));
  s.events.push_back(auth_event(5'000, 1, "vpn:vpn1"));
  s.events.push_back(link_event(300'000, false, 3));
  s.events.push_back(link_event(600'000, true, 3));
  {
    EventSpec ev;
    ev.at = 450'000;
    ev.kind = EventSpec::Kind::Tamper;
    ev.flow = 2;
    ev.seq = 425;
    s.events.push_back(ev);
  }

  s.checks.dr7_availability = 0.99;
  s.checks.redundant_pairs = {{1, 3}};
  return s;
}

// ---------------------------------------------------------------------------
// Use case 3: an autonomous transport system re-plugs between machine cells
// with 802.1X onboarding, talks to machines ad hoc, a legacy cell exchanges
// data across the gateway, the machine controller fails over to its standby,
// and an NFV host failure migrates the firewall mid-run.
Scenario autonomous_transport_scenario() {
  Scenario s;
  s.name = "autonomous-transport";
  s.seed = 11;
  s.duration_us = 1'000'000;

  s.nodes = {
      sw(1, {1, 2, 3}, "swF"),
      sw(2, {1, 2, 3}, "swL1"),
      sw(3, {1, 2, 3, 4}, "swM1"),
      sw(4, {1, 2, 3, 4}, "swM2", {4}),
      legacy_sw(5, {1, 2}, "lg1"),
      nfv_host(6, "nfv1", 2, 2),
      nfv_host(7, "nfv2", 4, 4),
      [] {
        net::Node n;
        n.id = 10;
        n.kind = NodeKind::Host;
        n.region = Region::Sdn;
        n.ports = {1, 2};
        n.name = "agv";
        return n;
      }(),
      host(11, "maca"),
      host(12, "macb"),
      host(13, "leg", Region::Legacy),
      host(14, "rogue"),
  };
  s.links = {
      mklink(1, {1, 1}, {2, 1}, 10, 100'000, 2),
      mklink(2, {2, 2}, {3, 1}, 10, 100'000, 2),
      mklink(3, {2, 3}, {4, 1}, 10, 100'000, 2),
      mklink(4, {1, 2}, {6, 1}, 5, 1'000'000),
      mklink(5, {1, 3}, {7, 1}, 5, 1'000'000),
      mklink(6, {3, 2}, {11, 1}, 5, 100'000),
      mklink(7, {4, 2}, {12, 1}, 5, 100'000),
      mklink(8, {3, 3}, {10, 1}, 5, 100'000, 0, false),
      mklink(9, {4, 3}, {10, 2}, 5, 100'000, 0, false),
      mklink(10, {4, 4}, {5, 1}, 20, 10'000),
      mklink(11, {5, 2}, {13, 1}, 20, 10'000),
      mklink(12, {3, 4}, {14, 1}, 5, 100'000, 0, false),
  };
  s.segments = {
      seg(10, "machine-a", 2, {{3, 2}}),
      seg(11, "machine-b", 2, {{4, 2}}),
      seg(15, "transport", 2, {}),
      seg(12, "legacy-cell", 1, {{5, 2}}),
  };
  s.controllers = {
      controller(1, ctrl::CtrlLevel::Facility, "cf", {1, 2, 3, 4}),
      controller(2, ctrl::CtrlLevel::Line, "cl", {2, 3, 4}, 1),
      controller(3, ctrl::CtrlLevel::Machine, "cm1", {3}, 2),
      controller(4, ctrl::CtrlLevel::Machine, "cm2", {4}, 2, 9),
  };
  s.descriptors["fw"] = descriptor("fw", nfv::VnfKind::Firewall, 10);
  s.descriptors["auth"] = descriptor("auth", nfv::VnfKind::Authenticator, 50);
  s.instances = {
      {"auth1", "auth", 6, {}, {}, false},
      {"fw1",
       "fw",
       6,
       {{15, 10}, {15, 11}, {10, 15}, {11, 15}, {12, 10}, {10, 12}},
       {},
       false},
  };
  s.roles["transport"] = {{10, 11}, {}};
  s.roles["machine"] = {{15, 12}, {}};
  s.roles["legacy-ops"] = {{10}, {}};
  s.principals = {
      principal(1, "agv-dev", policy::PrincipalKind::Device, {"transport"}, "tok-agv",
                policy::DeviceProfile{15, TrafficClass::Guaranteed}),
      principal(2, "maca-svc", policy::PrincipalKind::Service, {"machine"}, "tok-maca"),
      principal(3, "leg-svc", policy::PrincipalKind::Service, {"legacy-ops"}, "tok-leg"),
      principal(4, "rogue-dev", policy::PrincipalKind::Device, {"transport"}, "tok-rogue",
                policy::DeviceProfile{15, TrafficClass::Guaranteed}),
      principal(5, "macb-svc", policy::PrincipalKind::Service, {"machine"}, "tok-macb"),
  };
  s.segment_rules = {allow_fw(15, 10), allow_fw(15, 11), allow_fw(10, 15),
                     allow_fw(11, 15), allow_fw(12, 10), allow_fw(10, 12)};

  {
    FlowSpec f =
        flow(1, "agv-to-maca", 10, 11, TrafficClass::Guaranteed, 5'000, 250, 2'000, 8'000,
             290'000, 1);
    f.check_latency_us = 5'000;
    f.check_max_loss = 0.01;
    s.flows.push_back(f);
  }
  {
    FlowSpec f =
        flow(2, "agv-to-macb", 10, 12, TrafficClass::Guaranteed, 5'000, 250, 2'000, 312'000,
             990'000, 1);
    f.check_latency_us = 15'000;
    f.check_max_loss = 0.02;
    s.flows.push_back(f);
  }
  {
    FlowSpec f =
        flow(3, "macb-to-agv", 12, 10, TrafficClass::Guaranteed, 5'000, 250, 2'000, 620'000,
             990'000, 5);
    f.proactive = true;
    f.request_at_us = 615'000;
    f.check_latency_us = 15'000;
    f.check_max_loss = 0.02;
    s.flows.push_back(f);
  }
  {
    FlowSpec f =
        flow(4, "legacy-out", 13, 11, TrafficClass::BestEffort, 0, 500, 4'000, 50'000, 990'000,
             3);
    f.check_latency_us = 30'000;
    f.check_max_loss = 0.03;
    s.flows.push_back(f);
  }
  {
    FlowSpec f =
        flow(5, "legacy-in", 11, 13, TrafficClass::BestEffort, 0, 500, 4'000, 60'000, 990'000,
             2);
    f.check_latency_us = 30'000;
    f.check_max_loss = 0.03;
    s.flows.push_back(f);
  }
  s.flows.push_back(
      flow(6, "rogue-probe", 14, 11, TrafficClass::BestEffort, 0, 200, 10'000, 110'000, 200'000,
           4));

  s.events.push_back(auth_event(1'500, 2, "port:3:2"));
  s.events.push_back(auth_event(1'600, 3, "port:5:2"));
  s.events.push_back(auth_event(1'700, 5, "port:4:2"));
  {
    EventSpec ev;
    ev.at = 5'000;
    ev.kind = EventSpec::Kind::PlugIn;
    ev.host = 10;
    ev.switch_id = 3;
    ev.port = 3;
    ev.principal = 1;
    s.events.push_back(ev);
  }
  {
    EventSpec ev;
    ev.at = 100'000;
    ev.kind = EventSpec::Kind::PlugIn;
    ev.host = 14;
    ev.switch_id = 3;
    ev.port = 4;
    ev.principal = 4;
    ev.credential = "bad-token";
    s.events.push_back(ev);
  }
  {
    EventSpec ev;
    ev.at = 295'000;
    ev.kind = EventSpec::Kind::TeardownFlow;
    ev.flow = 1;
    s.events.push_back(ev);
  }
  {
    EventSpec ev;
    ev.at = 300'000;
    ev.kind = EventSpec::Kind::Unplug;
    ev.host = 10;
    s.events.push_back(ev);
  }
  {
    EventSpec ev;
    ev.at = 310'000;
    ev.kind = EventSpec::Kind::PlugIn;
    ev.host = 10;
    ev.switch_id = 4;
    ev.port = 3;
    ev.principal = 1;
    s.events.push_back(ev);
  }
  {
    EventSpec ev;
    ev.at = 600'000;
    ev.kind = EventSpec::Kind::KillController;
    ev.controller = 4;
    s.events.push_back(ev);
  }
  {
    EventSpec ev;
    ev.at = 500'000;
    ev.kind = EventSpec::Kind::FailNfvHost;
    ev.host = 6;
    s.events.push_back(ev);
  }
  {
    EventSpec ev;
    ev.at = 758'000;
    ev.kind = EventSpec::Kind::Tamper;
    ev.flow = 2;
    ev.seq = 220;
    s.events.push_back(ev);
  }

  s.checks.dr7_availability = 0.99;
  s.checks.dr9_onboarding_bound_us = 5'000;
  return s;
}

std::vector<Scenario> builtin_scenarios() {
  return {inspection_camera_scenario(), external_access_scenario(),
          autonomous_transport_scenario()};
}

std::vector<std::string> builtin_names() {
  return {"inspection-camera", "external-access", "autonomous-transport"};
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "inspection-camera") return inspection_camera_scenario();
  if (name == "external-access") return external_access_scenario();
  if (name == "autonomous-transport") return autonomous_transport_scenario();
  throw Error(Errc::ParseError, "unknown builtin scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// Verification scenarios.

Scenario interference_scenario() {
  Scenario s;
  s.name = "interference";
  s.seed = 5;
  s.duration_us = 1'000'000;
  s.nodes = {
      sw(1, {1, 2, 3}, "sw1"),  sw(2, {1, 2, 3}, "sw2"), sw(3, {1, 2, 3}, "sw3"),
      nfv_host(4, "nfv1", 2, 2), host(10, "h1"),          host(11, "h2"),
      host(12, "hb1"),           host(13, "hb2"),
  };
  s.links = {
      mklink(1, {1, 1}, {2, 1}, 10, 100'000), mklink(2, {2, 2}, {3, 1}, 10, 100'000),
      mklink(3, {2, 3}, {4, 1}, 5, 1'000'000), mklink(4, {1, 2}, {10, 1}, 5, 100'000),
      mklink(5, {3, 2}, {11, 1}, 5, 100'000),  mklink(6, {1, 3}, {12, 1}, 5, 100'000),
      mklink(7, {3, 3}, {13, 1}, 5, 100'000),
  };
  s.segments = {
      seg(10, "prod", 2, {{1, 2}, {3, 2}}),
      seg(20, "bulk", 1, {{1, 3}, {3, 3}}),
  };
  s.controllers = {controller(1, ctrl::CtrlLevel::Facility, "cf", {1, 2, 3})};
  s.descriptors["auth"] = descriptor("auth", nfv::VnfKind::Authenticator, 50);
  s.instances = {{"auth1", "auth", 4, {}, {}, false}};
  s.roles["prod"] = {{10}, {}};
  s.roles["bulk"] = {{20}, {}};
  s.principals = {
      principal(1, "svc1", policy::PrincipalKind::Service, {"prod"}, "tok-1"),
      principal(2, "svc2", policy::PrincipalKind::Service, {"bulk"}, "tok-2"),
  };
  {
    FlowSpec f = flow(1, "tc", 10, 11, TrafficClass::TimeCritical, 5'000, 125, 500, 5'000,
                      995'000, 1);
    f.latency_bound_us = 800;
    f.proactive = true;
    f.request_at_us = 2'500;
    f.check_latency_us = 800;
    f.check_max_loss = 0.0;
    s.flows.push_back(f);
  }
  {
    FlowSpec f =
        flow(2, "be", 12, 13, TrafficClass::BestEffort, 0, 1'500, 100, 500'000, 990'000, 2);
    f.proactive = true;
    f.request_at_us = 490'000;
    s.flows.push_back(f);
  }
  s.events.push_back(auth_event(1'500, 1, "port:1:2"));
  s.events.push_back(auth_event(1'600, 2, "port:1:3"));
  s.checks.dr2 = Dr2Spec{1, 5'000, 500'000, 510'000, 995'000};
  return s;
}

Scenario ring_failure_scenario() {
  Scenario s;
  s.name = "ring-failure";
  s.seed = 9;
  s.duration_us = 1'000'000;
  s.nodes = {
      sw(1, {1, 2, 3, 4}, "swA"), sw(2, {1, 2}, "swB"),    sw(3, {1, 2, 3}, "swC"),
      sw(4, {1, 2}, "swD"),       nfv_host(5, "nfv1", 2, 2), host(10, "src"),
      host(11, "dst"),
  };
  s.links = {
      mklink(1, {1, 1}, {2, 1}, 10, 100'000), mklink(2, {2, 2}, {3, 1}, 10, 100'000),
      mklink(3, {3, 2}, {4, 1}, 10, 100'000), mklink(4, {4, 2}, {1, 2}, 10, 100'000),
      mklink(5, {1, 3}, {10, 1}, 5, 100'000), mklink(6, {3, 3}, {11, 1}, 5, 100'000),
      mklink(7, {1, 4}, {5, 1}, 5, 1'000'000),
  };
  s.segments = {seg(10, "prod", 2, {{1, 3}, {3, 3}})};
  s.controllers = {controller(1, ctrl::CtrlLevel::Facility, "cf", {1, 2, 3, 4})};
  s.descriptors["auth"] = descriptor("auth", nfv::VnfKind::Authenticator, 50);
  s.instances = {{"auth1", "auth", 5, {}, {}, false}};
  s.roles["prod"] = {{10}, {}};
  s.principals = {principal(1, "svc1", policy::PrincipalKind::Service, {"prod"}, "tok-1")};
  {
    FlowSpec f =
        flow(1, "ring-flow", 10, 11, TrafficClass::Guaranteed, 10'000, 500, 500, 5'000,
             995'000, 1);
    f.proactive = true;
    f.request_at_us = 2'500;
    f.check_latency_us = 5'000;
    f.check_max_loss = 0.02;
    s.flows.push_back(f);
  }
  s.events.push_back(auth_event(1'500, 1, "port:1:3"));
  s.events.push_back(link_event(200'000, false, 2)); // B-C fails, reroute via D
  s.events.push_back(link_event(400'000, true, 2));
  s.events.push_back(link_event(600'000, false, 4)); // both rails out: suspend
  s.events.push_back(link_event(600'000, false, 1));
  s.events.push_back(link_event(606'000, true, 1));  // repair: resume via B
  s.checks.dr7_availability = 0.99;
  s.checks.redundant_pairs = {{1, 3}};
  return s;
}

Scenario controller_kill_scenario() {
  Scenario s;
  s.name = "controller-kill";
  s.seed = 13;
  s.duration_us = 1'000'000;
  s.nodes = {
      sw(1, {1, 2, 3}, "swF"),   sw(2, {1, 2}, "swM1"), sw(3, {1, 2, 3}, "swM2"),
      nfv_host(4, "nfv1", 2, 2), host(10, "ha"),        host(11, "hb"),
      host(12, "hc"),
  };
  s.links = {
      mklink(1, {1, 1}, {2, 1}, 10, 100'000), mklink(2, {1, 2}, {3, 1}, 10, 100'000),
      mklink(3, {1, 3}, {4, 1}, 5, 1'000'000), mklink(4, {2, 2}, {10, 1}, 5, 100'000),
      mklink(5, {3, 2}, {11, 1}, 5, 100'000),  mklink(6, {3, 3}, {12, 1}, 5, 100'000),
  };
  s.segments = {seg(10, "prod", 2, {{2, 2}, {3, 2}, {3, 3}})};
  s.controllers = {
      controller(1, ctrl::CtrlLevel::Facility, "cf", {1, 2, 3}),
      controller(2, ctrl::CtrlLevel::Line, "cl", {2, 3}, 1, 5),
  };
  s.descriptors["auth"] = descriptor("auth", nfv::VnfKind::Authenticator, 50);
  s.instances = {{"auth1", "auth", 4, {}, {}, false}};
  s.roles["prod"] = {{10}, {}};
  s.principals = {principal(1, "svc1", policy::PrincipalKind::Service, {"prod"}, "tok-1")};
  {
    FlowSpec f = flow(1, "established", 10, 11, TrafficClass::Guaranteed, 5'000, 250, 1'000,
                      5'000, 995'000, 1);
    f.proactive = true;
    f.request_at_us = 2'500;
    f.check_latency_us = 5'000;
    f.check_max_loss = 0.0;
    s.flows.push_back(f);
  }
  {
    FlowSpec f = flow(2, "post-failover", 10, 12, TrafficClass::Guaranteed, 5'000, 250, 1'000,
                      700'000, 990'000, 1);
    f.check_latency_us = 5'000;
    f.check_max_loss = 0.01;
    s.flows.push_back(f);
  }
  s.events.push_back(auth_event(1'500, 1, "port:2:2"));
  {
    EventSpec ev;
    ev.at = 600'000;
    ev.kind = EventSpec::Kind::KillController;
    ev.controller = 2;
    s.events.push_back(ev);
  }
  s.checks.dr7_availability = 0.99;
  return s;
}

Scenario tamper_integrity_scenario() {
  Scenario s;
  s.name = "tamper-integrity";
  s.seed = 21;
  s.duration_us = 1'000'000;
  s.nodes = {
      sw(1, {1, 2, 3}, "sw1"), sw(2, {1, 2}, "sw2"), nfv_host(3, "nfv1", 2, 2),
      host(10, "h1"),          host(11, "h2"),
  };
  s.links = {
      mklink(1, {1, 1}, {2, 1}, 10, 100'000), mklink(2, {1, 3}, {3, 1}, 5, 1'000'000),
      mklink(3, {1, 2}, {10, 1}, 5, 100'000), mklink(4, {2, 2}, {11, 1}, 5, 100'000),
  };
  s.segments = {seg(10, "prod", 2, {{1, 2}, {2, 2}})};
  s.controllers = {controller(1, ctrl::CtrlLevel::Facility, "cf", {1, 2})};
  s.descriptors["auth"] = descriptor("auth", nfv::VnfKind::Authenticator, 50);
  s.instances = {{"auth1", "auth", 3, {}, {}, false}};
  s.roles["prod"] = {{10}, {}};
  s.principals = {principal(1, "svc1", policy::PrincipalKind::Service, {"prod"}, "tok-1")};
  {
    FlowSpec f =
        flow(1, "stream", 10, 11, TrafficClass::Guaranteed, 5'000, 250, 800, 5'000, 905'000, 1);
    f.proactive = true;
    f.request_at_us = 2'500;
    f.check_max_loss = 0.01;
    s.flows.push_back(f);
  }
  s.events.push_back(auth_event(1'500, 1, "port:1:2"));
  s.tamper_rates.push_back({1, 0.1});
  return s;
}

Scenario plug_and_produce_scenario() {
  Scenario s;
  s.name = "plug-and-produce";
  s.seed = 17;
  s.duration_us = 1'000'000;
  s.nodes = {
      sw(1, {1, 2, 3}, "sw1"), sw(2, {1, 2}, "sw2"), nfv_host(3, "nfv1", 2, 2),
      host(10, "dev"),         host(11, "machine"),
  };
  s.links = {
      mklink(1, {1, 1}, {2, 1}, 10, 100'000),
      mklink(2, {1, 3}, {3, 1}, 5, 1'000'000),
      mklink(3, {2, 2}, {10, 1}, 5, 100'000, 0, false),
      mklink(4, {1, 2}, {11, 1}, 5, 100'000),
  };
  s.segments = {
      seg(10, "machine", 2, {{1, 2}}),
      seg(15, "transport", 2, {}),
  };
  s.controllers = {controller(1, ctrl::CtrlLevel::Facility, "cf", {1, 2})};
  s.descriptors["fw"] = descriptor("fw", nfv::VnfKind::Firewall, 10);
  s.descriptors["auth"] = descriptor("auth", nfv::VnfKind::Authenticator, 50);
  s.instances = {
      {"auth1", "auth", 3, {}, {}, false},
      {"fw1", "fw", 3, {{15, 10}}, {}, false},
  };
  s.roles["transport"] = {{10}, {}};
  s.principals = {principal(1, "dev", policy::PrincipalKind::Device, {"transport"}, "tok-dev",
                            policy::DeviceProfile{15, TrafficClass::Guaranteed})};
  {
    FlowSpec f = flow(1, "dev-flow", 10, 11, TrafficClass::Guaranteed, 5'000, 250, 1'000,
                      102'000, 900'000, 1);
    f.check_latency_us = 5'000;
    f.check_max_loss = 0.01;
    s.flows.push_back(f);
  }
  {
    EventSpec ev;
    ev.at = 100'000;
    ev.kind = EventSpec::Kind::PlugIn;
    ev.host = 10;
    ev.switch_id = 2;
    ev.port = 2;
    ev.principal = 1;
    s.events.push_back(ev);
  }
  s.checks.dr9_onboarding_bound_us = 5'000;
  return s;
}

Scenario random_isolation_scenario(std::uint64_t index) {
  sim::Rng rng(0xA5C30000ull + index);
  Scenario s;
  s.name = "isolation-" + std::to_string(index);
  s.seed = index * 7 + 1;
  s.duration_us = 100'000;

  const int n_sw = static_cast<int>(2 + rng.uniform(0, 2)); // 2..4
  for (int i = 1; i <= n_sw; ++i) s.nodes.push_back(sw(i, {1, 2, 3, 4, 5, 6, 7, 8}, "sw" + std::to_string(i)));
  s.nodes.push_back(nfv_host(9, "nfv1", 4, 4));

  int next_link = 1;
  for (int i = 1; i < n_sw; ++i)
    s.links.push_back(mklink(next_link++, {i, 2}, {i + 1, 1}, 10, 100'000));
  if (n_sw >= 3 && rng.uniform(0, 1) == 1)
    s.links.push_back(mklink(next_link++, {1, 3}, {n_sw, 3}, 15, 100'000));
  s.links.push_back(mklink(next_link++, {1, 4}, {9, 1}, 5, 1'000'000));

  const int n_seg = static_cast<int>(2 + rng.uniform(0, 1)); // 2..3
  std::vector<int> vlans = {10, 20, 30};
  vlans.resize(static_cast<std::size_t>(n_seg));

  const int n_hosts = static_cast<int>(3 + rng.uniform(0, 3)); // 3..6
  std::map<int, std::set<PortRef>> seg_members;
  std::vector<int> host_segment(static_cast<std::size_t>(n_hosts));
  for (int h = 0; h < n_hosts; ++h) {
    int host_id = 10 + h;
    int at_sw = 1 + h % n_sw;
    int at_port = 5 + h / n_sw; // ports 5..8 reserved for hosts
    s.nodes.push_back(host(host_id, "h" + std::to_string(host_id)));
    s.links.push_back(mklink(next_link++, {at_sw, at_port}, {host_id, 1}, 5, 100'000));
    int vlan = vlans[static_cast<std::size_t>(h % n_seg)];
    host_segment[static_cast<std::size_t>(h)] = vlan;
    seg_members[vlan].insert({at_sw, at_port});
  }
  for (int vlan : vlans)
    s.segments.push_back(seg(vlan, "s" + std::to_string(vlan), 1, seg_members[vlan]));

  std::set<int> all_sw;
  for (int i = 1; i <= n_sw; ++i) all_sw.insert(i);
  s.controllers = {controller(1, ctrl::CtrlLevel::Facility, "cf", all_sw)};

  s.descriptors["auth"] = descriptor("auth", nfv::VnfKind::Authenticator, 50);
  s.descriptors["fw"] = descriptor("fw", nfv::VnfKind::Firewall, 10);
  VnfInstanceSpec fw{"fw1", "fw", 9, {}, {}, false};
  for (int a : vlans)
    for (int b : vlans) {
      if (a == b) continue;
      if (rng.uniform(0, 9) < 7) fw.transitions.push_back({a, b});
    }
  s.instances = {{"auth1", "auth", 9, {}, {}, false}, fw};

  for (int a : vlans)
    for (int b : vlans) {
      if (a == b) continue;
      if (rng.uniform(0, 9) < 6) s.segment_rules.push_back(allow_fw(a, b));
    }

  for (int h = 0; h < n_hosts; ++h) {
    int pid = 100 + h;
    std::string role = "r" + std::to_string(h);
    std::int64_t dice = rng.uniform(0, 9);
    std::set<std::string> roles;
    if (dice < 5) {
      // May reach a random segment.
      int target = vlans[static_cast<std::size_t>(rng.uniform(0, n_seg - 1))];
      s.roles[role] = {{target}, {}};
      roles = {role};
    } else if (dice < 8) {
      s.roles[role] = {{host_segment[static_cast<std::size_t>(h)]}, {}};
      roles = {role};
    } // else: no roles at all
    s.principals.push_back(principal(pid, "p" + std::to_string(pid),
                                     policy::PrincipalKind::Service, roles,
                                     "tok-" + std::to_string(pid)));
    if (rng.uniform(0, 9) < 8) {
      // Authenticated; the rest stay sessionless.
      auto access = s.links.end();
      for (auto it = s.links.begin(); it != s.links.end(); ++it)
        if (it->b.node == 10 + h || it->a.node == 10 + h) access = it;
      PortRef entry = access->a.node == 10 + h ? access->b : access->a;
      s.events.push_back(auth_event(1'500 + 100 * h, pid,
                                    "port:" + std::to_string(entry.node) + ":" +
                                        std::to_string(entry.port)));
    }
  }

  const int n_flows = static_cast<int>(4 + rng.uniform(0, 4)); // 4..8
  for (int fi = 0; fi < n_flows; ++fi) {
    int src = static_cast<int>(rng.uniform(0, n_hosts - 1));
    int dst = static_cast<int>(rng.uniform(0, n_hosts - 1));
    if (src == dst) dst = (dst + 1) % n_hosts;
    bool guaranteed = rng.uniform(0, 1) == 1;
    FlowSpec f = flow(fi + 1, "f" + std::to_string(fi + 1), 10 + src, 10 + dst,
                      guaranteed ? TrafficClass::Guaranteed : TrafficClass::BestEffort,
                      guaranteed ? 1'000 : 0, 250, 2'000, 5'000 + 500 * fi, 95'000,
                      100 + src);
    s.flows.push_back(f);
  }
  return s;
}

} // namespace iiotsim::harness
