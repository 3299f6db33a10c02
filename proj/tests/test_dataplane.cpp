#include <gtest/gtest.h>

#include "iiotsim/net/dataplane.hpp"

namespace iiotsim::net {
namespace {

struct StubHooks : ControlHooks {
  std::vector<std::tuple<int, int, std::int64_t>> packet_ins; // switch, port, flow
  std::vector<int> auth_requests;
  void on_packet_in(int sw, int port, const Packet& pkt) override {
    packet_ins.emplace_back(sw, port, pkt.flow);
  }
  void on_auth_request(int, int, int, int principal, const std::string&) override {
    auth_requests.push_back(principal);
  }
  bool install_authorized(int, int controller_id) const override {
    return controller_id == 1; // controller 1 owns everything here
  }
};

struct World {
  Config cfg;
  sim::Engine eng{7};
  Topology topo;
  nfv::NfvManager nfv{eng, topo, cfg};
  SwitchFabric fabric{eng, topo, nfv, cfg};
  StubHooks hooks;

  World() { fabric.set_hooks(&hooks); }

  void add_switch(int id, int ports, NodeKind kind = NodeKind::SdnSwitch) {
    Node n;
    n.id = id;
    n.kind = kind;
    n.region = kind == NodeKind::LegacySwitch ? Region::Legacy : Region::Sdn;
    for (int p = 1; p <= ports; ++p) n.ports.push_back(p);
    n.name = (kind == NodeKind::LegacySwitch ? "lg" : "sw") + std::to_string(id);
    topo.add_node(n);
  }
  void add_host(int id, Region region = Region::Sdn) {
    Node n;
    n.id = id;
    n.kind = NodeKind::Host;
    n.region = region;
    n.ports = {1};
    n.name = "h" + std::to_string(id);
    topo.add_node(n);
  }
  void add_link(int id, PortRef a, PortRef b, std::int64_t lat = 10,
                std::int64_t bw = 100'000, std::int64_t jitter = 0) {
    Link l;
    l.id = id;
    l.a = a;
    l.b = b;
    l.latency_us = lat;
    l.bandwidth_kbps = bw;
    l.jitter_bound_us = jitter;
    topo.add_link(l);
  }
  int count(const std::string& fact, const std::string& key = "",
            const std::string& value = "") const {
    int n = 0;
    for (const auto& r : eng.trace().records())
      if (r.fact == fact && (key.empty() || r.get(key) == value)) ++n;
    return n;
  }
  Packet pkt(std::int64_t flow, int src, int dst, TrafficClass cls = TrafficClass::Guaranteed,
             std::int64_t size = 1'250) {
    Packet p;
    p.flow = flow;
    p.seq = ++seqs[flow];
    p.src = src;
    p.dst = dst;
    p.tclass = cls;
    p.size_bytes = size;
    return p;
  }
  std::map<std::int64_t, std::int64_t> seqs;
};

FlowRule fwd_rule(std::int64_t id, std::optional<int> vlan, int priority, int out_port,
                  std::optional<int> dst = std::nullopt) {
  FlowRule r;
  r.id = id;
  r.match.vlan = vlan;
  r.match.dst = dst;
  r.priority = priority;
  r.actions = {Action{Action::Kind::ForwardPort, out_port}};
  r.installed_by = 1;
  return r;
}

// h10 -- sw1 -- h11 with a wildcard forward rule: serialization 100us on the
// access link plus 10us propagation per hop gives 220us end to end.
struct LineWorld : World {
  LineWorld() {
    add_switch(1, 4);
    add_host(10);
    add_host(11);
    add_link(1, {1, 1}, {10, 1});
    add_link(2, {1, 2}, {11, 1});
    Segment s;
    s.vlan = 10;
    s.name = "prod";
    s.members = {{1, 1}, {1, 2}};
    topo.add_segment(s);
  }
};

TEST(Dataplane, TransmitArithmetic) {
  LineWorld w;
  w.fabric.install_rule(1, fwd_rule(1, std::nullopt, 0, 2));
  w.eng.schedule(0, sim::EventKind::FlowTimer,
                 [&] { w.fabric.inject(w.pkt(1, 10, 11)); });
  w.eng.run_until(10'000);
  ASSERT_EQ(w.count("packet-delivered"), 1);
  for (const auto& r : w.eng.trace().records())
    if (r.fact == "packet-delivered") EXPECT_EQ(r.get_i64("latency"), 220);
}

TEST(Dataplane, ZeroJitterIsReproducible) {
  auto run = [] {
    LineWorld w;
    w.fabric.install_rule(1, fwd_rule(1, std::nullopt, 0, 2));
    for (sim::SimTime t : {0, 500})
      w.eng.schedule(t, sim::EventKind::FlowTimer,
                     [&w] { w.fabric.inject(w.pkt(1, 10, 11)); });
    w.eng.run_until(10'000);
    return w.eng.trace().serialize();
  };
  EXPECT_EQ(run(), run());
}

TEST(Dataplane, PriorityThenSpecificityThenId) {
  LineWorld w;
  // prio 10 vlan=10 wins over wildcard ToController.
  w.fabric.install_rule(1, fwd_rule(1, 10, 10, 2));
  FlowRule to_ctrl;
  to_ctrl.id = 2;
  to_ctrl.priority = 0;
  to_ctrl.actions = {Action{Action::Kind::ToController, 0}};
  to_ctrl.installed_by = 1;
  w.fabric.install_rule(1, to_ctrl);

  w.eng.schedule(0, sim::EventKind::FlowTimer, [&] { w.fabric.inject(w.pkt(1, 10, 11)); });
  w.eng.run_until(5'000);
  EXPECT_EQ(w.count("packet-delivered"), 1);
  EXPECT_TRUE(w.hooks.packet_ins.empty());

  // Same priority: {vlan,dst} beats {vlan}.
  FlowRule broad = fwd_rule(3, 10, 20, 2);
  FlowRule narrow = fwd_rule(4, 10, 20, 1, 11);
  narrow.drop_reason = "";
  w.fabric.install_rule(1, broad);
  w.fabric.install_rule(1, narrow);
  w.eng.schedule(w.eng.now(), sim::EventKind::FlowTimer,
                 [&] { w.fabric.inject(w.pkt(2, 10, 11)); });
  w.eng.run_until(10'000);
  // narrow forwards to port 1 (back at the source host, which discards as
  // wrong-host? no: dst == 11, port 1 leads to h10) — use drop evidence:
  EXPECT_EQ(w.count("packet-dropped", "reason", "wrong-host"), 1);
}

TEST(Dataplane, MissBuffersAndNotifiesOnce) {
  LineWorld w;
  for (sim::SimTime t : {0, 20, 40})
    w.eng.schedule(t, sim::EventKind::FlowTimer, [&w] { w.fabric.inject(w.pkt(1, 10, 11)); });
  w.eng.run_until(5'000);
  // one packet-in despite three misses of the same flow
  EXPECT_EQ(w.count("packet-in"), 1);
  ASSERT_EQ(w.hooks.packet_ins.size(), 1u);

  // install resolves the buffered packets against the new table
  w.fabric.install_rule(1, fwd_rule(5, std::nullopt, 0, 2));
  w.eng.run_until(10'000);
  EXPECT_EQ(w.count("packet-delivered"), 3);
}

TEST(Dataplane, MissBufferOverflowDrops) {
  LineWorld w;
  w.eng.schedule(0, sim::EventKind::FlowTimer, [&w] {
    for (int i = 0; i < 70; ++i) {
      Packet p = w.pkt(1, 10, 11, TrafficClass::Guaranteed, 64);
      p.hops = 1; // pretend mid-path
      p.created_at = w.eng.now();
      w.fabric.send_from(10, 1, p);
    }
  });
  w.eng.run_until(100'000);
  EXPECT_EQ(w.count("packet-dropped", "reason", "miss-buffer-full"),
            70 - w.cfg.miss_buffer_packets);
}

TEST(Dataplane, UnauthorizedControllerRejected) {
  LineWorld w;
  FlowRule r = fwd_rule(1, std::nullopt, 0, 2);
  r.installed_by = 99;
  EXPECT_THROW(w.fabric.install_rule(1, r), Error);
}

TEST(Dataplane, HardTimeoutExpires) {
  LineWorld w;
  FlowRule r = fwd_rule(1, std::nullopt, 0, 2);
  r.hard_timeout = 1'000;
  w.fabric.install_rule(1, r);
  w.eng.run_until(500);
  EXPECT_EQ(w.fabric.rules_snapshot(1).size(), 1u);
  w.eng.run_until(2'000);
  EXPECT_TRUE(w.fabric.rules_snapshot(1).empty());
  EXPECT_EQ(w.count("rule-removed", "reason", "hard-timeout"), 1);
}

TEST(Dataplane, LinkDownDropsQueuedAndInFlight) {
  LineWorld w;
  w.fabric.install_rule(1, fwd_rule(1, std::nullopt, 0, 2));
  w.eng.schedule(0, sim::EventKind::FlowTimer, [&w] {
    for (int i = 0; i < 5; ++i) w.fabric.inject(w.pkt(1, 10, 11, TrafficClass::Guaranteed));
  });
  // Cut the egress link while frames are queued/in flight.
  w.eng.schedule(150, sim::EventKind::LinkFailure, [&w] {
    w.topo.set_link_state(2, LinkState::Down);
    w.fabric.on_link_state_changed(2);
  });
  w.eng.run_until(100'000);
  EXPECT_EQ(w.count("packet-delivered"), 0);
  EXPECT_GE(w.count("packet-dropped", "reason", "link-down"), 1);
  // conservation: everything injected was dropped somewhere
  EXPECT_EQ(w.count("packet-injected"),
            w.count("packet-dropped", "reason", "link-down") +
                w.count("packet-dropped", "reason", "queue-overflow") +
                w.count("packet-delivered"));
}

// Tampered frame: nack, one retransmission, clean accept; trace shows one
// nack and one retransmit.
struct TamperWorld : LineWorld {
  std::set<std::pair<std::int64_t, int>> plan; // (seq, attempt)
  TamperWorld() {
    fabric.set_tamper_decider([this](const Packet& p) {
      return plan.count({p.seq, p.attempt}) != 0;
    });
    fabric.install_rule(1, fwd_rule(1, std::nullopt, 0, 2));
  }
};

TEST(Dataplane, TamperDetectAndRecover) {
  TamperWorld w;
  w.plan = {{1, 1}};
  w.eng.schedule(0, sim::EventKind::FlowTimer, [&w] { w.fabric.inject(w.pkt(1, 10, 11)); });
  w.eng.run_until(50'000);
  EXPECT_EQ(w.count("integrity-nack"), 1);
  EXPECT_EQ(w.count("retransmit"), 1);
  EXPECT_EQ(w.count("packet-delivered"), 1);
  EXPECT_EQ(w.count("integrity-failure"), 0);
}

// Tamper on all four attempts: retransmissions exhaust after R=3 and the
// failure is reported.
TEST(Dataplane, RetransmitExhaustion) {
  TamperWorld w;
  w.plan = {{1, 1}, {1, 2}, {1, 3}, {1, 4}};
  w.eng.schedule(0, sim::EventKind::FlowTimer, [&w] { w.fabric.inject(w.pkt(1, 10, 11)); });
  w.eng.run_until(100'000);
  EXPECT_EQ(w.count("integrity-nack"), 4);
  EXPECT_EQ(w.count("retransmit"), 3); // R = 3
  EXPECT_EQ(w.count("packet-delivered"), 0);
  EXPECT_EQ(w.count("integrity-failure"), 1);
}

// Legacy switch: learning table, flood on miss, single FIFO (no class
// reordering).
struct LegacyWorld : World {
  LegacyWorld() {
    add_switch(1, 4, NodeKind::LegacySwitch);
    add_host(10, Region::Legacy);
    add_host(11, Region::Legacy);
    add_host(12, Region::Legacy);
    add_link(1, {1, 1}, {10, 1});
    add_link(2, {1, 2}, {11, 1});
    add_link(3, {1, 3}, {12, 1});
    Segment s;
    s.vlan = 10;
    s.name = "cell";
    s.members = {{1, 1}, {1, 2}, {1, 3}};
    topo.add_segment(s);
  }
};

TEST(Dataplane, LegacyFloodsThenLearns) {
  LegacyWorld w;
  w.eng.schedule(0, sim::EventKind::FlowTimer, [&w] { w.fabric.inject(w.pkt(1, 10, 11)); });
  w.eng.run_until(5'000);
  // First frame floods: delivered at 11, discarded at 12.
  EXPECT_EQ(w.count("packet-delivered"), 1);
  EXPECT_EQ(w.count("packet-dropped", "reason", "flood-discard"), 1);

  // Reply teaches the table; the next frame to 11 goes out one port only.
  w.eng.schedule(w.eng.now(), sim::EventKind::FlowTimer,
                 [&w] { w.fabric.inject(w.pkt(2, 11, 10)); });
  w.eng.run_until(10'000);
  w.eng.schedule(w.eng.now(), sim::EventKind::FlowTimer,
                 [&w] { w.fabric.inject(w.pkt(3, 10, 11)); });
  w.eng.run_until(20'000);
  EXPECT_EQ(w.count("packet-dropped", "reason", "flood-discard"), 1); // unchanged
  EXPECT_EQ(w.count("packet-delivered"), 3);
}

TEST(Dataplane, LegacyKeepsFifoAcrossClasses) {
  LegacyWorld w;
  std::vector<std::pair<std::int64_t, sim::SimTime>> deliveries;
  w.eng.schedule(0, sim::EventKind::FlowTimer, [&w] {
    // BestEffort then TimeCritical burst; a priority scheduler would reorder.
    w.fabric.inject(w.pkt(1, 10, 11, TrafficClass::BestEffort, 1'000));
    w.fabric.inject(w.pkt(2, 10, 11, TrafficClass::TimeCritical, 1'000));
  });
  w.eng.run_until(20'000);
  for (const auto& r : w.eng.trace().records())
    if (r.fact == "packet-delivered") deliveries.emplace_back(r.get_i64("flow"), r.at);
  ASSERT_EQ(deliveries.size(), 2u);
  EXPECT_EQ(deliveries[0].first, 1); // FIFO preserved, no prioritization
  EXPECT_EQ(deliveries[1].first, 2);
}

// Strict-priority bound: at a contended SDN egress a TimeCritical frame
// never waits behind queued lower-class frames, only the one in service.
TEST(Dataplane, StrictPriorityBlockingBound) {
  LineWorld w;
  w.fabric.install_rule(1, fwd_rule(1, std::nullopt, 0, 2));

  std::map<std::pair<std::int64_t, std::int64_t>, sim::SimTime> enqueued, started;
  std::vector<std::string> violations;
  w.fabric.set_queue_observer([&](const QueueEvent& ev) {
    if (ev.node != 1 || ev.port != 2) return;
    auto key = std::make_pair(ev.flow, ev.seq);
    if (ev.what == QueueEvent::What::Enqueue) enqueued[key] = ev.at;
    if (ev.what == QueueEvent::What::TxStart && ev.tclass == TrafficClass::TimeCritical) {
      // waits at most one max frame (in service) plus older TC service
      sim::SimTime wait = ev.at - enqueued[key];
      if (wait > 120) violations.push_back("tc frame waited " + std::to_string(wait));
    }
  });

  // Saturate with BestEffort, then inject TC frames mid-burst.
  for (int i = 0; i < 40; ++i)
    w.eng.schedule(i * 50, sim::EventKind::FlowTimer,
                   [&w] { w.fabric.inject(w.pkt(1, 10, 11, TrafficClass::BestEffort, 1'500)); });
  for (int i = 0; i < 5; ++i)
    w.eng.schedule(500 + i * 300, sim::EventKind::FlowTimer,
                   [&w] { w.fabric.inject(w.pkt(2, 10, 11, TrafficClass::TimeCritical, 125)); });
  w.eng.run_until(100'000);
  EXPECT_TRUE(violations.empty()) << violations.front();
}

} // namespace
} // namespace iiotsim::net
