#include <gtest/gtest.h>

#include "iiotsim/net/packet.hpp"
#include "iiotsim/nfv/nfv.hpp"

namespace iiotsim::nfv {
namespace {

using net::Node;
using net::NodeKind;
using net::Topology;

struct World {
  Config cfg;
  sim::Engine eng{1};
  Topology topo;
  World(int cap1 = 4, int cap2 = 2) {
    for (auto [id, cap] : {std::pair{1, cap1}, std::pair{2, cap2}}) {
      Node n;
      n.id = id;
      n.kind = NodeKind::NfvHost;
      n.ports = {1};
      n.cpu_capacity = cap;
      n.mem_capacity = cap;
      topo.add_node(n);
    }
  }
  NfvManager manager() {
    NfvManager m(eng, topo, cfg);
    m.register_host(1);
    m.register_host(2);
    return m;
  }
};

VnfDescriptor desc(const std::string& name, VnfKind kind, int demand,
                   std::int64_t delay = 0) {
  VnfDescriptor d;
  d.name = name;
  d.kind = kind;
  d.cpu_demand = demand;
  d.mem_demand = demand;
  d.processing_delay_us = delay;
  return d;
}

// Hosts H1(cap 4), H2(cap 2): demand 3 lands on H1 leaving 1; another 3 has
// no home; demand 2 fits H2.
TEST(Nfv, FirstFitArithmetic) {
  World w;
  NfvManager m = w.manager();
  int a = m.instantiate(desc("fw", VnfKind::Firewall, 3), std::nullopt, {}, {});
  EXPECT_EQ(m.instance(a).host, 1);
  EXPECT_EQ(m.hosts().at(1).cpu_used, 3);
  EXPECT_THROW(m.instantiate(desc("fw", VnfKind::Firewall, 3), std::nullopt, {}, {}), Error);
  int b = m.instantiate(desc("fw", VnfKind::Firewall, 2), std::nullopt, {}, {});
  EXPECT_EQ(m.instance(b).host, 2);
  EXPECT_TRUE(m.capacity_consistent());
}

TEST(Nfv, PlacementDeterminism) {
  World w1, w2;
  NfvManager m1 = w1.manager(), m2 = w2.manager();
  for (int i = 0; i < 3; ++i) {
    int a = m1.instantiate(desc("x", VnfKind::TrafficMonitor, 1), std::nullopt, {}, {});
    int b = m2.instantiate(desc("x", VnfKind::TrafficMonitor, 1), std::nullopt, {}, {});
    EXPECT_EQ(m1.instance(a).host, m2.instance(b).host);
  }
}

TEST(Nfv, RunningAfterBootDelay) {
  World w;
  NfvManager m = w.manager();
  int id = m.instantiate(desc("fw", VnfKind::Firewall, 1), std::nullopt, {}, {});
  EXPECT_FALSE(m.running(id));
  w.eng.run_until(w.cfg.vnf_boot_us);
  EXPECT_TRUE(m.running(id));
}

struct TraverseWorld : World {
  NfvManager m = manager();
  policy::CompiledPolicy compiled;
  int fw_id = 0;
  TraverseWorld() {
    policy::SegmentRule allow;
    allow.from = 10;
    allow.to = 20;
    allow.tclass = TrafficClass::TimeCritical;
    allow.allow = true;
    allow.require_firewall = true;
    compiled.transition_rules[{10, 20}] = {allow};
    compiled.ordered_rules = {allow};
    fw_id = m.instantiate(desc("fw", VnfKind::Firewall, 1, 10), std::nullopt,
                          {Transition{10, 20}}, {});
    w_run(1'000);
  }
  void w_run(sim::SimTime t) { eng.run_until(t); }
  net::Packet pkt(TrafficClass cls) {
    net::Packet p;
    p.flow = 1;
    p.seq = 1;
    p.vlan = 10;
    p.tclass = cls;
    p.size_bytes = 100;
    return p;
  }
};

// Firewall with allow(10->20, TimeCritical): TC forwards, BestEffort drops.
TEST(Nfv, FirewallVerdicts) {
  TraverseWorld w;
  TraverseContext ctx;
  ctx.compiled = &w.compiled;
  ctx.dst_segment = 20;
  auto fwd = w.m.traverse(w.fw_id, w.pkt(TrafficClass::TimeCritical), ctx);
  EXPECT_EQ(fwd.act, TraverseResult::Act::Forward);
  EXPECT_EQ(fwd.delay_us, 10);
  auto drop = w.m.traverse(w.fw_id, w.pkt(TrafficClass::BestEffort), ctx);
  EXPECT_EQ(drop.act, TraverseResult::Act::Drop);
  // Both traversals traced with their verdicts.
  int allows = 0, denies = 0;
  for (const auto& r : w.eng.trace().records()) {
    if (r.fact != "vnf-traversed") continue;
    if (r.get("verdict") == "allow") ++allows;
    if (r.get("verdict") == "deny") ++denies;
  }
  EXPECT_EQ(allows, 1);
  EXPECT_EQ(denies, 1);
}

TEST(Nfv, MonitorEmitsStatsAndForwards) {
  World w;
  NfvManager m = w.manager();
  int mon = m.instantiate(desc("mon", VnfKind::TrafficMonitor, 1, 5), std::nullopt, {}, {});
  w.eng.run_until(1'000);
  net::Packet p;
  p.flow = 3;
  p.seq = 9;
  p.size_bytes = 100;
  TraverseContext ctx;
  auto res = m.traverse(mon, p, ctx);
  EXPECT_EQ(res.act, TraverseResult::Act::Forward);
  bool stats = false;
  for (const auto& r : w.eng.trace().records())
    if (r.fact == "flow-stats" && r.get_i64("flow") == 3) stats = true;
  EXPECT_TRUE(stats);
}

TEST(Nfv, NotRunningInstanceDrops) {
  World w;
  NfvManager m = w.manager();
  int id = m.instantiate(desc("fw", VnfKind::Firewall, 1), std::nullopt, {}, {});
  net::Packet p;
  TraverseContext ctx;
  auto res = m.traverse(id, p, ctx); // still booting
  EXPECT_EQ(res.act, TraverseResult::Act::Drop);
  EXPECT_EQ(res.drop_reason, "instance-not-running");
}

// Failing H1 re-places its firewall on H2 after the migration delay; the
// re-attachment callback fires once Running.
TEST(Nfv, MigrationOnHostFailure) {
  World w;
  NfvManager m = w.manager();
  int id = m.instantiate(desc("fw", VnfKind::Firewall, 2), std::nullopt,
                         {Transition{10, 20}}, {});
  w.eng.run_until(1'000);
  ASSERT_EQ(m.instance(id).host, 1);

  std::vector<int> reattached;
  auto report = m.fail_host(1, [&](int inst) { reattached.push_back(inst); });
  ASSERT_EQ(report.migrated, std::vector<int>{id});
  EXPECT_EQ(m.instance(id).state, VnfState::Migrating);
  EXPECT_EQ(m.instance(id).host, 2);
  w.eng.run_until(1'000 + w.cfg.vnf_migration_us);
  EXPECT_TRUE(m.running(id));
  EXPECT_EQ(reattached, std::vector<int>{id});
  EXPECT_TRUE(m.capacity_consistent());
}

// No surviving capacity: the instance stays Failed and its transitions are
// traced closed.
TEST(Nfv, UnplaceableInstanceFailsSecure) {
  World w(4, 1); // H2 too small for demand 2
  NfvManager m = w.manager();
  int id = m.instantiate(desc("fw", VnfKind::Firewall, 2), std::nullopt,
                         {Transition{10, 20}}, {});
  w.eng.run_until(1'000);
  auto report = m.fail_host(1, {});
  ASSERT_EQ(report.unplaced, std::vector<int>{id});
  EXPECT_EQ(m.instance(id).state, VnfState::Failed);
  EXPECT_FALSE(m.instance_for_transition(Transition{10, 20}).has_value());
  bool closed = false;
  for (const auto& r : w.eng.trace().records())
    if (r.fact == "transition-closed") closed = true;
  EXPECT_TRUE(closed);
}

} // namespace
} // namespace iiotsim::nfv
