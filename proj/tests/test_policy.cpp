#include <gtest/gtest.h>

#include "iiotsim/policy/policy.hpp"

namespace iiotsim::policy {
namespace {

using net::Node;
using net::NodeKind;
using net::Segment;
using net::Topology;

// Two hosts on one switch, segments 10 and 20 on the switch ports.
struct SmallWorld {
  Topology topo;
  SmallWorld() {
    Node sw;
    sw.id = 1;
    sw.kind = NodeKind::SdnSwitch;
    sw.ports = {1, 2};
    topo.add_node(sw);
    for (int h : {10, 11}) {
      Node n;
      n.id = h;
      n.kind = NodeKind::Host;
      n.ports = {1};
      topo.add_node(n);
    }
    net::Link l1;
    l1.id = 1;
    l1.a = {1, 1};
    l1.b = {10, 1};
    l1.latency_us = 5;
    l1.bandwidth_kbps = 100'000;
    topo.add_link(l1);
    net::Link l2;
    l2.id = 2;
    l2.a = {1, 2};
    l2.b = {11, 1};
    l2.latency_us = 5;
    l2.bandwidth_kbps = 100'000;
    topo.add_link(l2);
    Segment s10;
    s10.vlan = 10;
    s10.name = "a";
    s10.members = {{1, 1}};
    topo.add_segment(s10);
    Segment s20;
    s20.vlan = 20;
    s20.name = "b";
    s20.members = {{1, 2}};
    topo.add_segment(s20);
  }
};

SegmentRule rule(int from, int to, std::optional<TrafficClass> cls, bool allow, bool fw) {
  SegmentRule r;
  r.from = from;
  r.to = to;
  r.tclass = cls;
  r.allow = allow;
  r.require_firewall = fw;
  return r;
}

TEST(Policy, CompileTranslatesDirectly) {
  SmallWorld w;
  PolicyEngine pe;
  SegmentPolicy sp;
  sp.rules = {rule(10, 20, TrafficClass::TimeCritical, true, true)};
  pe.set_segment_policy(sp);
  CompiledPolicy c = pe.compile(w.topo);

  EXPECT_TRUE(c.firewall_verdict(10, 20, TrafficClass::TimeCritical).allow);
  EXPECT_FALSE(c.firewall_verdict(10, 20, TrafficClass::BestEffort).allow);
  EXPECT_FALSE(c.predicate(10, 20, TrafficClass::BestEffort).allow);
  // Empty policy for the reverse transition: default deny.
  EXPECT_FALSE(c.predicate(20, 10, TrafficClass::TimeCritical).allow);
}

TEST(Policy, FirstMatchWins) {
  SmallWorld w;
  PolicyEngine pe;
  SegmentPolicy sp;
  sp.rules = {rule(10, 20, std::nullopt, false, false),
              rule(10, 20, TrafficClass::TimeCritical, true, true)};
  pe.set_segment_policy(sp);
  CompiledPolicy c = pe.compile(w.topo);
  // The blanket deny precedes the narrower allow.
  EXPECT_FALSE(c.predicate(10, 20, TrafficClass::TimeCritical).allow);
  EXPECT_FALSE(c.firewall_verdict(10, 20, TrafficClass::TimeCritical).allow);
}

TEST(Policy, CompileRejectsUnknownSegment) {
  SmallWorld w;
  PolicyEngine pe;
  SegmentPolicy sp;
  sp.rules = {rule(10, 99, std::nullopt, true, true)};
  pe.set_segment_policy(sp);
  EXPECT_THROW(pe.compile(w.topo), Error);
}

// Both compiled routes agree on every (from, to, class) triple.
TEST(Policy, CompileEnforceAgreement) {
  SmallWorld w;
  PolicyEngine pe;
  SegmentPolicy sp;
  sp.rules = {rule(10, 20, TrafficClass::TimeCritical, true, true),
              rule(10, 20, std::nullopt, false, false),
              rule(20, 10, TrafficClass::Guaranteed, true, true)};
  pe.set_segment_policy(sp);
  CompiledPolicy c = pe.compile(w.topo);
  for (int from : {10, 20})
    for (int to : {10, 20}) {
      if (from == to) continue;
      for (TrafficClass cls : {TrafficClass::TimeCritical, TrafficClass::Guaranteed,
                               TrafficClass::BestEffort}) {
        Verdict a = c.predicate(from, to, cls);
        Verdict b = c.firewall_verdict(from, to, cls);
        EXPECT_EQ(a.allow, b.allow);
        EXPECT_EQ(a.require_firewall, b.require_firewall);
      }
    }
}

struct AuthzWorld : SmallWorld {
  PolicyEngine pe;
  CompiledPolicy compiled;
  AuthzWorld() {
    Principal p;
    p.id = 1;
    p.kind = PrincipalKind::Service;
    p.roles = {"maintenance"};
    p.credential = "tok";
    pe.add_principal(p);
    pe.set_role_permission("maintenance", {{20}, {}});
    SegmentPolicy sp;
    sp.rules = {rule(10, 20, std::nullopt, true, true)};
    pe.set_segment_policy(sp);
    compiled = pe.compile(topo);
  }
  FlowIntent intent(int src, int dst, TrafficClass cls) {
    FlowIntent in;
    in.src = src;
    in.dst = dst;
    in.tclass = cls;
    in.demand_kbps = 1000;
    in.requester = 1;
    return in;
  }
};

TEST(Policy, AuthorizeRoleAndTransition) {
  AuthzWorld w;
  Session& s = w.pe.create_session(1, {}, 0);
  auto ok = w.pe.authorize_flow(s, w.intent(10, 11, TrafficClass::Guaranteed), w.topo,
                                w.compiled, 100);
  EXPECT_TRUE(ok.allowed);
  EXPECT_TRUE(ok.require_firewall); // 10 -> 20 crosses segments
}

TEST(Policy, AuthorizeDeniesMissingRole) {
  AuthzWorld w;
  Principal p;
  p.id = 2;
  p.kind = PrincipalKind::Service;
  p.credential = "tok2"; // no roles
  w.pe.add_principal(p);
  Session& s = w.pe.create_session(2, {}, 0);
  auto res = w.pe.authorize_flow(s, w.intent(10, 11, TrafficClass::Guaranteed), w.topo,
                                 w.compiled, 100);
  EXPECT_FALSE(res.allowed);
  EXPECT_EQ(res.reason, "role");
}

TEST(Policy, IntraSegmentNeedsNoFirewall) {
  AuthzWorld w;
  // Move host 11's access port into segment 10 so both endpoints share it.
  w.topo.assign_port_segment({1, 2}, 10);
  w.pe.set_role_permission("maintenance", {{10}, {}});
  Session& s = w.pe.create_session(1, {}, 0);
  auto res = w.pe.authorize_flow(s, w.intent(10, 11, TrafficClass::Guaranteed), w.topo,
                                 w.compiled, 100);
  EXPECT_TRUE(res.allowed);
  EXPECT_FALSE(res.require_firewall);
}

TEST(Policy, ExpiredSessionDenies) {
  AuthzWorld w;
  w.pe.set_session_ttl(1000);
  Session& s = w.pe.create_session(1, {}, 0);
  auto res = w.pe.authorize_flow(s, w.intent(10, 11, TrafficClass::Guaranteed), w.topo,
                                 w.compiled, 2000);
  EXPECT_FALSE(res.allowed);
  EXPECT_EQ(res.reason, "session-expired");
  EXPECT_EQ(w.pe.active_session_for(1, 2000), nullptr);
}

TEST(Policy, CredentialExactMatch) {
  AuthzWorld w;
  EXPECT_TRUE(w.pe.check_credential(1, "tok"));
  EXPECT_FALSE(w.pe.check_credential(1, "TOK"));
  EXPECT_THROW(w.pe.check_credential(99, "tok"), Error);
}

TEST(Policy, DeviceNeedsProfile) {
  PolicyEngine pe;
  Principal p;
  p.id = 5;
  p.kind = PrincipalKind::Device;
  p.credential = "tok";
  EXPECT_THROW(pe.add_principal(p), Error);
}

} // namespace
} // namespace iiotsim::policy
