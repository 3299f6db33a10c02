#include <gtest/gtest.h>

#include <algorithm>

#include "iiotsim/net/topology.hpp"
#include "iiotsim/sim/rng.hpp"

namespace iiotsim::net {
namespace {

Node mknode(int id, NodeKind kind = NodeKind::SdnSwitch, int ports = 8,
            Region region = Region::Sdn) {
  Node n;
  n.id = id;
  n.kind = kind;
  n.region = region;
  for (int p = 1; p <= ports; ++p) n.ports.push_back(p);
  return n;
}

Link mklink(int id, PortRef a, PortRef b, std::int64_t lat, std::int64_t bw = 100'000) {
  Link l;
  l.id = id;
  l.a = a;
  l.b = b;
  l.latency_us = lat;
  l.bandwidth_kbps = bw;
  return l;
}

// Independent path oracle: DFS over all simple paths, feasibility filter,
// min latency, lexicographically smallest node sequence on ties.
struct OraclePath {
  std::vector<int> nodes;
  std::int64_t latency = 0;
};

void oracle_dfs(const Topology& topo, int at, int dst, std::int64_t demand,
                std::vector<int>& stack, std::int64_t lat, std::vector<OraclePath>& out) {
  if (at == dst) {
    out.push_back({stack, lat});
    return;
  }
  for (const auto& [lid, l] : topo.links()) {
    if (l.state != LinkState::Up || !l.touches(at)) continue;
    if (l.bandwidth_kbps < demand) continue;
    int next = l.far(at).node;
    if (std::find(stack.begin(), stack.end(), next) != stack.end()) continue;
    stack.push_back(next);
    oracle_dfs(topo, next, dst, demand, stack, lat + l.latency_us, out);
    stack.pop_back();
  }
}

std::optional<OraclePath> oracle_shortest(const Topology& topo, int src, int dst,
                                          std::int64_t demand) {
  std::vector<OraclePath> all;
  std::vector<int> stack{src};
  oracle_dfs(topo, src, dst, demand, stack, 0, all);
  if (all.empty()) return std::nullopt;
  auto best = std::min_element(all.begin(), all.end(), [](const OraclePath& a,
                                                          const OraclePath& b) {
    if (a.latency != b.latency) return a.latency < b.latency;
    return std::lexicographical_compare(a.nodes.begin(), a.nodes.end(), b.nodes.begin(),
                                        b.nodes.end());
  });
  return *best;
}

TEST(Topology, AddLinkErrors) {
  Topology t;
  t.add_node(mknode(1));
  t.add_node(mknode(2));
  t.add_link(mklink(1, {1, 1}, {2, 1}, 10));
  EXPECT_THROW(t.add_link(mklink(1, {1, 2}, {2, 2}, 10)), Error);          // DuplicateId
  EXPECT_THROW(t.add_link(mklink(2, {1, 1}, {2, 2}, 10)), Error);          // PortOccupied
  EXPECT_THROW(t.add_link(mklink(3, {1, 9}, {2, 2}, 10)), Error);          // UnknownEndpoint
  try {
    t.add_link(mklink(4, {1, 2}, {2, 1}, 10));
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::PortOccupied);
  }
}

TEST(Topology, RevisionBumpsOnMutation) {
  Topology t;
  auto r0 = t.revision();
  t.add_node(mknode(1));
  EXPECT_GT(t.revision(), r0);
}

TEST(Topology, SetLinkStateReturnsPrevious) {
  Topology t;
  t.add_node(mknode(1));
  t.add_node(mknode(2));
  t.add_link(mklink(1, {1, 1}, {2, 1}, 10));
  EXPECT_EQ(t.set_link_state(1, LinkState::Down), LinkState::Up);
  EXPECT_EQ(t.set_link_state(1, LinkState::Down), LinkState::Down); // idempotent
  EXPECT_THROW(t.set_link_state(99, LinkState::Up), Error);
}

// Triangle A-B(10), B-C(10), A-C(30): A->C goes A,B,C at total 20.
TEST(Topology, TriangleShortestPath) {
  Topology t;
  for (int i = 1; i <= 3; ++i) t.add_node(mknode(i));
  t.add_link(mklink(1, {1, 1}, {2, 1}, 10));
  t.add_link(mklink(2, {2, 2}, {3, 1}, 10));
  t.add_link(mklink(3, {1, 2}, {3, 2}, 30));
  auto p = t.shortest_feasible_path(1, 3, 0);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->nodes, (std::vector<int>{1, 2, 3}));
  EXPECT_EQ(p->total_latency_us, 20);

  auto oracle = oracle_shortest(t, 1, 3, 0);
  ASSERT_TRUE(oracle);
  EXPECT_EQ(p->nodes, oracle->nodes);
}

// Same triangle, B-C lacks bandwidth for the demand: path falls back to A,C.
TEST(Topology, BandwidthFilterChangesPath) {
  Topology t;
  for (int i = 1; i <= 3; ++i) t.add_node(mknode(i));
  t.add_link(mklink(1, {1, 1}, {2, 1}, 10));
  t.add_link(mklink(2, {2, 2}, {3, 1}, 10, 5'000)); // thin
  t.add_link(mklink(3, {1, 2}, {3, 2}, 30));
  ResidualFn residual = [](const Link& l, int) { return l.bandwidth_kbps; };
  auto p = t.shortest_feasible_path(1, 3, 10'000, residual);
  ASSERT_TRUE(p);
  EXPECT_EQ(p->nodes, (std::vector<int>{1, 3}));
  EXPECT_EQ(p->total_latency_us, 30);
}

TEST(Topology, SrcEqualsDstIsACallerError) {
  Topology t;
  t.add_node(mknode(1));
  EXPECT_THROW(t.shortest_feasible_path(1, 1, 0), Error);
}

TEST(Topology, DownLinksAreInvisible) {
  Topology t;
  for (int i = 1; i <= 2; ++i) t.add_node(mknode(i));
  t.add_link(mklink(1, {1, 1}, {2, 1}, 10));
  t.set_link_state(1, LinkState::Down);
  EXPECT_FALSE(t.shortest_feasible_path(1, 2, 0));
  EXPECT_FALSE(t.connected(1, 2));
}

TEST(Topology, DisjointPathCounts) {
  // 4-cycle A-B-C-D-A: two disjoint paths between opposite corners.
  Topology ring;
  for (int i = 1; i <= 4; ++i) ring.add_node(mknode(i));
  ring.add_link(mklink(1, {1, 1}, {2, 1}, 10));
  ring.add_link(mklink(2, {2, 2}, {3, 1}, 10));
  ring.add_link(mklink(3, {3, 2}, {4, 1}, 10));
  ring.add_link(mklink(4, {4, 2}, {1, 2}, 10));
  EXPECT_EQ(ring.disjoint_path_count(1, 3), 2);

  Topology chain;
  for (int i = 1; i <= 3; ++i) chain.add_node(mknode(i));
  chain.add_link(mklink(1, {1, 1}, {2, 1}, 10));
  chain.add_link(mklink(2, {2, 2}, {3, 1}, 10));
  EXPECT_EQ(chain.disjoint_path_count(1, 3), 1);

  Topology split;
  split.add_node(mknode(1));
  split.add_node(mknode(2));
  EXPECT_EQ(split.disjoint_path_count(1, 2), 0);
}

// Random small topologies: the search agrees with exhaustive enumeration on
// path choice including the lexicographic tie-break, and returned paths are
// structurally valid.
TEST(Topology, OracleEquivalenceOnSmallGraphs) {
  sim::Rng rng(1234);
  for (int trial = 0; trial < 300; ++trial) {
    Topology t;
    int n = static_cast<int>(4 + rng.uniform(0, 3)); // 4..7 nodes
    for (int i = 1; i <= n; ++i) t.add_node(mknode(i, NodeKind::SdnSwitch, n + 2));
    int next_port = 1;
    int link_id = 1;
    std::map<int, int> port_used;
    auto next_free = [&](int node) { return ++port_used[node]; };
    (void)next_port;
    // spanning chain + random extra edges
    for (int i = 1; i < n; ++i)
      t.add_link(mklink(link_id++, {i, next_free(i)}, {i + 1, next_free(i + 1)},
                        (rng.uniform(1, 5)) * 10));
    for (int extra = 0; extra < n; ++extra) {
      int a = static_cast<int>(rng.uniform(1, n));
      int b = static_cast<int>(rng.uniform(1, n));
      if (a == b) continue;
      if (port_used[a] >= n + 2 || port_used[b] >= n + 2) continue;
      t.add_link(mklink(link_id++, {a, next_free(a)}, {b, next_free(b)},
                        (rng.uniform(1, 5)) * 10));
    }
    int src = 1, dst = n;
    auto got = t.shortest_feasible_path(src, dst, 0);
    auto want = oracle_shortest(t, src, dst, 0);
    ASSERT_EQ(got.has_value(), want.has_value());
    if (got) {
      EXPECT_EQ(got->nodes, want->nodes) << "trial " << trial;
      EXPECT_EQ(got->total_latency_us, want->latency);
      EXPECT_TRUE(t.path_valid(*got, 0, {}));
      // no repeated nodes
      auto nodes = got->nodes;
      std::sort(nodes.begin(), nodes.end());
      EXPECT_EQ(std::adjacent_find(nodes.begin(), nodes.end()), nodes.end());
    }
  }
}

TEST(Topology, SegmentMachinery) {
  Topology t;
  t.add_node(mknode(1));
  Segment s;
  s.vlan = 10;
  s.name = "cell";
  s.members = {{1, 1}};
  t.add_segment(s);
  EXPECT_EQ(t.segment_of({1, 1}), 10);
  EXPECT_FALSE(t.segment_of({1, 2}));
  t.assign_port_segment({1, 1}, 0);
  EXPECT_FALSE(t.segment_of({1, 1}));
  t.assign_port_segment({1, 2}, 10);
  EXPECT_EQ(t.segment_of({1, 2}), 10);
  Segment dup;
  dup.vlan = 10;
  EXPECT_THROW(t.add_segment(dup), Error);
}

} // namespace
} // namespace iiotsim::net
