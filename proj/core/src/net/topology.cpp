#include "iiotsim/net/topology.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <sstream>

namespace iiotsim::net {

using iiotsim::Errc;
using iiotsim::Error;

const char* node_kind_name(NodeKind k) {
  switch (k) {
    case NodeKind::SdnSwitch: return "sdn-switch";
    case NodeKind::LegacySwitch: return "legacy-switch";
    case NodeKind::Host: return "host";
    case NodeKind::NfvHost: return "nfv-host";
  }
  return "?";
}

bool Node::has_port(int p) const {
  return std::find(ports.begin(), ports.end(), p) != ports.end();
}

bool Path::uses_link(int link_id) const {
  for (const auto& h : hops)
    if (h.link == link_id) return true;
  return false;
}

std::string Path::format() const {
  std::ostringstream out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) out << '-';
    out << nodes[i];
  }
  return out.str();
}

int Topology::add_node(Node node) {
  if (nodes_.count(node.id)) throw Error(Errc::DuplicateId, "node " + std::to_string(node.id));
  if (node.kind == NodeKind::SdnSwitch && node.region != Region::Sdn)
    throw Error(Errc::ValidationError, "SdnSwitch outside SdnRegion: " + std::to_string(node.id));
  if (node.kind == NodeKind::LegacySwitch && node.region != Region::Legacy)
    throw Error(Errc::ValidationError,
                "LegacySwitch outside LegacyRegion: " + std::to_string(node.id));
  std::set<int> seen(node.ports.begin(), node.ports.end());
  if (seen.size() != node.ports.size())
    throw Error(Errc::ValidationError, "duplicate port on node " + std::to_string(node.id));
  if (node.name.empty()) node.name = "n" + std::to_string(node.id);
  int id = node.id;
  nodes_.emplace(id, std::move(node));
  ++revision_;
  return id;
}

int Topology::add_link(Link link) {
  if (links_.count(link.id)) throw Error(Errc::DuplicateId, "link " + std::to_string(link.id));
  for (PortRef p : {link.a, link.b}) {
    auto it = nodes_.find(p.node);
    if (it == nodes_.end() || !it->second.has_port(p.port))
      throw Error(Errc::UnknownEndpoint, "no port " + std::to_string(p.node) + ":" +
                                             std::to_string(p.port));
    if (port_link_.count(p))
      throw Error(Errc::PortOccupied,
                  std::to_string(p.node) + ":" + std::to_string(p.port) + " already linked");
  }
  if (link.a == link.b) throw Error(Errc::ValidationError, "self-link");
  if (link.latency_us <= 0 || link.bandwidth_kbps <= 0 || link.jitter_bound_us < 0)
    throw Error(Errc::ValidationError, "bad link attributes on link " + std::to_string(link.id));
  port_link_[link.a] = link.id;
  port_link_[link.b] = link.id;
  int id = link.id;
  links_.emplace(id, std::move(link));
  ++revision_;
  return id;
}

void Topology::add_segment(Segment seg) {
  if (segments_.count(seg.vlan))
    throw Error(Errc::DuplicateId, "segment vlan " + std::to_string(seg.vlan));
  if (seg.vlan < 1 || seg.vlan > 4094)
    throw Error(Errc::ValidationError, "vlan out of range: " + std::to_string(seg.vlan));
  for (const PortRef& p : seg.members) {
    auto it = nodes_.find(p.node);
    if (it == nodes_.end() || !it->second.has_port(p.port))
      throw Error(Errc::UnknownEndpoint, "segment member " + std::to_string(p.node) + ":" +
                                             std::to_string(p.port));
    for (const auto& [vlan, other] : segments_) {
      if (other.members.count(p))
        throw Error(Errc::ValidationError, "port " + std::to_string(p.node) + ":" +
                                               std::to_string(p.port) +
                                               " already in segment " + std::to_string(vlan));
    }
  }
  segments_.emplace(seg.vlan, std::move(seg));
  ++revision_;
}

LinkState Topology::set_link_state(int link_id, LinkState state) {
  auto it = links_.find(link_id);
  if (it == links_.end()) throw Error(Errc::UnknownLink, std::to_string(link_id));
  LinkState prev = it->second.state;
  it->second.state = state;
  if (prev != state) ++revision_;
  return prev;
}

const Node& Topology::node(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::UnknownNode, std::to_string(id));
  return it->second;
}

const Link& Topology::link(int id) const {
  auto it = links_.find(id);
  if (it == links_.end()) throw Error(Errc::UnknownLink, std::to_string(id));
  return it->second;
}

const Segment& Topology::segment(int vlan) const {
  auto it = segments_.find(vlan);
  if (it == segments_.end()) throw Error(Errc::UnknownSegment, std::to_string(vlan));
  return it->second;
}

std::optional<int> Topology::link_at(PortRef p) const {
  auto it = port_link_.find(p);
  if (it == port_link_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Topology::segment_of(PortRef p) const {
  for (const auto& [vlan, seg] : segments_) {
    if (seg.members.count(p)) return vlan;
  }
  return std::nullopt;
}

void Topology::assign_port_segment(PortRef p, int vlan) {
  if (vlan != 0 && !segments_.count(vlan))
    throw Error(Errc::UnknownSegment, std::to_string(vlan));
  for (auto& [v, seg] : segments_) seg.members.erase(p);
  if (vlan != 0) segments_.at(vlan).members.insert(p);
  ++revision_;
}

void Topology::assign_controller(int node_id, int controller_id) {
  if (!nodes_.count(node_id)) throw Error(Errc::UnknownNode, std::to_string(node_id));
  controller_assignment_[node_id] = controller_id;
  ++revision_;
}

std::optional<int> Topology::controller_of(int node_id) const {
  auto it = controller_assignment_.find(node_id);
  if (it == controller_assignment_.end()) return std::nullopt;
  return it->second;
}

namespace {

// Lexicographic comparison of node-id sequences.
bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace

std::optional<Path> Topology::path_from_nodes(const std::vector<int>& seq,
                                              std::int64_t demand_kbps,
                                              const ResidualFn& residual) const {
  if (seq.size() < 2) return std::nullopt;
  Path p;
  p.nodes = seq;
  for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
    const Link* best = nullptr;
    for (const auto& [lid, l] : links_) {
      if (l.state != LinkState::Up) continue;
      if (!(l.a.node == seq[i] && l.b.node == seq[i + 1]) &&
          !(l.b.node == seq[i] && l.a.node == seq[i + 1]))
        continue;
      if (residual_or_cap(residual, l, seq[i]) < demand_kbps) continue;
      if (!best || l.latency_us < best->latency_us ||
          (l.latency_us == best->latency_us && l.id < best->id))
        best = &l;
    }
    if (!best) return std::nullopt;
    PortRef from = best->near(seq[i]);
    PortRef to = best->far(seq[i]);
    p.hops.push_back({best->id, from.node, from.port, to.node, to.port});
    p.total_latency_us += best->latency_us;
  }
  return p;
}

bool Topology::path_valid(const Path& p, std::int64_t demand_kbps,
                          const ResidualFn& residual) const {
  if (p.nodes.size() < 2 || p.hops.size() + 1 != p.nodes.size()) return false;
  for (std::size_t i = 0; i < p.hops.size(); ++i) {
    auto it = links_.find(p.hops[i].link);
    if (it == links_.end()) return false;
    const Link& l = it->second;
    if (l.state != LinkState::Up) return false;
    if (!(l.touches(p.nodes[i]) && l.touches(p.nodes[i + 1]))) return false;
    if (residual_or_cap(residual, l, p.nodes[i]) < demand_kbps) return false;
  }
  return true;
}

std::optional<Path> Topology::shortest_feasible_path(int src, int dst,
                                                     std::int64_t demand_kbps,
                                                     const ResidualFn& residual,
                                                     PathMetric) const {
  if (src == dst) throw Error(Errc::ValidationError, "src == dst");
  node(src);
  node(dst);

  // Dijkstra over node-id space with full-path tie-break: on equal distance
  // the lexicographically smaller node sequence wins. Desk-scale topologies,
  // so carrying the path in each label is fine.
  struct Label {
    std::int64_t dist;
    std::vector<int> nodes;
  };
  auto better = [](const Label& a, const Label& b) {
    if (a.dist != b.dist) return a.dist < b.dist;
    return lex_less(a.nodes, b.nodes);
  };

  std::map<int, Label> best;
  auto cmp = [&](const Label& a, const Label& b) { return better(b, a); }; // min-heap
  std::priority_queue<Label, std::vector<Label>, decltype(cmp)> heap(cmp);
  heap.push({0, {src}});
  best[src] = {0, {src}};

  while (!heap.empty()) {
    Label cur = heap.top();
    heap.pop();
    int u = cur.nodes.back();
    auto bi = best.find(u);
    if (bi != best.end() && better(bi->second, cur)) continue;

    for (const auto& [lid, l] : links_) {
      if (l.state != LinkState::Up || !l.touches(u)) continue;
      int v = l.far(u).node;
      if (residual_or_cap(residual, l, u) < demand_kbps) continue;
      if (std::find(cur.nodes.begin(), cur.nodes.end(), v) != cur.nodes.end()) continue;
      Label cand{cur.dist + l.latency_us, cur.nodes};
      cand.nodes.push_back(v);
      auto it = best.find(v);
      if (it == best.end() || better(cand, it->second)) {
        best[v] = cand;
        heap.push(std::move(cand));
      }
    }
  }

  auto it = best.find(dst);
  if (it == best.end()) return std::nullopt;
  return path_from_nodes(it->second.nodes, demand_kbps, residual);
}

std::vector<ConstrainedPath> Topology::pareto_paths(int src, int dst, std::int64_t demand_kbps,
                                                    const ResidualFn& residual,
                                                    const LinkWeightFn& extra_weight) const {
  if (src == dst) throw Error(Errc::ValidationError, "src == dst");
  node(src);
  node(dst);

  struct Label {
    std::int64_t lat;
    std::int64_t worst;
    std::vector<int> nodes;
  };

  // Label-correcting search keeping per-node Pareto sets over (lat, worst);
  // among labels equal on both coordinates only the lexicographically
  // smallest path survives.
  std::map<int, std::vector<Label>> frontier;
  std::deque<Label> open;
  open.push_back({0, 0, {src}});
  frontier[src].push_back(open.back());

  auto try_keep = [&](int v, const Label& cand) -> bool {
    auto& set = frontier[v];
    for (const auto& l : set) {
      if (l.lat <= cand.lat && l.worst <= cand.worst &&
          (l.lat < cand.lat || l.worst < cand.worst))
        return false;
      if (l.lat == cand.lat && l.worst == cand.worst && !lex_less(cand.nodes, l.nodes))
        return false;
    }
    std::erase_if(set, [&](const Label& l) {
      if (cand.lat <= l.lat && cand.worst <= l.worst && (cand.lat < l.lat || cand.worst < l.worst))
        return true;
      return l.lat == cand.lat && l.worst == cand.worst && lex_less(cand.nodes, l.nodes);
    });
    set.push_back(cand);
    return true;
  };

  while (!open.empty()) {
    Label cur = open.front();
    open.pop_front();
    int u = cur.nodes.back();
    if (u == dst) continue;
    for (const auto& [lid, l] : links_) {
      if (l.state != LinkState::Up || !l.touches(u)) continue;
      int v = l.far(u).node;
      if (residual_or_cap(residual, l, u) < demand_kbps) continue;
      if (std::find(cur.nodes.begin(), cur.nodes.end(), v) != cur.nodes.end()) continue;
      Label cand{cur.lat + l.latency_us, cur.worst + l.latency_us + extra_weight(l), cur.nodes};
      cand.nodes.push_back(v);
      if (try_keep(v, cand)) open.push_back(std::move(cand));
    }
  }

  std::vector<ConstrainedPath> out;
  for (const auto& lbl : frontier[dst]) {
    auto p = path_from_nodes(lbl.nodes, demand_kbps, residual);
    if (p) out.push_back({*p, lbl.worst});
  }
  std::sort(out.begin(), out.end(), [](const ConstrainedPath& a, const ConstrainedPath& b) {
    if (a.path.total_latency_us != b.path.total_latency_us)
      return a.path.total_latency_us < b.path.total_latency_us;
    if (a.worst_case_us != b.worst_case_us) return a.worst_case_us < b.worst_case_us;
    return lex_less(a.path.nodes, b.path.nodes);
  });
  return out;
}

int Topology::disjoint_path_count(int a, int b) const {
  if (a == b) throw Error(Errc::ValidationError, "a == b");
  if (!nodes_.count(a) || !nodes_.count(b)) return 0;

  // Edmonds-Karp with unit capacity per link direction; an undirected link
  // becomes two antiparallel unit arcs, which yields the undirected
  // edge-disjoint path count.
  std::map<std::pair<int, int>, int> cap; // (link, dir 0=a->b,1=b->a) -> residual
  for (const auto& [lid, l] : links_) {
    if (l.state != LinkState::Up) continue;
    cap[{lid, 0}] = 1;
    cap[{lid, 1}] = 1;
  }

  int flow = 0;
  while (true) {
    std::map<int, std::pair<int, int>> via; // node -> (link, dir) used to reach it
    std::deque<int> q{a};
    std::set<int> seen{a};
    while (!q.empty() && !seen.count(b)) {
      int u = q.front();
      q.pop_front();
      for (const auto& [lid, l] : links_) {
        if (l.state != LinkState::Up || !l.touches(u)) continue;
        int dir = (l.a.node == u) ? 0 : 1;
        if (cap[{lid, dir}] <= 0) continue;
        int v = l.far(u).node;
        if (seen.count(v)) continue;
        seen.insert(v);
        via[v] = {lid, dir};
        q.push_back(v);
      }
    }
    if (!seen.count(b)) break;
    ++flow;
    int v = b;
    while (v != a) {
      auto [lid, dir] = via[v];
      cap[{lid, dir}] -= 1;
      cap[{lid, 1 - dir}] += 1;
      const Link& l = link(lid);
      v = (dir == 0) ? l.a.node : l.b.node;
    }
  }
  return flow;
}

bool Topology::connected(int a, int b) const {
  if (a == b) return true;
  std::deque<int> q{a};
  std::set<int> seen{a};
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (const auto& [lid, l] : links_) {
      if (l.state != LinkState::Up || !l.touches(u)) continue;
      int v = l.far(u).node;
      if (seen.insert(v).second) {
        if (v == b) return true;
        q.push_back(v);
      }
    }
  }
  return false;
}

} // namespace iiotsim::net
