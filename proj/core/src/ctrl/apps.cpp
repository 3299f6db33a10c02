#include "iiotsim/ctrl/apps.hpp"

#include <algorithm>

namespace iiotsim::ctrl {

namespace {

struct Candidate {
  std::vector<int> nodes;
  std::int64_t max_util_ppm = 0; // most-utilized hop, parts per million
  std::int64_t latency_us = 0;
};

void enumerate(const NetworkView& view, int at, int dst, std::int64_t demand,
               std::vector<int>& stack, std::int64_t util_ppm, std::int64_t latency,
               std::vector<Candidate>& out) {
  if (out.size() >= 256) return; // desk-scale guard
  if (at == dst) {
    out.push_back({stack, util_ppm, latency});
    return;
  }
  for (const LinkView& l : view.links) {
    if (l.state != net::LinkState::Up) continue;
    int next = -1;
    std::int64_t residual = 0;
    if (l.a_node == at) {
      next = l.b_node;
      residual = l.residual_ab_kbps;
    } else if (l.b_node == at) {
      next = l.a_node;
      residual = l.residual_ba_kbps;
    } else {
      continue;
    }
    if (residual < demand) continue;
    if (std::find(stack.begin(), stack.end(), next) != stack.end()) continue;
    std::int64_t hop_util =
        (l.bandwidth_kbps - residual) * 1'000'000 / l.bandwidth_kbps;
    stack.push_back(next);
    enumerate(view, next, dst, demand, stack, std::max(util_ppm, hop_util),
              latency + l.latency_us, out);
    stack.pop_back();
  }
}

} // namespace

const std::string& AltPathBalancer::name() const {
  static const std::string n = "alt-path-balancer";
  return n;
}

std::optional<std::vector<int>> AltPathBalancer::propose_path(const NetworkView& view,
                                                              const FlowIntent& intent) {
  std::int64_t demand = intent.tclass == TrafficClass::BestEffort ? 0 : intent.demand_kbps;
  std::vector<Candidate> cands;
  std::vector<int> stack{intent.src};
  enumerate(view, intent.src, intent.dst, demand, stack, 0, 0, cands);
  if (cands.empty()) return std::nullopt;
  auto best = std::min_element(cands.begin(), cands.end(), [](const Candidate& a,
                                                              const Candidate& b) {
    if (a.max_util_ppm != b.max_util_ppm) return a.max_util_ppm < b.max_util_ppm;
    if (a.latency_us != b.latency_us) return a.latency_us < b.latency_us;
    return std::lexicographical_compare(a.nodes.begin(), a.nodes.end(), b.nodes.begin(),
                                        b.nodes.end());
  });
  return best->nodes;
}

std::unique_ptr<NorthboundApp> make_builtin_app(const std::string& name) {
  if (name == "alt-path-balancer") return std::make_unique<AltPathBalancer>();
  return nullptr;
}

} // namespace iiotsim::ctrl
