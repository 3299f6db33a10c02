#include "iiotsim/qos/admission.hpp"

#include <algorithm>

#include "iiotsim/sim/error.hpp"

namespace iiotsim::qos {

using iiotsim::Errc;
using iiotsim::Error;
using net::Link;
using net::Path;

const char* reject_reason_name(RejectReason r) {
  switch (r) {
    case RejectReason::None: return "none";
    case RejectReason::NoPath: return "no-path";
    case RejectReason::NoBandwidth: return "no-bandwidth";
    case RejectReason::LatencyBound: return "latency-bound";
  }
  return "?";
}

std::int64_t AdmissionController::reserved_kbps(int link_id, bool a_to_b) const {
  auto it = reserved_.find({link_id, a_to_b});
  return it == reserved_.end() ? 0 : it->second;
}

std::int64_t AdmissionController::residual_kbps(const Link& l, int from_node) const {
  return l.bandwidth_kbps - reserved_kbps(l.id, l.a.node == from_node);
}

net::ResidualFn AdmissionController::residual_fn(std::optional<int> exclude) const {
  // Occurrence counts of the excluded reservation per directed link, so a
  // reroute search sees the bandwidth its own flow would free up.
  std::map<DirKey, std::int64_t> give_back;
  if (exclude) {
    const Reservation& r = reservation(*exclude);
    for (const auto& h : r.path.hops)
      give_back[{h.link, topo_.link(h.link).a.node == h.from_node}] += r.demand_kbps;
  }
  return [this, give_back](const Link& l, int from_node) {
    std::int64_t res = residual_kbps(l, from_node);
    auto it = give_back.find({l.id, l.a.node == from_node});
    if (it != give_back.end()) res += it->second;
    return res;
  };
}

std::int64_t AdmissionController::worst_case_us(const Path& p) const {
  std::int64_t total = 0;
  for (const auto& h : p.hops) {
    const Link& l = topo_.link(h.link);
    total += l.latency_us + max_frame_blocking_us(l) + l.jitter_bound_us;
  }
  return total;
}

namespace {

Path concat(const std::vector<Path>& legs) {
  Path out;
  for (const Path& leg : legs) {
    if (leg.nodes.empty()) continue;
    if (out.nodes.empty())
      out.nodes = leg.nodes;
    else
      out.nodes.insert(out.nodes.end(), leg.nodes.begin() + 1, leg.nodes.end());
    out.hops.insert(out.hops.end(), leg.hops.begin(), leg.hops.end());
    out.total_latency_us += leg.total_latency_us;
  }
  return out;
}

bool visits_in_order(const Path& p, const std::vector<int>& stops) {
  std::size_t i = 0;
  for (int n : p.nodes) {
    if (i < stops.size() && n == stops[i]) ++i;
  }
  return i == stops.size();
}

} // namespace

AdmitResult AdmissionController::plan(const FlowIntent& intent,
                                      const std::vector<int>& waypoints,
                                      std::optional<int> exclude,
                                      const std::optional<Path>& forced) const {
  AdmitResult out;
  const bool reserves = intent.tclass != TrafficClass::BestEffort;
  const std::int64_t demand = reserves ? intent.demand_kbps : 0;
  if (intent.tclass == TrafficClass::TimeCritical && !intent.latency_bound_us)
    throw Error(Errc::ValidationError, "TimeCritical intent without latency bound");

  net::ResidualFn residual = residual_fn(exclude);

  // Checks a concrete candidate against bandwidth (per directed-link
  // occurrence) and the TimeCritical latency bound.
  auto evaluate = [&](const Path& p) -> RejectReason {
    std::map<DirKey, std::int64_t> use;
    for (const auto& h : p.hops) {
      const Link& l = topo_.link(h.link);
      use[dir_key(l, h.from_node)] += demand;
    }
    for (const auto& [key, total] : use) {
      const Link& l = topo_.link(key.first);
      std::int64_t avail = residual(l, key.second ? l.a.node : l.b.node);
      if (avail < total) return RejectReason::NoBandwidth;
    }
    if (intent.tclass == TrafficClass::TimeCritical &&
        worst_case_us(p) > *intent.latency_bound_us)
      return RejectReason::LatencyBound;
    return RejectReason::None;
  };

  std::vector<int> stops;
  stops.push_back(intent.src);
  for (int w : waypoints)
    if (stops.back() != w) stops.push_back(w);
  if (stops.back() != intent.dst) stops.push_back(intent.dst);
  if (stops.size() < 2) throw Error(Errc::ValidationError, "flow src == dst");

  if (forced) {
    if (forced->nodes.front() == intent.src && forced->nodes.back() == intent.dst &&
        visits_in_order(*forced, stops) && topo_.path_valid(*forced, 0, residual) &&
        evaluate(*forced) == RejectReason::None) {
      out.accepted = true;
      out.path = *forced;
      out.worst_case_us = worst_case_us(*forced);
      return out;
    }
    out.reason = RejectReason::NoPath;
    return out;
  }

  if (intent.tclass == TrafficClass::TimeCritical) {
    // Compose per-leg Pareto frontiers; among combinations within the bound
    // pick minimum latency, then minimum worst case, then the
    // lexicographically smallest node sequence.
    auto blocking = [this](const Link& l) {
      return max_frame_blocking_us(l) + l.jitter_bound_us;
    };
    std::vector<std::vector<net::ConstrainedPath>> frontiers;
    for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
      auto f = topo_.pareto_paths(stops[i], stops[i + 1], demand, residual, blocking);
      if (f.empty()) {
        auto relaxed = topo_.shortest_feasible_path(stops[i], stops[i + 1], 0, residual);
        out.reason = relaxed ? RejectReason::NoBandwidth : RejectReason::NoPath;
        return out;
      }
      frontiers.push_back(std::move(f));
    }
    std::vector<std::vector<Path>> combos{{}};
    for (const auto& f : frontiers) {
      std::vector<std::vector<Path>> next;
      for (const auto& partial : combos)
        for (const auto& cp : f) {
          auto ext = partial;
          ext.push_back(cp.path);
          next.push_back(std::move(ext));
        }
      combos = std::move(next);
    }
    const Path* best = nullptr;
    Path best_path;
    bool any_bandwidth_ok = false;
    for (const auto& legs : combos) {
      Path cand = concat(legs);
      RejectReason r = evaluate(cand);
      if (r == RejectReason::NoBandwidth) continue;
      any_bandwidth_ok = true;
      if (r != RejectReason::None) continue;
      if (!best || cand.total_latency_us < best->total_latency_us ||
          (cand.total_latency_us == best->total_latency_us &&
           (worst_case_us(cand) < worst_case_us(*best) ||
            (worst_case_us(cand) == worst_case_us(*best) &&
             std::lexicographical_compare(cand.nodes.begin(), cand.nodes.end(),
                                          best->nodes.begin(), best->nodes.end()))))) {
        best_path = cand;
        best = &best_path;
      }
    }
    if (!best) {
      out.reason = any_bandwidth_ok ? RejectReason::LatencyBound : RejectReason::NoBandwidth;
      return out;
    }
    out.accepted = true;
    out.path = best_path;
    out.worst_case_us = worst_case_us(best_path);
    return out;
  }

  // Guaranteed / BestEffort: minimum-latency feasible legs.
  std::vector<Path> legs;
  for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
    auto leg = topo_.shortest_feasible_path(stops[i], stops[i + 1], demand, residual);
    if (!leg) {
      auto relaxed = topo_.shortest_feasible_path(stops[i], stops[i + 1], 0, residual);
      out.reason = relaxed ? RejectReason::NoBandwidth : RejectReason::NoPath;
      return out;
    }
    legs.push_back(std::move(*leg));
  }
  Path cand = concat(legs);
  RejectReason r = evaluate(cand);
  if (r != RejectReason::None) {
    out.reason = r;
    return out;
  }
  out.accepted = true;
  out.path = cand;
  out.worst_case_us = worst_case_us(cand);
  return out;
}

AdmitResult AdmissionController::admit(const FlowIntent& intent, std::int64_t flow,
                                       const std::vector<int>& waypoints,
                                       const std::optional<Path>& forced) {
  AdmitResult r = plan(intent, waypoints, std::nullopt, forced);
  if (!r.accepted || intent.tclass == TrafficClass::BestEffort) return r;
  Reservation res;
  res.id = next_id_++;
  res.flow = flow;
  res.path = r.path;
  res.demand_kbps = intent.demand_kbps;
  res.tclass = intent.tclass;
  res.latency_budget_us = intent.latency_bound_us;
  charge(res.path, res.demand_kbps, +1);
  r.reservation = res.id;
  reservations_.emplace(res.id, std::move(res));
  return r;
}

const Reservation& AdmissionController::reservation(int id) const {
  auto it = reservations_.find(id);
  if (it == reservations_.end()) throw Error(Errc::UnknownReservation, std::to_string(id));
  return it->second;
}

void AdmissionController::release(int id) {
  auto it = reservations_.find(id);
  if (it == reservations_.end()) throw Error(Errc::UnknownReservation, std::to_string(id));
  charge(it->second.path, it->second.demand_kbps, -1);
  reservations_.erase(it);
}

void AdmissionController::move(int id, const Path& new_path) {
  auto it = reservations_.find(id);
  if (it == reservations_.end()) throw Error(Errc::UnknownReservation, std::to_string(id));
  charge(it->second.path, it->second.demand_kbps, -1);
  charge(new_path, it->second.demand_kbps, +1);
  it->second.path = new_path;
}

void AdmissionController::charge(const Path& p, std::int64_t demand, int sign) {
  for (const auto& h : p.hops) {
    const Link& l = topo_.link(h.link);
    reserved_[dir_key(l, h.from_node)] += sign * demand;
  }
}

bool AdmissionController::ledger_consistent() const {
  for (const auto& [key, sum] : reserved_) {
    if (sum < 0) return false;
    if (sum > topo_.link(key.first).bandwidth_kbps) return false;
  }
  return true;
}

} // namespace iiotsim::qos
