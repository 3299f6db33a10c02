#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "iiotsim/flow.hpp"
#include "iiotsim/net/topology.hpp"

namespace iiotsim::qos {

enum class RejectReason { None, NoPath, NoBandwidth, LatencyBound };

const char* reject_reason_name(RejectReason r);

// Bandwidth held on each directed link of a path. BestEffort reserves
// nothing and never appears here.
struct Reservation {
  int id = 0;
  std::int64_t flow = 0;
  net::Path path;
  std::int64_t demand_kbps = 0;
  TrafficClass tclass = TrafficClass::BestEffort;
  std::optional<std::int64_t> latency_budget_us;
};

struct AdmitResult {
  bool accepted = false;
  net::Path path;
  std::optional<int> reservation;   // absent for BestEffort
  RejectReason reason = RejectReason::None;
  std::int64_t worst_case_us = 0;   // latency + per-hop blocking + jitter
};

// Reservation ledger plus constrained path selection. Admission is
// worst-case: a TimeCritical flow is accepted only if path latency plus one
// max-frame serialization per hop plus the sum of link jitter bounds fits
// its declared latency bound.
class AdmissionController {
public:
  AdmissionController(const net::Topology& topo, std::int64_t max_frame_bytes)
      : topo_(topo), max_frame_bytes_(max_frame_bytes) {}

  static std::int64_t serialization_us(std::int64_t bytes, std::int64_t bandwidth_kbps) {
    return bytes * 8 * 1000 / bandwidth_kbps;
  }
  std::int64_t max_frame_blocking_us(const net::Link& l) const {
    return serialization_us(max_frame_bytes_, l.bandwidth_kbps);
  }

  std::int64_t reserved_kbps(int link_id, bool a_to_b) const;
  std::int64_t residual_kbps(const net::Link& l, int from_node) const;
  net::ResidualFn residual_fn(std::optional<int> exclude_reservation = std::nullopt) const;

  // Worst-case end-to-end bound for a path under strict-priority service.
  std::int64_t worst_case_us(const net::Path& p) const;

  // Pure path selection + feasibility check; no ledger mutation. Waypoints
  // are intermediate nodes the path must visit in order. A forced path (an
  // application proposal) is used instead of search when it is feasible.
  AdmitResult plan(const FlowIntent& intent, const std::vector<int>& waypoints,
                   std::optional<int> exclude_reservation = std::nullopt,
                   const std::optional<net::Path>& forced = std::nullopt) const;

  // plan + reserve (Guaranteed / TimeCritical only).
  AdmitResult admit(const FlowIntent& intent, std::int64_t flow,
                    const std::vector<int>& waypoints = {},
                    const std::optional<net::Path>& forced = std::nullopt);

  void release(int reservation_id);
  // Atomically re-points a reservation at a new path: no instant at which
  // both paths or neither are charged.
  void move(int reservation_id, const net::Path& new_path);

  const std::map<int, Reservation>& reservations() const { return reservations_; }
  const Reservation& reservation(int id) const;

  // True when every directed link satisfies sum(reservations) <= capacity.
  bool ledger_consistent() const;

private:
  using DirKey = std::pair<int, bool>; // (link id, traversed a->b)

  const net::Topology& topo_;
  std::int64_t max_frame_bytes_;
  std::map<int, Reservation> reservations_;
  std::map<DirKey, std::int64_t> reserved_;
  int next_id_ = 1;

  static DirKey dir_key(const net::Link& l, int from_node) {
    return {l.id, l.a.node == from_node};
  }
  void charge(const net::Path& p, std::int64_t demand, int sign);
};

} // namespace iiotsim::qos
