#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace iiotsim {

// Scheduling and admission classes, strictest first.
enum class TrafficClass { TimeCritical, Guaranteed, BestEffort };

const char* traffic_class_name(TrafficClass c);
std::optional<TrafficClass> traffic_class_from(std::string_view s);

// A northbound connectivity request: who wants to talk to whom, with which
// service class and bounds.
struct FlowIntent {
  int src = 0;                                  // host node id
  int dst = 0;                                  // host node id
  TrafficClass tclass = TrafficClass::BestEffort;
  std::int64_t demand_kbps = 0;
  std::optional<std::int64_t> latency_bound_us; // required for TimeCritical
  std::optional<std::int64_t> jitter_bound_us;
  int requester = 0;                            // principal id
  std::optional<std::string> access_tag;        // optional monitor/gateway tap point
};

} // namespace iiotsim
