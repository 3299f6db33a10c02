#pragma once

#include <cstdint>

#include "iiotsim/sim/time.hpp"

namespace iiotsim {

// Simulation constants. Defaults model a fixed-delay, lossless control
// channel and TSN-style strict-priority forwarding; scenarios may override
// any of them.
struct Config {
  sim::SimTime heartbeat_us = 500;
  int link_fail_detect_beats = 2;   // link failure detected after 2 missed beats
  int ctrl_fail_detect_beats = 3;   // controller declared dead after 3 missed beats
  sim::SimTime rule_install_us = 100;
  sim::SimTime control_delay_us = 100;
  sim::SimTime rehome_us = 100;
  std::int64_t max_frame_bytes = 1500;
  sim::SimTime vnf_boot_us = 1000;
  sim::SimTime vnf_migration_us = 5000;
  int miss_buffer_packets = 64;
  int queue_capacity_packets = 64;
  int retransmit_budget = 3;        // integrity retries per sequence number
  std::int64_t nack_frame_bytes = 64;
  sim::SimTime deny_cache_us = 10'000;
  sim::SimTime session_ttl_us = 60 * sim::kSecond;
  int max_hops = 32;

  // Grid-aligned detection instant: the event at `when` is noticed at the
  // `beats`-th heartbeat tick strictly after it.
  sim::SimTime detect_at(sim::SimTime when, int beats) const {
    return (when / heartbeat_us + beats) * heartbeat_us;
  }
};

} // namespace iiotsim
