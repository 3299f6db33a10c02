#pragma once

#include <cstdint>
#include <vector>

#include "iiotsim/flow.hpp"
#include "iiotsim/sim/time.hpp"

namespace iiotsim::net {

enum class PacketPurpose { Data, Auth };

// A simulated frame. `payload_tag` stands in for the payload; the checksum
// is computed over it at injection and re-verified at the sink, so tampering
// with the tag is detectable without modeling real bytes.
struct Packet {
  std::int64_t flow = 0;
  std::int64_t seq = 0;            // per-flow, strictly increasing at the source
  int attempt = 1;                 // 1 = original transmission
  std::uint64_t txi = 0;           // per-flow injection index (retransmits advance it)
  int src = 0;
  int dst = 0;
  int vlan = 0;                    // segment tag stamped at injection
  TrafficClass tclass = TrafficClass::BestEffort;
  PacketPurpose purpose = PacketPurpose::Data;
  std::int64_t size_bytes = 0;
  std::uint64_t payload_tag = 0;
  std::uint64_t checksum = 0;
  sim::SimTime created_at = 0;
  bool tampered = false;           // injection-side ground truth, never inspected in-path
  int hops = 0;
  std::vector<int> hop_links;      // links traversed, in order
  bool flood_copy = false;
};

// Additive checksum over the payload tag and flow coordinates.
inline std::uint64_t packet_checksum(std::uint64_t payload_tag, std::int64_t flow,
                                     std::int64_t seq) {
  return payload_tag + static_cast<std::uint64_t>(flow) * 0x10001ull +
         static_cast<std::uint64_t>(seq);
}

inline bool checksum_ok(const Packet& p) {
  return p.checksum == packet_checksum(p.payload_tag, p.flow, p.seq);
}

} // namespace iiotsim::net
