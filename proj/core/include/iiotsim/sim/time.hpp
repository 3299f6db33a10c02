#pragma once

#include <cstdint>

namespace iiotsim::sim {

// Simulated time in integer microseconds since run start. Integer so that
// traces are bit-reproducible across runs and platforms.
using SimTime = std::int64_t;

inline constexpr SimTime kMicrosecond = 1;
inline constexpr SimTime kMillisecond = 1000;
inline constexpr SimTime kSecond = 1'000'000;

} // namespace iiotsim::sim
