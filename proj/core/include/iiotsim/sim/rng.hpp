#pragma once

#include <cstdint>

#include "iiotsim/sim/error.hpp"

namespace iiotsim::sim {

// Counter-based generator (splitmix64 over seed ^ draw index). Every draw
// depends only on the run seed and the number of draws made before it, so a
// run replayed with the same seed consumes identical values regardless of
// where the draws happen.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = seed_ + 0x9E3779B97F4A7C15ull * ++counter_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Uniform integer in [lo, hi], both inclusive.
  std::int64_t uniform(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw Error(Errc::InvalidRange, "rand_uniform lo > hi");
    const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
    if (span == 0) return lo + static_cast<std::int64_t>(next_u64()); // full 64-bit range
    return lo + static_cast<std::int64_t>(next_u64() % span);
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t draws() const { return counter_; }

private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

} // namespace iiotsim::sim
