#pragma once

#include <cstdint>
#include <random>

namespace dynmed {

using Rng = std::mt19937_64;

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

// Seed of stream `stream` under `root`. Every parallel unit of work (subject,
// replication, bootstrap draw) gets its own stream, so results never depend
// on the number of threads or on scheduling.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream) noexcept;

inline std::uint64_t derive_seed(std::uint64_t root, std::uint64_t a,
                                 std::uint64_t b) noexcept {
  return derive_seed(derive_seed(root, a), b);
}

}  // namespace dynmed
