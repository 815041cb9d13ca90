#pragma once

#include <cstdint>
#include <random>

namespace splitlog {

// Disjoint deterministic RNG streams derived from a run seed, so that the
// instance, the reward sequence, and any policy randomness never interleave.
enum class Stream : std::uint64_t {
  Instance = 0x715ea5e1u,
  Reward = 0x2bd6a93bu,
  Policy = 0x9e3779b9u,
};

inline std::uint64_t mix_seed(std::uint64_t seed, Stream stream) {
  // splitmix64 finalizer over (seed, stream tag)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(stream) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, Stream stream) {
  return std::mt19937_64(mix_seed(seed, stream));
}

}  // namespace splitlog
