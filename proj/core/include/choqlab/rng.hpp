#pragma once

#include <cstdint>

namespace choqlab {

// Splittable deterministic generator (splitmix64). All stochastic paths in the
// lab draw from one seeded root so a single seed reproduces every byte of
// output, independent of platform library differences.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 1) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return next() % n; }

  // Independent child stream.
  SplitMix64 split() { return SplitMix64(next() ^ 0xd1b54a32d192ed03ull); }
};

}  // namespace choqlab
