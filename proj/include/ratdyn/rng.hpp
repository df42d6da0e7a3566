#pragma once

// Counter-based random numbers: every draw is a pure function of its key,
// so results do not depend on evaluation order or thread count.

#include <cstdint>

namespace ratdyn::rng {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ (b + 0x632BE59BD9B4E019ULL));
  return splitmix64(h ^ (c + 0x8CB92BA72F3D8DD7ULL));
}

/// Uniform in [0, 1) from the top 53 bits.
constexpr double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

constexpr double uniform(std::uint64_t bits, double lo, double hi) { return lo + (hi - lo) * uniform01(bits); }

}  // namespace ratdyn::rng
