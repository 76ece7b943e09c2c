#pragma once

// Self-contained deterministic RNG (xoshiro256++ seeded via splitmix64).
// All draws are derived from explicit 64-bit seeds so outputs are
// bit-reproducible across platforms and standard libraries.

#include <cmath>
#include <cstdint>

namespace proxlab {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

class rng {
 public:
  explicit rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64_next(sm);
  }

  // Derives an independent stream; used to split work deterministically
  // across samples or worker chunks.
  static rng substream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t sm = seed ^ (0xD1B54A32D192ED03ULL * (index + 1));
    return rng(splitmix64_next(sm));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform in [0,1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform in {0,...,n-1}. Modulo bias is irrelevant at our range sizes.
  std::uint64_t uniform_index(std::uint64_t n) { return n ? next_u64() % n : 0; }

  // Standard normal via Box-Muller (no rejection, so stream use is fixed).
  double normal() {
    double u1 = uniform01();
    double u2 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

}  // namespace proxlab
