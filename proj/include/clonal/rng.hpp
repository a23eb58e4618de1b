// Deterministic random number generation for the simulator.
//
// Uses xoshiro256++ seeded through splitmix64 (public-domain generators by
// Blackman & Vigna).  Uniform and exponential variates are produced with
// explicit bit manipulation instead of std:: distributions, so that
// trajectories are bit-identical across platforms and compiler versions for
// a given seed.
#pragma once

#include <cmath>
#include <cstdint>

namespace clonal {

// splitmix64: used to expand a single 64-bit seed into generator state and to
// derive independent per-replicate streams.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Derives a stream seed for replicate/attempt `index` from a base seed.
// Mixing both words through splitmix64 keeps streams statistically
// independent even for consecutive indices.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t s = base ^ (0xD1B54A32D192ED03ULL * (index + 1));
  return splitmix64_next(s);
}

class Xoshiro256pp {
 public:
  explicit Xoshiro256pp(std::uint64_t seed = 0) { reseed(seed); }

  void reseed(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in (0, 1]: 53 top bits, then shifted away from zero so the
  // logarithm below is always finite.
  double next_uniform() {
    const std::uint64_t bits = next_u64() >> 11;
    return (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  }

  // Exponential waiting time with the given rate (> 0).
  double next_exponential(double rate) { return -std::log(next_uniform()) / rate; }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace clonal
