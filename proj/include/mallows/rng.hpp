#pragma once

#include <cstdint>

namespace mallows {

/**
 * Seedable, splittable pseudo-random generator with a platform-independent
 * output sequence: xoshiro256** seeded through splitmix64.
 *
 * The same 64-bit seed always yields the same stream, on every platform.
 * split(k) derives an independent child stream from (seed, k); child
 * streams are what parallel workers use, so results do not depend on
 * scheduling.
 */
class SplitRng {
public:
  static constexpr const char* kAlgorithmId = "xoshiro256ss+splitmix64";

  explicit SplitRng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t x = seed;
    for (auto& s : state_) s = splitmix64(x);
  }

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Child generator for worker `stream`; deterministic in (seed, stream).
  SplitRng split(std::uint64_t stream) const {
    std::uint64_t x = seed_ ^ (0x9e3779b97f4a7c15ULL * (stream + 1));
    return SplitRng(splitmix64(x));
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t state_[4];
};

}  // namespace mallows
