#pragma once

#include <cstdint>
#include <utility>

#include "mallows/permutation.hpp"

namespace mallows {

/// Default shard count for Monte Carlo runs. Shards, not threads, are the
/// reproducibility key: each shard has its own split RNG stream, so results
/// are bit-identical for a fixed (seed, samples, shards) regardless of how
/// many threads execute them.
inline constexpr int kDefaultShards = 8;

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::pair<double, double> ci95{0.0, 0.0};  // mean +- 1.96 se, clipped to [0,1]
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  int shards = kDefaultShards;
  bool flagged_rare = false;  // fewer than 10 hits: estimate unreliable
};

/**
 * Binomial Monte Carlo estimate of P_n^q(S_n(tau)) from seeded Mallows
 * samples. Any q > 0 (q > 1 runs through the duality: sample at 1/q and
 * test the reversed pattern). threads = 0 picks a default; the result does
 * not depend on it.
 */
Estimate estimate_avoidance(int n, double q, const Pattern& t, std::uint64_t samples,
                            std::uint64_t seed, int shards = kDefaultShards, int threads = 0);

/**
 * Total-variation distance between the empirical distribution of `samples`
 * seeded draws on S_n and the exact Mallows pmf. n <= 6 (tractable support).
 */
double empirical_tv_distance(int n, double q, std::uint64_t samples, std::uint64_t seed,
                             int shards = kDefaultShards, int threads = 0);

}  // namespace mallows
