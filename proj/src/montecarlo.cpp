#include "mallows/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>
#include <vector>

#include "mallows/distribution.hpp"
#include "mallows/errors.hpp"
#include "mallows/rng.hpp"

namespace mallows {

namespace {

int resolve_threads(int threads, int shards) {
  if (threads <= 0) {
    if (const char* env = std::getenv("MALLOWS_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) threads = v;
    }
    if (threads <= 0) {
      const unsigned hw = std::thread::hardware_concurrency();
      threads = hw == 0 ? 1 : static_cast<int>(hw);
    }
  }
  return std::min(threads, shards);
}

// Runs fn(shard_index) for every shard on up to `threads` workers. Shard
// outputs land in per-shard slots, so scheduling cannot change the result.
template <typename Fn>
void run_sharded(int shards, int threads, Fn&& fn) {
  if (threads <= 1) {
    for (int s = 0; s < shards; ++s) fn(s);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (int s = t; s < shards; s += threads) fn(s);
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<std::uint64_t> shard_sizes(std::uint64_t samples, int shards) {
  std::vector<std::uint64_t> sizes(static_cast<std::size_t>(shards));
  const std::uint64_t base = samples / static_cast<std::uint64_t>(shards);
  const std::uint64_t rem = samples % static_cast<std::uint64_t>(shards);
  for (int s = 0; s < shards; ++s)
    sizes[static_cast<std::size_t>(s)] = base + (static_cast<std::uint64_t>(s) < rem ? 1 : 0);
  return sizes;
}

}  // namespace

Estimate estimate_avoidance(int n, double q, const Pattern& t, std::uint64_t samples,
                            std::uint64_t seed, int shards, int threads) {
  if (n < 1) throw std::invalid_argument("estimate_avoidance: n must be >= 1");
  if (samples < 1) throw std::invalid_argument("estimate_avoidance: need at least one sample");
  if (shards < 1) throw std::invalid_argument("estimate_avoidance: need at least one shard");
  threads = resolve_threads(threads, shards);

  // Under the duality the sample stays at the reduced parameter and the
  // pattern is reversed instead of the permutation.
  const MallowsParam par = MallowsParam::reduce(q);
  const Pattern effective = par.reversed ? t.reversed() : t;

  const SplitRng master(seed);
  const auto sizes = shard_sizes(samples, shards);
  std::vector<std::uint64_t> hits(static_cast<std::size_t>(shards), 0);

  run_sharded(shards, threads, [&](int s) {
    SplitRng rng = master.split(static_cast<std::uint64_t>(s));
    MallowsSampler sampler(n, par.q);
    std::vector<int> word;
    std::uint64_t h = 0;
    for (std::uint64_t i = 0; i < sizes[static_cast<std::size_t>(s)]; ++i) {
      sampler.sample_into(rng, word);
      if (!contains(std::span<const int>(word), effective)) ++h;
    }
    hits[static_cast<std::size_t>(s)] = h;
  });

  Estimate e;
  e.samples = samples;
  e.seed = seed;
  e.shards = shards;
  for (std::uint64_t h : hits) e.hits += h;
  e.mean = static_cast<double>(e.hits) / static_cast<double>(samples);
  e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(samples));
  e.ci95 = {std::max(0.0, e.mean - 1.96 * e.std_error),
            std::min(1.0, e.mean + 1.96 * e.std_error)};
  e.flagged_rare = e.hits < 10;
  return e;
}

double empirical_tv_distance(int n, double q, std::uint64_t samples, std::uint64_t seed,
                             int shards, int threads) {
  if (n < 1 || n > 6)
    throw ResourceLimitError("empirical_tv_distance: supported for 1 <= n <= 6");
  if (samples < 1) throw std::invalid_argument("empirical_tv_distance: need samples");
  if (shards < 1) throw std::invalid_argument("empirical_tv_distance: need a shard");
  threads = resolve_threads(threads, shards);

  const std::uint64_t n_perms = factorial_u64(n);
  const SplitRng master(seed);
  const auto sizes = shard_sizes(samples, shards);
  std::vector<std::vector<std::uint64_t>> counts(
      static_cast<std::size_t>(shards),
      std::vector<std::uint64_t>(static_cast<std::size_t>(n_perms), 0));

  run_sharded(shards, threads, [&](int s) {
    SplitRng rng = master.split(static_cast<std::uint64_t>(s));
    MallowsSampler sampler(n, q);
    std::vector<int> word;
    auto& local = counts[static_cast<std::size_t>(s)];
    for (std::uint64_t i = 0; i < sizes[static_cast<std::size_t>(s)]; ++i) {
      sampler.sample_into(rng, word);
      // lexicographic rank of the sampled word
      std::uint64_t rank = 0;
      for (int a = 0; a < n; ++a) {
        int smaller_later = 0;
        for (int b = a + 1; b < n; ++b)
          if (word[static_cast<std::size_t>(b)] < word[static_cast<std::size_t>(a)])
            ++smaller_later;
        rank += static_cast<std::uint64_t>(smaller_later) * factorial_u64(n - 1 - a);
      }
      ++local[static_cast<std::size_t>(rank)];
    }
  });

  std::vector<std::uint64_t> freq(static_cast<std::size_t>(n_perms), 0);
  for (const auto& local : counts)
    for (std::size_t r = 0; r < freq.size(); ++r) freq[r] += local[r];

  double tv = 0.0;
  std::uint64_t rank = 0;
  for_each_permutation(n, [&](std::span<const int> word) {
    const double exact = pmf(Permutation(std::vector<int>(word.begin(), word.end())), q);
    const double emp =
        static_cast<double>(freq[static_cast<std::size_t>(rank)]) / static_cast<double>(samples);
    tv += std::fabs(emp - exact);
    ++rank;
  });
  return 0.5 * tv;
}

}  // namespace mallows
