#include "mallows/exact.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "mallows/distribution.hpp"
#include "mallows/errors.hpp"

namespace mallows {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_q_open_unit(double q, const char* where) {
  if (!(q > 0.0 && q < 1.0)) throw std::domain_error(std::string(where) + ": q must be in (0,1)");
}

int default_thread_count() {
  if (const char* env = std::getenv("MALLOWS_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

}  // namespace

std::vector<double> q_pochhammer_seq(int n_max, double q) {
  check_q_open_unit(q, "q_pochhammer_seq");
  std::vector<double> w(static_cast<std::size_t>(n_max) + 1);
  w[0] = 1.0;
  double ql = 1.0;
  for (int l = 1; l <= n_max; ++l) {
    ql *= q;
    w[static_cast<std::size_t>(l)] = w[static_cast<std::size_t>(l - 1)] * (1.0 - ql);
  }
  return w;
}

std::vector<double> log_q_pochhammer_seq(int n_max, double q) {
  check_q_open_unit(q, "log_q_pochhammer_seq");
  std::vector<double> lw(static_cast<std::size_t>(n_max) + 1);
  lw[0] = 0.0;
  double ql = 1.0;
  for (int l = 1; l <= n_max; ++l) {
    ql *= q;
    lw[static_cast<std::size_t>(l)] = lw[static_cast<std::size_t>(l - 1)] + std::log1p(-ql);
  }
  return lw;
}

std::vector<mpq_class> q_pochhammer_seq_exact(int n_max, const mpq_class& q) {
  std::vector<mpq_class> w(static_cast<std::size_t>(n_max) + 1);
  w[0] = 1;
  mpq_class ql(1);
  for (int l = 1; l <= n_max; ++l) {
    ql *= q;
    w[static_cast<std::size_t>(l)] = w[static_cast<std::size_t>(l - 1)] * (1 - ql);
    w[static_cast<std::size_t>(l)].canonicalize();
  }
  return w;
}

// ---------------------------------------------------------------------------
// Brute force
// ---------------------------------------------------------------------------

QPolynomial brute_force_numerator(int n, const Pattern& t, int threads) {
  if (n < 0) throw std::invalid_argument("brute_force_numerator: n must be nonnegative");
  if (n > kMaxBruteForceSize)
    throw ResourceLimitError("brute-force oracle is limited to n <= " +
                             std::to_string(kMaxBruteForceSize));
  if (threads <= 0) threads = default_thread_count();

  const std::uint64_t total = factorial_u64(n);
  const auto ranges = partition_ranks(total, threads);
  const std::size_t degree_bound = static_cast<std::size_t>(n) * (n - 1) / 2 + 1;

  // Avoider counts per inversion number fit comfortably in 64 bits at the
  // guarded sizes (bounded by the Catalan numbers).
  std::vector<std::vector<long long>> block_counts(
      ranges.size(), std::vector<long long>(degree_bound, 0));

  auto run_block = [&](std::size_t b) {
    auto& counts = block_counts[b];
    for_each_permutation(n, ranges[b].first, ranges[b].second,
                         [&](std::span<const int> word) {
                           if (!contains(word, t))
                             ++counts[static_cast<std::size_t>(inversions(word))];
                         });
  };

  if (ranges.size() == 1) {
    run_block(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(ranges.size());
    for (std::size_t b = 0; b < ranges.size(); ++b) pool.emplace_back(run_block, b);
    for (auto& th : pool) th.join();
  }

  // Merge in block order: the result is independent of scheduling.
  std::vector<mpz_class> coeffs(degree_bound, mpz_class(0));
  for (const auto& counts : block_counts)
    for (std::size_t k = 0; k < degree_bound; ++k) coeffs[k] += static_cast<long>(counts[k]);
  return QPolynomial(std::move(coeffs));
}

double brute_force_probability(int n, const Pattern& t, double q, int threads) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw std::domain_error("brute_force_probability: q must be finite and positive");
  const QPolynomial num = brute_force_numerator(n, t, threads);
  // both sides are plain polynomial evaluations, valid for any q > 0
  return num.evaluate(q) / normalizer_polynomial(n).evaluate(q);
}

mpq_class brute_force_probability_exact(int n, const Pattern& t, const mpq_class& q,
                                        int threads) {
  const QPolynomial num = brute_force_numerator(n, t, threads);
  mpq_class r = num.evaluate(q) / normalizer_polynomial(n).evaluate(q);
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------
// Recurrences
// ---------------------------------------------------------------------------

namespace {

bool uses_layered_weight(PatternTag tag) {
  switch (tag) {
    case PatternTag::P312:
    case PatternTag::P231: return false;  // weight q^{k-1}
    case PatternTag::P213:
    case PatternTag::P132: return true;  // weight q^{(n-k+1)(k-1)}
    default:
      throw std::invalid_argument("no avoidance recurrence for pattern 123 or 321");
  }
}

}  // namespace

AvoidanceSeries avoidance_series(int n_max, double q, PatternTag tag) {
  check_q_open_unit(q, "avoidance_series");
  if (n_max < 0) throw std::invalid_argument("avoidance_series: n_max must be nonnegative");
  const bool layered = uses_layered_weight(tag);

  const std::vector<double> lw = log_q_pochhammer_seq(n_max, q);
  const double lq = std::log(q);
  const double l1q = std::log1p(-q);

  std::vector<double> ld(static_cast<std::size_t>(n_max) + 1);
  ld[0] = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    // streaming log-sum-exp over k
    double m = kNegInf, s = 0.0;
    const double base = l1q - lw[static_cast<std::size_t>(n)];
    for (int k = 1; k <= n; ++k) {
      const double wexp =
          layered ? static_cast<double>(static_cast<long long>(n - k + 1) * (k - 1))
                  : static_cast<double>(k - 1);
      const double e = base + wexp * lq + lw[static_cast<std::size_t>(k - 1)] +
                       lw[static_cast<std::size_t>(n - k)] + ld[static_cast<std::size_t>(k - 1)] +
                       ld[static_cast<std::size_t>(n - k)];
      if (e <= m) {
        s += std::exp(e - m);
      } else {
        s = s * std::exp(m - e) + 1.0;
        m = e;
      }
    }
    ld[static_cast<std::size_t>(n)] = m + std::log(s);
  }

  AvoidanceSeries out;
  out.pattern = tag;
  out.q = q;
  out.d.reserve(ld.size());
  for (double l : ld) out.d.push_back(LogReal::from_log(l));
  return out;
}

std::vector<mpq_class> avoidance_series_exact(int n_max, const mpq_class& q, PatternTag tag) {
  if (n_max < 0) throw std::invalid_argument("avoidance_series_exact: n_max must be nonnegative");
  if (n_max > kMaxExactRecurrenceSize)
    throw ResourceLimitError("exact recurrence is limited to n <= " +
                             std::to_string(kMaxExactRecurrenceSize));
  const bool layered = uses_layered_weight(tag);
  const std::vector<mpq_class> w = q_pochhammer_seq_exact(n_max, q);

  std::vector<mpq_class> d(static_cast<std::size_t>(n_max) + 1);
  d[0] = 1;
  for (int n = 1; n <= n_max; ++n) {
    mpq_class s(0);
    for (int k = 1; k <= n; ++k) {
      const unsigned long wexp =
          layered ? static_cast<unsigned long>(n - k + 1) * static_cast<unsigned long>(k - 1)
                  : static_cast<unsigned long>(k - 1);
      s += mpq_pow(q, wexp) * (w[static_cast<std::size_t>(k - 1)] *
                               w[static_cast<std::size_t>(n - k)] / w[static_cast<std::size_t>(n)]) *
           d[static_cast<std::size_t>(k - 1)] * d[static_cast<std::size_t>(n - k)];
    }
    d[static_cast<std::size_t>(n)] = (1 - q) * s;
    d[static_cast<std::size_t>(n)].canonicalize();
  }
  return d;
}

std::vector<double> genfunc_coeffs(int n_max, double q) {
  check_q_open_unit(q, "genfunc_coeffs");
  std::vector<double> g(static_cast<std::size_t>(n_max) + 1);
  g[0] = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    double s = 0.0, qk = 1.0;
    for (int k = 1; k <= n; ++k) {
      s += qk * g[static_cast<std::size_t>(k - 1)] * g[static_cast<std::size_t>(n - k)];
      qk *= q;
    }
    g[static_cast<std::size_t>(n)] = (1.0 - q) * s;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Monotone displacement machinery
// ---------------------------------------------------------------------------

double monotone_displacement_probability(std::span<const int> indices, double q) {
  check_q_open_unit(q, "monotone_displacement_probability");
  if (indices.empty())
    throw std::invalid_argument("monotone_displacement_probability: need at least one index");
  int prev = 0;
  for (int i : indices) {
    if (i <= prev)
      throw std::invalid_argument(
          "monotone_displacement_probability: indices must be strictly increasing and >= 1");
    prev = i;
  }
  if (indices.back() > kMaxMonotoneIndex)
    throw ResourceLimitError("monotone displacement DP is limited to indices <= " +
                             std::to_string(kMaxMonotoneIndex));

  // cur[v] = P(X_{i_1} < ... < X_{i_j}, X_{i_j} = v); advance j with prefix sums.
  const int i1 = indices[0];
  std::vector<double> cur(static_cast<std::size_t>(i1));
  {
    const double norm = (1.0 - q) / (1.0 - std::pow(q, i1));
    double qv = 1.0;
    for (int v = 0; v < i1; ++v) {
      cur[static_cast<std::size_t>(v)] = norm * qv;
      qv *= q;
    }
  }
  std::vector<double> next;
  for (std::size_t j = 1; j < indices.size(); ++j) {
    const int ij = indices[j];
    next.assign(static_cast<std::size_t>(ij), 0.0);
    const double norm = (1.0 - q) / (1.0 - std::pow(q, ij));
    double below = 0.0;  // sum of cur[u] for u < v
    double qv = 1.0;
    for (int v = 0; v < ij; ++v) {
      next[static_cast<std::size_t>(v)] = norm * qv * below;
      if (v < static_cast<int>(cur.size())) below += cur[static_cast<std::size_t>(v)];
      qv *= q;
    }
    cur.swap(next);
  }
  double total = 0.0;
  for (double p : cur) total += p;
  return total;
}

std::pair<double, double> monotone_displacement_bounds(int m, double q) {
  check_q_open_unit(q, "monotone_displacement_bounds");
  if (m < 1) throw std::invalid_argument("monotone_displacement_bounds: m must be >= 1");
  double w = 1.0, z = 1.0, qj = 1.0;
  for (int j = 1; j <= m; ++j) {
    qj *= q;
    w *= 1.0 - qj;
    z *= (1.0 - qj) / (1.0 - q);
  }
  const double qhalf = std::pow(q, 0.5 * m * (m - 1));
  return {w * qhalf / z, qhalf / (z * w)};
}

double log_avoidance_lower_bound_123(int n, double q) {
  check_q_open_unit(q, "avoidance_lower_bound_123");
  if (n < 1) throw std::invalid_argument("avoidance_lower_bound_123: n must be >= 1");
  const double lq = std::log(q);
  const double l1q = std::log1p(-q);
  // lw[k] = log prod_{j<=k} (1-q^j); lz[k] = log Z_k, Z_0 = 1.
  std::vector<double> lw(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> lz(static_cast<std::size_t>(n) + 1, 0.0);
  double qj = 1.0;
  for (int j = 1; j <= n; ++j) {
    qj *= q;
    lw[static_cast<std::size_t>(j)] = lw[static_cast<std::size_t>(j - 1)] + std::log1p(-qj);
    lz[static_cast<std::size_t>(j)] =
        lz[static_cast<std::size_t>(j - 1)] + std::log1p(-qj) - l1q;
  }
  double best = kNegInf;
  for (int m = 1; m <= n; ++m) {
    const int r = n - m;
    const double expo =
        0.5 * (static_cast<double>(m - 1) * m + static_cast<double>(r - 1) * r);
    const double v = lw[static_cast<std::size_t>(r)] - lz[static_cast<std::size_t>(r)] -
                     lz[static_cast<std::size_t>(m)] + expo * lq;
    if (v > best) best = v;
  }
  return best;
}

double avoidance_lower_bound_123(int n, double q) {
  return std::exp(log_avoidance_lower_bound_123(n, q));
}

// ---------------------------------------------------------------------------
// Uniform-measure asymptotic
// ---------------------------------------------------------------------------

double log_uniform_avoidance_asymptotic(int n) {
  if (n < 1) throw std::invalid_argument("uniform_avoidance_asymptotic: n must be >= 1");
  const double nn = static_cast<double>(n);
  return nn * (std::log(4.0) + 1.0) - 0.5 * std::log(2.0) - std::log(M_PI) -
         (nn + 2.0) * std::log(nn);
}

double uniform_avoidance_asymptotic(int n) {
  return std::exp(log_uniform_avoidance_asymptotic(n));
}

}  // namespace mallows
