#pragma once

#include <gmpxx.h>

#include <span>
#include <utility>
#include <vector>

#include "mallows/logreal.hpp"
#include "mallows/permutation.hpp"
#include "mallows/qpolynomial.hpp"

namespace mallows {

// ---------------------------------------------------------------------------
// q-Pochhammer products w_n = prod_{l=1}^{n} (1 - q^l), w_0 = 1
// ---------------------------------------------------------------------------

std::vector<double> q_pochhammer_seq(int n_max, double q);
std::vector<double> log_q_pochhammer_seq(int n_max, double q);
std::vector<mpq_class> q_pochhammer_seq_exact(int n_max, const mpq_class& q);

// ---------------------------------------------------------------------------
// Brute-force oracle
// ---------------------------------------------------------------------------

/// Largest n accepted by the brute-force oracle (n! enumeration).
inline constexpr int kMaxBruteForceSize = 12;

/**
 * Inversion generating polynomial of the avoidance class:
 * sum over sigma in S_n avoiding `t` of q^{inv(sigma)}, exact.
 * Work is split over enumeration rank blocks and merged
 * coefficient-wise, so the result is identical for any thread count.
 * threads = 0 picks a default (MALLOWS_THREADS or the hardware count).
 */
QPolynomial brute_force_numerator(int n, const Pattern& t, int threads = 0);

/// Numerator evaluated against the normalizer, in doubles. q in (0, 1].
double brute_force_probability(int n, const Pattern& t, double q, int threads = 0);

/// Same in exact rational arithmetic.
mpq_class brute_force_probability_exact(int n, const Pattern& t, const mpq_class& q,
                                        int threads = 0);

// ---------------------------------------------------------------------------
// Avoidance recurrences
// ---------------------------------------------------------------------------

/**
 * The avoidance probabilities d_n = P_n^q(S_n(tau)) for the four patterns
 * with a product recurrence, computed in log space:
 *
 *   d_n = (1-q) sum_{k=1}^{n} W(n,k) (w_{k-1} w_{n-k} / w_n) d_{k-1} d_{n-k}
 *
 * with W(n,k) = q^{k-1} for tau in {312, 231} and W(n,k) = q^{(n-k+1)(k-1)}
 * for tau in {213, 132}; d_0 = 1 by convention.
 */
struct AvoidanceSeries {
  PatternTag pattern;
  double q = 0.0;
  std::vector<LogReal> d;  // d[0..N], d[0] = 1

  int max_n() const { return static_cast<int>(d.size()) - 1; }
  double value(int n) const { return d[static_cast<std::size_t>(n)].value(); }
  double log_value(int n) const { return d[static_cast<std::size_t>(n)].log(); }
  /// d_n^{1/n}, evaluated in log space.
  double nth_root(int n) const { return d[static_cast<std::size_t>(n)].pow(1.0 / n).value(); }
};

/// tau must be one of 312, 231, 213, 132 (no recurrence is known for the
/// other two). O(N^2). q in (0,1).
AvoidanceSeries avoidance_series(int n_max, double q, PatternTag tag);

/// Exact-rational variant of the same recurrence, for oracle-grade
/// cross-checks. Guarded to n_max <= 30 (coefficient blow-up).
inline constexpr int kMaxExactRecurrenceSize = 30;
std::vector<mpq_class> avoidance_series_exact(int n_max, const mpq_class& q, PatternTag tag);

/// Coefficients gamma_n = w_n d_n(312) of the avoidance generating function,
/// by their own convolution gamma_n = (1-q) sum_k q^{k-1} gamma_{k-1} gamma_{n-k}.
std::vector<double> genfunc_coeffs(int n_max, double q);

// ---------------------------------------------------------------------------
// Monotone displacement machinery
// ---------------------------------------------------------------------------

/// Guard for the DP index range.
inline constexpr int kMaxMonotoneIndex = 10000;

/**
 * P(X_{i_1} < X_{i_2} < ... < X_{i_m}) for the independent truncated
 * geometric displacements of the online construction. Dynamic program
 * over (position, last value), O(m * i_m) time, streaming memory.
 * Indices must be strictly increasing and >= 1.
 */
double monotone_displacement_probability(std::span<const int> indices, double q);

/// Index-free bracket: both sides of
///   prod_j (1-q^j) * q^{m(m-1)/2} / Z_m(q)  <=  P  <=  q^{m(m-1)/2} / (Z_m(q) prod_j (1-q^j)).
std::pair<double, double> monotone_displacement_bounds(int m, double q);

/**
 * Finite-n lower bound for 123-avoidance:
 *   max over m in [n] of
 *     (prod_{j=1}^{n-m} (1-q^j) / (Z_{n-m} Z_m)) q^{((m-1)m + (n-m-1)(n-m))/2}.
 * The log-space form survives n in the thousands.
 */
double log_avoidance_lower_bound_123(int n, double q);
double avoidance_lower_bound_123(int n, double q);

// ---------------------------------------------------------------------------
// Uniform-measure reference asymptotic
// ---------------------------------------------------------------------------

/// (4e)^n / (sqrt(2) pi n^{n+2}), the uniform-case avoidance asymptotic,
/// evaluated in log space.
double log_uniform_avoidance_asymptotic(int n);
double uniform_avoidance_asymptotic(int n);

}  // namespace mallows
