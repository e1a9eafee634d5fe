#pragma once

#include <gmpxx.h>

#include <vector>

#include "mallows/permutation.hpp"
#include "mallows/qpolynomial.hpp"
#include "mallows/rng.hpp"

namespace mallows {

/**
 * Mallows parameter after the duality reduction. Core computations take
 * q in (0,1); q = 1 is the uniform case and q > 1 reduces to 1/q with
 * reversed permutations (and reversed patterns for avoidance queries).
 */
struct MallowsParam {
  double q = 0.5;         // effective parameter, in (0, 1]
  bool reversed = false;  // true iff the original q was > 1

  /// Validates raw > 0 and finite; throws std::domain_error otherwise.
  static MallowsParam reduce(double raw);
};

/// Z_n(q) = prod_{k=1}^{n} (1 - q^k)/(1 - q); the q-factorial. q in (0, 1].
double normalizer(int n, double q);
mpq_class normalizer_exact(int n, const mpq_class& q);

/// q^{inv(p)} / Z_n(q). Any q > 0: q > 1 is evaluated through the duality.
double pmf(const Permutation& p, double q);

/// Exact pmf straight from the definition; valid for any rational q > 0.
mpq_class pmf_exact(const Permutation& p, const mpq_class& q);

/// P(X_j = m) = (1-q) q^m / (1 - q^j) for m in {0..j-1}; uniform at q = 1.
/// Throws std::domain_error for m outside the support.
double truncated_geometric_pmf(int j, int m, double q);
mpq_class truncated_geometric_pmf_exact(int j, int m, const mpq_class& q);

/// One draw by closed-form inverse CDF from a single uniform variate.
int sample_truncated_geometric(int j, double q, SplitRng& rng);

/// P(identity) = (1-q)^n / prod_{j=1}^n (1 - q^j), q in (0,1).
double identity_probability(int n, double q);

/**
 * Online Mallows sampler: draws the right-displacement word X_j and decodes
 * it. Exact law P_n^q for any q > 0 (q = 1 uniform, q > 1 via duality).
 * Precomputes the per-position truncation constants, so keep one instance
 * per (n, q) when drawing many samples.
 */
class MallowsSampler {
public:
  MallowsSampler(int n, double q);

  int size() const { return n_; }
  /// Effective parameter actually sampled at (after duality reduction).
  const MallowsParam& param() const { return param_; }

  /// Draws into `word` without allocating on the steady path.
  void sample_into(SplitRng& rng, std::vector<int>& word);
  Permutation sample(SplitRng& rng);

private:
  int n_;
  MallowsParam param_;
  std::vector<double> one_minus_qj_;  // 1 - q^j, j = 1..n
  std::vector<int> displacement_;     // scratch
};

/// Convenience one-shot draw.
Permutation sample_permutation(int n, double q, SplitRng& rng);

}  // namespace mallows
