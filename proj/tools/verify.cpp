#include "verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <map>
#include <string>
#include <vector>

#include "mallows/bounds.hpp"
#include "mallows/distribution.hpp"
#include "mallows/exact.hpp"
#include "mallows/montecarlo.hpp"
#include "mallows/permutation.hpp"
#include "mallows/qpolynomial.hpp"
#include "mallows/rng.hpp"

namespace mallows::cli {

namespace {

using Clock = std::chrono::steady_clock;

struct Failure {
  std::string detail;
};

#define REQUIRE_OR_FAIL(cond, msg)   \
  do {                               \
    if (!(cond)) throw Failure{msg}; \
  } while (0)

double rel_err(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

// ---- perm-core -------------------------------------------------------------

void check_perm_core_exhaustive() {
  for (int n = 0; n <= 6; ++n) {
    for_each_permutation(n, [&](std::span<const int> w) {
      Permutation p(std::vector<int>(w.begin(), w.end()));
      REQUIRE_OR_FAIL(inversions(p) == inversions(p.inverted()),
                      "inversions not preserved by inversion");
      const auto code = lehmer_encode(p);
      REQUIRE_OR_FAIL(lehmer_decode(code) == p, "lehmer decode(encode) != id");
      long long sum = 0;
      for (int v : code) sum += v;
      REQUIRE_OR_FAIL(sum == inversions(p), "lehmer word sum != inversions");
      for (PatternTag t : kAllTags) {
        const bool c = contains(p, t);
        REQUIRE_OR_FAIL(c == contains(p.reversed(), tag_reversed(t)),
                        "containment does not commute with reversal");
        REQUIRE_OR_FAIL(c == contains(p.inverted(), tag_inverted(t)),
                        "containment does not commute with inversion");
      }
    });
  }
}

void check_fast_detectors() {
  SplitRng rng(2718281828ULL);
  for (int rep = 0; rep < 3000; ++rep) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 150);
    Permutation p = sample_permutation(n, (rep % 2) ? 0.9 : 0.99, rng);
    for (PatternTag t : kAllTags) {
      const Pattern pat(t);
      REQUIRE_OR_FAIL(contains(p, pat) == contains_reference(p.span(), pat.word().span()),
                      std::string("fast detector disagrees with reference for ") + tag_name(t));
    }
  }
}

void check_enumeration_partition() {
  const auto ranges = partition_ranks(factorial_u64(6), 4);
  std::uint64_t count = 0;
  std::vector<int> prev;
  for (const auto& [first, last] : ranges)
    for_each_permutation(6, first, last, [&](std::span<const int> w) {
      std::vector<int> cur(w.begin(), w.end());
      REQUIRE_OR_FAIL(prev.empty() || prev < cur, "enumeration not in lexicographic order");
      prev = cur;
      ++count;
    });
  REQUIRE_OR_FAIL(count == 720, "block partition does not cover the rank space");
}

// ---- mallows-dist ----------------------------------------------------------

void check_normalization_exact() {
  for (const mpq_class& q : {mpq_class(1, 4), mpq_class(1, 2), mpq_class(3, 4)}) {
    for (int n : {5, 6}) {
      mpq_class total(0);
      for_each_permutation(n, [&](std::span<const int> w) {
        total += pmf_exact(Permutation(std::vector<int>(w.begin(), w.end())), q);
      });
      total.canonicalize();
      REQUIRE_OR_FAIL(total == 1, "pmf does not sum to 1 exactly");
    }
  }
}

void check_sampler_product_law() {
  const mpq_class q(1, 2);
  for_each_permutation(5, [&](std::span<const int> w) {
    Permutation p(std::vector<int>(w.begin(), w.end()));
    const auto x = lehmer_encode(p);
    mpq_class prod(1);
    for (int j = 1; j <= 5; ++j)
      prod *= truncated_geometric_pmf_exact(j, x[static_cast<std::size_t>(j - 1)], q);
    prod.canonicalize();
    REQUIRE_OR_FAIL(prod == pmf_exact(p, q), "sampler law != mallows pmf");
  });
}

void check_duality_exact() {
  for (const mpq_class& q : {mpq_class(1, 3), mpq_class(1, 2)}) {
    const mpq_class qi = 1 / q;
    for_each_permutation(5, [&](std::span<const int> w) {
      Permutation p(std::vector<int>(w.begin(), w.end()));
      REQUIRE_OR_FAIL(pmf_exact(p, q) == pmf_exact(p.reversed(), qi),
                      "q <-> 1/q duality violated");
    });
  }
}

void check_sampler_tv() {
  const double tv = empirical_tv_distance(4, 0.5, 200000, 12345);
  REQUIRE_OR_FAIL(tv < 0.01, "sampler TV distance too large: " + std::to_string(tv));
}

void check_identity_floor() {
  for (double q : {0.3, 0.5, 0.7}) {
    for (int n = 1; n <= 50; ++n) {
      REQUIRE_OR_FAIL(std::log(identity_probability(n, q)) > n * std::log1p(-q),
                      "identity probability at or below (1-q)^n");
    }
  }
}

// ---- exact-engine ----------------------------------------------------------

void check_recurrence_vs_oracle() {
  const PatternTag tags[] = {PatternTag::P312, PatternTag::P231, PatternTag::P213,
                             PatternTag::P132};
  for (double q : {0.25, 0.5, 0.75}) {
    for (PatternTag t : tags) {
      const AvoidanceSeries s = avoidance_series(8, q, t);
      for (int n = 1; n <= 8; ++n)
        REQUIRE_OR_FAIL(rel_err(s.value(n), brute_force_probability(n, t, q)) < 1e-12,
                        "recurrence deviates from brute force");
    }
  }
  const mpq_class qr(1, 2);
  for (PatternTag t : tags) {
    const auto d = avoidance_series_exact(7, qr, t);
    for (int n = 1; n <= 7; ++n)
      REQUIRE_OR_FAIL(d[static_cast<std::size_t>(n)] == brute_force_probability_exact(n, t, qr),
                      "exact recurrence not equal to oracle");
  }
}

void check_pair_equalities() {
  for (double q : {0.3, 0.5, 0.7}) {
    const AvoidanceSeries a = avoidance_series(50, q, PatternTag::P312);
    const AvoidanceSeries b = avoidance_series(50, q, PatternTag::P231);
    const AvoidanceSeries c = avoidance_series(50, q, PatternTag::P213);
    const AvoidanceSeries d = avoidance_series(50, q, PatternTag::P132);
    for (int n = 0; n <= 50; ++n) {
      REQUIRE_OR_FAIL(a.log_value(n) == b.log_value(n), "312 and 231 series differ");
      REQUIRE_OR_FAIL(c.log_value(n) == d.log_value(n), "213 and 132 series differ");
      if (n >= 3)
        REQUIRE_OR_FAIL(a.log_value(n) > c.log_value(n), "312 series not above 213 series");
    }
  }
}

void check_avoidance_floor() {
  for (double q : {0.3, 0.5, 0.7})
    for (PatternTag t : {PatternTag::P312, PatternTag::P213}) {
      const AvoidanceSeries s = avoidance_series(50, q, t);
      for (int n = 3; n <= 50; ++n)
        REQUIRE_OR_FAIL(s.log_value(n) > n * std::log1p(-q), "avoidance below (1-q)^n");
    }
}

void check_catalan_counts() {
  for (int n = 0; n <= 9; ++n) {
    const mpz_class cn = catalan_number(n);
    for (PatternTag t : kAllTags)
      REQUIRE_OR_FAIL(brute_force_numerator(n, t).sum_coefficients() == cn,
                      "avoider count != catalan number");
  }
}

void check_genfunc_coeffs() {
  for (double q : {0.35, 0.5, 0.8}) {
    const auto g = genfunc_coeffs(200, q);
    const auto w = q_pochhammer_seq(200, q);
    const AvoidanceSeries d = avoidance_series(200, q, PatternTag::P312);
    for (int n = 0; n <= 200; ++n)
      REQUIRE_OR_FAIL(rel_err(g[static_cast<std::size_t>(n)],
                              w[static_cast<std::size_t>(n)] * d.value(n)) < 1e-12,
                      "gamma_n != w_n d_n");
  }
}

void check_monotone_displacements() {
  const int i12[] = {1, 2};
  REQUIRE_OR_FAIL(rel_err(monotone_displacement_probability(i12, 0.5), 1.0 / 3.0) < 1e-13,
                  "P(X_1 < X_2) != 1/3");
  const int i234[] = {2, 3, 4};
  REQUIRE_OR_FAIL(rel_err(monotone_displacement_probability(i234, 0.5), 1.0 / 21.0) < 1e-12,
                  "P(X_2 < X_3 < X_4) != 1/21");
  for (double q : {0.3, 0.5, 0.7}) {
    for (int m = 1; m <= 4; ++m) {
      const auto [lo, hi] = monotone_displacement_bounds(m, q);
      std::vector<int> idx(static_cast<std::size_t>(m));
      auto rec = [&](auto&& self, int pos, int from) -> void {
        if (pos == m) {
          const double p = monotone_displacement_probability(idx, q);
          REQUIRE_OR_FAIL(lo <= p * (1 + 1e-12) && p <= hi * (1 + 1e-12),
                          "index-free bounds fail to bracket the DP value");
          return;
        }
        for (int i = from; i <= 8; ++i) {
          idx[static_cast<std::size_t>(pos)] = i;
          self(self, pos + 1, i + 1);
        }
      };
      rec(rec, 0, 1);
    }
  }
}

void check_123_lower_bound() {
  for (double q : {0.3, 0.5, 0.7})
    for (int n = 1; n <= 8; ++n)
      REQUIRE_OR_FAIL(avoidance_lower_bound_123(n, q) <=
                          brute_force_probability(n, PatternTag::P123, q) * (1 + 1e-12),
                      "123 lower bound exceeds the exact probability");
  const double target = std::pow(0.5, 0.25);
  const double at16 = std::exp(log_avoidance_lower_bound_123(16, 0.5) / 256.0);
  const double at64 = std::exp(log_avoidance_lower_bound_123(64, 0.5) / 4096.0);
  REQUIRE_OR_FAIL(std::fabs(at64 - target) < 0.05 && (target - at64) < (target - at16),
                  "123 bound does not climb toward q^{1/4}");
}

void check_132_213_trend() {
  const AvoidanceSeries s = avoidance_series(4096, 0.5, PatternTag::P213);
  const double g256 = s.nth_root(256) - 0.5;
  const double g4096 = s.nth_root(4096) - 0.5;
  REQUIRE_OR_FAIL(g256 > 0 && g4096 > 0 && g4096 < g256, "213 root does not close in on 1-q");
}

void check_uniform_asymptotic() {
  double prev = 1.0;
  for (int n : {20, 50, 100}) {
    const double log_exact = log_mpz(catalan_number(n)) - log_mpz(factorial_mpz(n));
    const double err = std::fabs(std::exp(log_uniform_avoidance_asymptotic(n) - log_exact) - 1.0);
    if (n == 50) REQUIRE_OR_FAIL(err < 0.05, "asymptotic off by more than 5% at n=50");
    if (n > 20) REQUIRE_OR_FAIL(err < prev, "asymptotic error not shrinking");
    prev = err;
  }
}

void check_submultiplicativity() {
  const mpq_class q(1, 2);
  std::map<std::pair<int, int>, mpq_class> cache;
  for (int ti = 0; ti < 6; ++ti) {
    const PatternTag t = kAllTags[static_cast<std::size_t>(ti)];
    for (int n = 1; n <= 7; ++n) cache[{n, ti}] = brute_force_probability_exact(n, t, q);
    for (int n1 = 1; n1 <= 6; ++n1)
      for (int n2 = 1; n1 + n2 <= 7; ++n2) {
        const bool ok = cache[{n1 + n2, ti}] <= cache[{n1, ti}] * cache[{n2, ti}];
        REQUIRE_OR_FAIL(ok, "avoidance probabilities not submultiplicative");
      }
  }
}

void check_projection_independence() {
  const mpq_class q(1, 2);
  std::map<std::vector<int>, mpq_class> joint, m1, m2;
  for_each_permutation(5, [&](std::span<const int> w) {
    Permutation p(std::vector<int>(w.begin(), w.end()));
    const int i1[] = {0, 1};
    const int i2[] = {2, 3, 4};
    const auto a = p.induced(i1).word();
    const auto b = p.induced(i2).word();
    const mpq_class mass = pmf_exact(p, q);
    std::vector<int> ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    joint[ab] += mass;
    m1[a] += mass;
    m2[b] += mass;
  });
  for (auto& [a, mass] : m1) {
    mass.canonicalize();
    REQUIRE_OR_FAIL(mass == pmf_exact(Permutation(a), q), "prefix marginal is not Mallows");
  }
  for (auto& [ab, mass] : joint) {
    mpq_class expect = m1[{ab[0], ab[1]}] * m2[{ab[2], ab[3], ab[4]}];
    expect.canonicalize();
    mpq_class got = mass;
    got.canonicalize();
    REQUIRE_OR_FAIL(got == expect, "prefix and suffix patterns are not independent");
  }
}

// ---- genfunc-bounds --------------------------------------------------------

void check_functional_equation() {
  REQUIRE_OR_FAIL(functional_equation_residual(0.5, 0.5, 400) < 1e-8,
                  "functional-equation residual too large");
  const LimitInterval iv = certified_limit_312(0.5, 0.01);
  const double t = (1.0 - 1e-9) / iv.lo;
  bool exceeded = false;
  for (int n = 1000; n <= 100000 && !exceeded; n *= 2)
    exceeded = G_truncated(t, 0.5, n, 1e6) > 1e3;
  REQUIRE_OR_FAIL(exceeded, "no divergence just below the certified radius");
}

void check_closed_forms() {
  for (double q = 0.01; q < 1.0; q += 0.01) {
    const auto [lb, ub] = closed_form_bounds(q);
    REQUIRE_OR_FAIL(lb < ub, "LB >= UB");
    if (q <= 0.5) REQUIRE_OR_FAIL(ub - lb < 0.01, "bounds differ by more than .01 below q = 1/2");
  }
  for (double q = 0.1; q < 0.95; q += 0.1) {
    const auto [lb, ub] = closed_form_bounds(q);
    const LimitInterval iv = certified_limit_312(q, 0.01);
    REQUIRE_OR_FAIL(lb <= iv.lo * (1 + 1e-12) && iv.hi <= ub * (1 + 1e-12),
                    "bisection interval escapes the closed-form bracket");
  }
}

void check_known_limits() {
  const std::pair<double, double> known[] = {
      {0.6, 0.716}, {0.7, 0.605}, {0.8, 0.461}, {0.9, 0.275}};
  for (const auto& [q, value] : known) {
    const LimitInterval iv = certified_limit_312(q, 0.01);
    REQUIRE_OR_FAIL(!iv.flagged && iv.lo <= value && value <= iv.hi,
                    "certified interval misses the reference limit");
  }
}

void check_quadratic_roots() {
  for (double q : {0.3, 0.5, 0.7}) {
    const double q2 = q * q, q3 = q2 * q, q4 = q2 * q2;
    const double root_lower =
        (1 - q4 - std::sqrt((1 - q4) * (1 - q4) - 4 * q2 * (1 - q) * (1 - q3))) /
        (2 * q2 * (1 - q3));
    const double root_upper =
        (1 - std::sqrt(1 - 4 * q2 * (1 - q) * (1 + q2))) / (2 * q2 * (1 + q2));
    double a = 1e-9, b = 1.0;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      (lower_certificate_chain_no_tail(m, q, 4).is_infinite() ? b : a) = m;
    }
    REQUIRE_OR_FAIL(std::fabs(b - root_lower) < 1e-10, "depth-4 no-tail root mismatch");
    a = 1e-9;
    b = 1.0 - 1e-12;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      (upper_certificate_chain(m, q, 3).is_finite() ? a : b) = m;
    }
    REQUIRE_OR_FAIL(std::fabs(a - root_upper) < 1e-10, "depth-3 upper root mismatch");
  }
}

void check_certificate_consistency() {
  for (double q = 0.1; q < 0.95; q += 0.1) {
    double min_lower = 2.0, max_upper = -1.0;
    for (double c = 0.05; c < 1.0; c += 0.05) {
      if (lower_certificate_chain(c, q, 64).is_infinite()) min_lower = std::min(min_lower, c);
      if (upper_certificate_chain(c, q, 64).is_finite()) max_upper = std::max(max_upper, c);
    }
    if (min_lower <= 1.0 && max_upper >= 0.0)
      REQUIRE_OR_FAIL(max_upper < min_lower, "contradictory certificates on the grid");
  }
}

// ---- montecarlo ------------------------------------------------------------

void check_montecarlo() {
  const Estimate a = estimate_avoidance(8, 0.6, PatternTag::P312, 20000, 99);
  const Estimate b = estimate_avoidance(8, 0.6, PatternTag::P312, 20000, 99);
  REQUIRE_OR_FAIL(a.hits == b.hits && a.mean == b.mean, "estimates not reproducible");
  const double oracle = brute_force_probability(5, PatternTag::P312, 0.5);
  int covered = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Estimate e = estimate_avoidance(5, 0.5, PatternTag::P312, 5000, seed);
    if (e.ci95.first <= oracle && oracle <= e.ci95.second) ++covered;
  }
  REQUIRE_OR_FAIL(covered >= 16, "confidence intervals miss the oracle too often");
}

struct NamedCheck {
  const char* name;
  std::function<void()> fn;
};

}  // namespace

int run_verification(std::ostream& os) {
  const std::vector<NamedCheck> checks = {
      {"perm-core invariants (exhaustive n<=6)", check_perm_core_exhaustive},
      {"fast pattern detectors vs reference", check_fast_detectors},
      {"enumeration block partition", check_enumeration_partition},
      {"pmf normalization (exact rationals)", check_normalization_exact},
      {"sampler product law (exact, S_5)", check_sampler_product_law},
      {"q <-> 1/q duality (exact, S_5)", check_duality_exact},
      {"sampler empirical TV on S_4", check_sampler_tv},
      {"identity probability floor", check_identity_floor},
      {"recurrences vs brute-force oracle", check_recurrence_vs_oracle},
      {"pair equalities and strict ordering", check_pair_equalities},
      {"avoidance floor (1-q)^n", check_avoidance_floor},
      {"catalan counts (all patterns, n<=9)", check_catalan_counts},
      {"generating-function coefficients", check_genfunc_coeffs},
      {"monotone displacement DP and bounds", check_monotone_displacements},
      {"123 lower bound (oracle + trend)", check_123_lower_bound},
      {"132/213 root trend to 1-q", check_132_213_trend},
      {"uniform-case asymptotic", check_uniform_asymptotic},
      {"submultiplicativity (oracle)", check_submultiplicativity},
      {"projection independence (exact, S_5)", check_projection_independence},
      {"functional equation and divergence", check_functional_equation},
      {"closed-form bounds", check_closed_forms},
      {"certified intervals at known limits", check_known_limits},
      {"quadratic roots from certificate chains", check_quadratic_roots},
      {"certificate consistency grid", check_certificate_consistency},
      {"monte carlo reproducibility and coverage", check_montecarlo},
  };

  int failures = 0;
  for (const NamedCheck& check : checks) {
    const auto start = Clock::now();
    std::string detail;
    bool ok = true;
    try {
      check.fn();
    } catch (const Failure& f) {
      ok = false;
      detail = f.detail;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    os << (ok ? "[PASS] " : "[FAIL] ") << check.name << " (" << std::fixed
       << std::setprecision(2) << secs << "s)";
    if (!ok) os << "  -- " << detail;
    os << '\n';
    if (!ok) ++failures;
  }
  os << (failures == 0 ? "verification passed: " : "verification FAILED: ")
     << (checks.size() - static_cast<std::size_t>(failures)) << "/" << checks.size()
     << " checks\n";
  return failures;
}

}  // namespace mallows::cli
