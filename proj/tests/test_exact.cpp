#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

#include "mallows/bounds.hpp"
#include "mallows/distribution.hpp"
#include "mallows/errors.hpp"
#include "mallows/exact.hpp"
#include "mallows/permutation.hpp"
#include "mallows/rng.hpp"

using namespace mallows;

namespace {

const long kCatalan[] = {1, 1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796};

double rel_err(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

}  // namespace

TEST_SUITE("exact") {

TEST_CASE("log-space reals round-trip and accumulate") {
  SplitRng rng(6);
  for (int rep = 0; rep < 2000; ++rep) {
    // log-uniform over [1e-300, 1]; the round-trip error of exp(log x)
    // scales with |log x| ulps
    const double x = std::pow(10.0, -300.0 * rng.next_unit());
    const LogReal lr = LogReal::from_linear(x);
    const double tol = (std::fabs(std::log(x)) + 2.0) * 2.3e-16;
    CHECK(std::fabs(lr.value() - x) <= tol * x);
  }
  CHECK(LogReal::zero().is_zero());
  CHECK(LogReal::zero().value() == 0.0);
  CHECK((LogReal::zero() + LogReal::one()).value() == doctest::Approx(1.0));
  CHECK((LogReal::from_linear(0.25) * LogReal::from_linear(0.5)).value() ==
        doctest::Approx(0.125).epsilon(1e-15));
  const LogReal sum = LogReal::from_linear(3e-200) + LogReal::from_linear(1e-200);
  CHECK(sum.log() == doctest::Approx(std::log(4.0) - 200.0 * std::log(10.0)).epsilon(1e-14));
  CHECK(LogReal::from_linear(1e-200).pow(0.5).value() == doctest::Approx(1e-100));
  CHECK(LogReal::from_linear(0.25) < LogReal::from_linear(0.5));
}

TEST_CASE("q-pochhammer products") {
  const auto w = q_pochhammer_seq(20, 0.5);
  CHECK(w[0] == 1.0);
  CHECK(w[2] == doctest::Approx(0.375));
  double floor = 1.0, qk = 1.0;
  for (int k = 1; k <= 60; ++k) {
    qk *= 0.5;
    floor *= 1.0 - qk;  // converges to the infinite product > 0
  }
  for (int n = 1; n <= 20; ++n) {
    CHECK(w[static_cast<std::size_t>(n)] < w[static_cast<std::size_t>(n - 1)]);
    CHECK(w[static_cast<std::size_t>(n)] > floor * 0.999);
  }
  const auto lw = log_q_pochhammer_seq(20, 0.5);
  for (int n = 0; n <= 20; ++n)
    CHECK(std::exp(lw[static_cast<std::size_t>(n)]) ==
          doctest::Approx(w[static_cast<std::size_t>(n)]).epsilon(1e-13));
}

TEST_CASE("brute-force numerator: S_3 avoiding 312") {
  const QPolynomial num = brute_force_numerator(3, PatternTag::P312);
  // all of S_3 except 312 itself (two inversions): 1 + 2q + q^2 + q^3
  CHECK(num.degree() == 3);
  CHECK(num.coeff(0) == 1);
  CHECK(num.coeff(1) == 2);
  CHECK(num.coeff(2) == 1);
  CHECK(num.coeff(3) == 1);
  CHECK(brute_force_probability(3, PatternTag::P312, 0.5) ==
        doctest::Approx(19.0 / 21.0).epsilon(1e-12));
  CHECK(brute_force_probability_exact(3, PatternTag::P312, mpq_class(1, 2)) ==
        mpq_class(19, 21));
}

TEST_CASE("brute-force numerator at q = 1 counts the Catalan classes") {
  for (int n = 0; n <= 8; ++n)
    for (PatternTag t : kAllTags)
      CHECK(brute_force_numerator(n, t).sum_coefficients() == kCatalan[n]);
}

TEST_CASE("brute force respects its resource guard") {
  CHECK_THROWS_AS(brute_force_numerator(13, PatternTag::P321), ResourceLimitError);
}

TEST_CASE("avoidance numerators have nonnegative coefficients within the degree cap") {
  for (int n : {4, 6, 7}) {
    for (PatternTag t : kAllTags) {
      const QPolynomial num = brute_force_numerator(n, t);
      CHECK(num.degree() <= n * (n - 1) / 2);
      for (const auto& c : num.coefficients()) CHECK(c >= 0);
    }
  }
}

TEST_CASE("brute force is independent of the block split") {
  const QPolynomial one = brute_force_numerator(6, PatternTag::P231, 1);
  const QPolynomial many = brute_force_numerator(6, PatternTag::P231, 5);
  CHECK(one == many);
}

TEST_CASE("direct evaluation above q = 1 agrees with the duality") {
  CHECK(brute_force_probability(5, PatternTag::P312, 2.0) ==
        doctest::Approx(brute_force_probability(5, PatternTag::P213, 0.5)).epsilon(1e-12));
  CHECK(brute_force_probability_exact(5, PatternTag::P321, mpq_class(3)) ==
        brute_force_probability_exact(5, PatternTag::P123, mpq_class(1, 3)));
}

TEST_CASE("recurrence start and the first nontrivial values") {
  const AvoidanceSeries s312 = avoidance_series(8, 0.5, PatternTag::P312);
  CHECK(s312.value(1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s312.value(2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(s312.value(3) == doctest::Approx(19.0 / 21.0).epsilon(1e-13));
  const AvoidanceSeries s213 = avoidance_series(3, 0.5, PatternTag::P213);
  CHECK(s213.value(3) == doctest::Approx(17.0 / 21.0).epsilon(1e-13));
  CHECK_THROWS_AS(avoidance_series(5, 0.5, PatternTag::P123), std::invalid_argument);
  CHECK_THROWS_AS(avoidance_series(5, 0.5, PatternTag::P321), std::invalid_argument);
}

TEST_CASE("recurrences match the brute-force oracle to 1e-12 (n <= 8)") {
  const PatternTag tags[] = {PatternTag::P312, PatternTag::P231, PatternTag::P213,
                             PatternTag::P132};
  for (double q : {0.25, 0.5, 0.75}) {
    for (PatternTag t : tags) {
      const AvoidanceSeries s = avoidance_series(8, q, t);
      for (int n = 1; n <= 8; ++n) {
        const double oracle = brute_force_probability(n, t, q);
        CHECK(rel_err(s.value(n), oracle) < 1e-12);
      }
    }
  }
}

TEST_CASE("exact-rational recurrence equals the oracle exactly (n <= 8)") {
  const PatternTag tags[] = {PatternTag::P312, PatternTag::P231, PatternTag::P213,
                             PatternTag::P132};
  for (const mpq_class& q : {mpq_class(1, 4), mpq_class(1, 2), mpq_class(3, 4)}) {
    for (PatternTag t : tags) {
      const auto d = avoidance_series_exact(8, q, t);
      CHECK(d[1] == 1);
      CHECK(d[2] == 1);
      for (int n = 1; n <= 8; ++n)
        CHECK(d[static_cast<std::size_t>(n)] == brute_force_probability_exact(n, t, q));
    }
  }
  CHECK_THROWS_AS(avoidance_series_exact(31, mpq_class(1, 2), PatternTag::P312),
                  ResourceLimitError);
}

TEST_CASE("series are probabilities, nonincreasing in n") {
  for (PatternTag t : {PatternTag::P312, PatternTag::P213}) {
    const AvoidanceSeries s = avoidance_series(60, 0.5, t);
    for (int n = 1; n <= 60; ++n) {
      CHECK(s.log_value(n) <= 1e-14);
      if (n >= 2) CHECK(s.log_value(n) <= s.log_value(n - 1) + 1e-14);
    }
  }
}

TEST_CASE("equal pairs and the strict ordering between them") {
  for (double q : {0.3, 0.5, 0.7}) {
    const AvoidanceSeries a = avoidance_series(50, q, PatternTag::P312);
    const AvoidanceSeries b = avoidance_series(50, q, PatternTag::P231);
    const AvoidanceSeries c = avoidance_series(50, q, PatternTag::P213);
    const AvoidanceSeries d = avoidance_series(50, q, PatternTag::P132);
    for (int n = 0; n <= 50; ++n) {
      CHECK(a.log_value(n) == b.log_value(n));  // same recurrence, bitwise
      CHECK(c.log_value(n) == d.log_value(n));
    }
    for (int n = 3; n <= 50; ++n) CHECK(a.log_value(n) > c.log_value(n));
  }
}

TEST_CASE("avoidance floor (1-q)^n for the non-123 patterns") {
  for (double q : {0.3, 0.5, 0.7}) {
    for (PatternTag t : {PatternTag::P312, PatternTag::P213}) {
      const AvoidanceSeries s = avoidance_series(50, q, t);
      for (int n = 3; n <= 50; ++n) CHECK(s.log_value(n) > n * std::log1p(-q));
    }
  }
}

TEST_CASE("generating-function coefficients") {
  const double q = 0.35;
  const auto g = genfunc_coeffs(200, q);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == doctest::Approx(1.0 - q).epsilon(1e-14));
  CHECK(g[2] == doctest::Approx((1.0 - q) * (1.0 - q * q)).epsilon(1e-14));
  // gamma_n = w_n d_n(312)
  const auto w = q_pochhammer_seq(200, q);
  const AvoidanceSeries d = avoidance_series(200, q, PatternTag::P312);
  for (int n = 0; n <= 200; ++n)
    CHECK(rel_err(g[static_cast<std::size_t>(n)],
                  w[static_cast<std::size_t>(n)] * d.value(n)) < 1e-12);
}

TEST_CASE("monotone displacement probability") {
  const int single[] = {4};
  CHECK(monotone_displacement_probability(single, 0.7) == doctest::Approx(1.0));
  const int first_two[] = {1, 2};
  CHECK(monotone_displacement_probability(first_two, 0.5) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-14));
  const int mid[] = {2, 3, 4};
  CHECK(monotone_displacement_probability(mid, 0.5) ==
        doctest::Approx(1.0 / 21.0).epsilon(1e-13));

  const int bad[] = {3, 3};
  CHECK_THROWS_AS(monotone_displacement_probability(bad, 0.5), std::invalid_argument);
  const int huge[] = {1, 20000};
  CHECK_THROWS_AS(monotone_displacement_probability(huge, 0.5), ResourceLimitError);
}

TEST_CASE("monotone displacement DP agrees with Monte Carlo at 3 sigma") {
  const double q = 0.5;
  const int idx[] = {2, 3, 4};
  const double exact = monotone_displacement_probability(idx, q);
  SplitRng rng(314159);
  const int draws = 1000000;
  int hits = 0;
  for (int i = 0; i < draws; ++i) {
    const int x2 = sample_truncated_geometric(2, q, rng);
    const int x3 = sample_truncated_geometric(3, q, rng);
    const int x4 = sample_truncated_geometric(4, q, rng);
    if (x2 < x3 && x3 < x4) ++hits;
  }
  const double est = static_cast<double>(hits) / draws;
  const double sigma = std::sqrt(exact * (1.0 - exact) / draws);
  CHECK(std::fabs(est - exact) < 3.0 * sigma);
}

TEST_CASE("monotone displacement bounds bracket the DP value") {
  const auto [lo1, hi1] = monotone_displacement_bounds(1, 0.5);
  CHECK(lo1 == doctest::Approx(0.5));
  CHECK(hi1 == doctest::Approx(2.0));
  const auto [lo2, hi2] = monotone_displacement_bounds(2, 0.5);
  CHECK(lo2 == doctest::Approx(0.125));
  CHECK(hi2 == doctest::Approx(8.0 / 9.0));
  const int first_two[] = {1, 2};
  const double p12 = monotone_displacement_probability(first_two, 0.5);
  CHECK(lo2 <= p12);
  CHECK(p12 <= hi2);

  for (double q : {0.3, 0.5, 0.7}) {
    for (int m = 1; m <= 4; ++m) {
      const auto [lo, hi] = monotone_displacement_bounds(m, q);
      std::vector<int> idx(static_cast<std::size_t>(m));
      // all strictly increasing index tuples with entries in [1, 8]
      std::vector<int> stack(static_cast<std::size_t>(m), 0);
      auto rec = [&](auto&& self, int pos, int from) -> void {
        if (pos == m) {
          const double p = monotone_displacement_probability(idx, q);
          CHECK(lo <= p * (1.0 + 1e-12));
          CHECK(p <= hi * (1.0 + 1e-12));
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

TEST_CASE("123 lower bound") {
  for (double q : {0.3, 0.5, 0.7}) {
    // the m = 1 term is (1-q), so the maximum is at least that
    CHECK(avoidance_lower_bound_123(2, q) >= (1.0 - q) - 1e-15);
  }
  // never exceeds the exact probability (oracle, n <= 8)
  for (double q : {0.3, 0.5, 0.7}) {
    for (int n = 1; n <= 8; ++n) {
      const double exact = brute_force_probability(n, PatternTag::P123, q);
      CHECK(avoidance_lower_bound_123(n, q) <= exact * (1.0 + 1e-12));
    }
  }
  // (bound)^(1/n^2) climbs toward q^(1/4)
  const double target = std::pow(0.5, 0.25);
  const double at16 = std::exp(log_avoidance_lower_bound_123(16, 0.5) / (16.0 * 16.0));
  const double at64 = std::exp(log_avoidance_lower_bound_123(64, 0.5) / (64.0 * 64.0));
  CHECK(std::fabs(at64 - target) < 0.05);
  CHECK(target - at64 > 0.0);
  CHECK(target - at64 < target - at16);
}

TEST_CASE("uniform-measure avoidance asymptotic") {
  CHECK(uniform_avoidance_asymptotic(1) ==
        doctest::Approx(4.0 * M_E / (std::sqrt(2.0) * M_PI)).epsilon(1e-14));
  for (int n = 1; n <= 20; ++n)
    CHECK(rel_err(std::exp(log_uniform_avoidance_asymptotic(n)),
                  uniform_avoidance_asymptotic(n)) < 1e-12);
  // ratio against the exact Catalan probability C_n/n! tends to 1
  double prev = 1.0;
  for (int n : {20, 50, 100}) {
    const double log_exact = log_mpz(catalan_number(n)) - log_mpz(factorial_mpz(n));
    const double err = std::fabs(std::exp(log_uniform_avoidance_asymptotic(n) - log_exact) - 1.0);
    if (n == 50) CHECK(err < 0.05);
    if (n > 20) CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE("avoidance probabilities are submultiplicative (oracle, n1+n2 <= 8)") {
  const mpq_class q(1, 2);
  std::map<std::pair<int, int>, mpq_class> cache;
  auto prob = [&](int n, int t_idx, PatternTag t) -> mpq_class {
    auto key = std::make_pair(n, t_idx);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, brute_force_probability_exact(n, t, q)).first;
    return it->second;
  };
  for (int ti = 0; ti < 6; ++ti) {
    const PatternTag t = kAllTags[static_cast<std::size_t>(ti)];
    for (int n1 = 1; n1 <= 7; ++n1) {
      for (int n2 = 1; n1 + n2 <= 8; ++n2) {
        CHECK(prob(n1 + n2, ti, t) <= prob(n1, ti, t) * prob(n2, ti, t));
      }
    }
  }
}

TEST_CASE("projection: prefix and suffix sub-permutations are independent Mallows laws") {
  // On S_5 with I1 = first two positions: the induced pair (sigma_I1, sigma_I2)
  // has independent coordinates with exact Mallows marginals, in rationals.
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
  // marginal of the prefix equals P_2^q
  for (auto& [a, mass] : m1) {
    mass.canonicalize();
    CHECK(mass == pmf_exact(Permutation(a), q));
  }
  for (auto& [b, mass] : m2) {
    mass.canonicalize();
    CHECK(mass == pmf_exact(Permutation(b), q));
  }
  // independence: joint factorizes exactly
  for (auto& [ab, mass] : joint) {
    std::vector<int> a(ab.begin(), ab.begin() + 2);
    std::vector<int> b(ab.begin() + 2, ab.end());
    mpq_class expect = m1[a] * m2[b];
    expect.canonicalize();
    mpq_class got = mass;
    got.canonicalize();
    CHECK(got == expect);
  }
}

TEST_CASE("subadditivity floor: d_n^{1/n} never dips below the limit") {
  const double q = 0.5;
  const LimitInterval iv = certified_limit_312(q, 0.01);
  const AvoidanceSeries s312 = avoidance_series(300, q, PatternTag::P312);
  const AvoidanceSeries s213 = avoidance_series(300, q, PatternTag::P213);
  for (int n = 1; n <= 300; ++n) {
    CHECK(s312.nth_root(n) >= iv.lo * (1.0 - 1e-12));
    CHECK(s213.nth_root(n) >= (1.0 - q) * (1.0 - 1e-12));
  }
}

}  // TEST_SUITE
