#include <doctest.h>

#include <cmath>
#include <vector>

#include "mallows/bounds.hpp"
#include "mallows/exact.hpp"

using namespace mallows;

TEST_SUITE("bounds") {

TEST_CASE("the guarded reciprocal map") {
  CHECK(inv_one_minus(0.0).value() == doctest::Approx(1.0));
  CHECK(inv_one_minus(0.5).value() == doctest::Approx(2.0));
  CHECK(inv_one_minus(1.0).is_infinite());
  CHECK(inv_one_minus(1.7).is_infinite());
  CHECK(inv_one_minus(-0.3).is_infinite());       // R - [0,1) maps to infinity
  CHECK(inv_one_minus(1.0 - 1e-16).is_infinite());  // near-1 guard
  CHECK(inv_one_minus(1.0 - 1e-12).is_finite());
  // infinity absorbs
  CHECK((0.25 * ExtendedReal::infinity()).is_infinite());
  CHECK(inv_one_minus(ExtendedReal::infinity()).is_infinite());
}

TEST_CASE("one-step certificate examples at q = 0.5") {
  // c(1 + cq) = 0.8 * 1.4 = 1.12 >= 1: certificate fires
  CHECK(lower_certificate_chain(0.8, 0.5, 1).is_infinite());
  // 0.7 * 1.35 = 0.945 < 1: finite, no certificate
  CHECK(lower_certificate_chain(0.7, 0.5, 1).is_finite());
  // inner cq/(1-q) = 0.4, F = 5/3, outer argument 2/3 < 1: finite
  const ExtendedReal u = upper_certificate_chain(0.4, 0.5, 1);
  CHECK(u.is_finite());
  CHECK(u.value() == doctest::Approx(3.0));
  // inner cq/(1-q) = 0.9, F = 10, outer argument 9: infinite
  CHECK(upper_certificate_chain(0.9, 0.5, 1).is_infinite());
}

TEST_CASE("deeper chains only strengthen a certificate") {
  for (double q : {0.3, 0.5, 0.7}) {
    for (double c = 0.05; c < 1.0; c += 0.05) {
      bool lower_fired = false;
      bool upper_finite_seen = false;
      for (int depth : {8, 16, 32, 64, 128}) {
        const bool lf = lower_certificate_chain(c, q, depth).is_infinite();
        if (lower_fired) CHECK(lf);
        lower_fired = lf;
        const bool uf = upper_certificate_chain(c, q, depth).is_finite();
        if (upper_finite_seen) CHECK(uf);
        upper_finite_seen = uf;
      }
    }
  }
}

TEST_CASE("no contradictory certificates on a (c, q) grid") {
  for (double q = 0.1; q < 0.95; q += 0.1) {
    double min_c_lower = 2.0, max_c_upper = -1.0;
    for (double c = 0.05; c < 1.0; c += 0.05) {
      if (lower_certificate_chain(c, q, 64).is_infinite()) min_c_lower = std::min(min_c_lower, c);
      if (upper_certificate_chain(c, q, 64).is_finite()) max_c_upper = std::max(max_c_upper, c);
    }
    // lower certificate at c says limit > (1-q)/c; upper at c' says < (1-q)/c'.
    // Consistency forces every firing c to exceed every finite c'.
    if (min_c_lower <= 1.0 && max_c_upper >= 0.0) CHECK(max_c_upper < min_c_lower);
  }
}

TEST_CASE("the no-tail chain is weaker at equal depth but certifies too") {
  for (double q : {0.3, 0.5, 0.7}) {
    for (double c = 0.05; c < 1.0; c += 0.05) {
      for (int depth : {4, 8, 16}) {
        if (lower_certificate_chain_no_tail(c, q, depth).is_infinite())
          CHECK(lower_certificate_chain(c, q, depth).is_infinite());
      }
    }
  }
}

TEST_CASE("depth-4 no-tail and depth-3 upper chains reproduce the quadratic roots") {
  for (double q : {0.3, 0.5, 0.7}) {
    const double q2 = q * q, q3 = q2 * q, q4 = q2 * q2;
    // root of (q^2+q^3+q^4)c^2 - (1+q+q^2+q^3)c + 1 = 0
    const double root_lower =
        (1.0 - q4 - std::sqrt((1.0 - q4) * (1.0 - q4) - 4.0 * q2 * (1.0 - q) * (1.0 - q3))) /
        (2.0 * q2 * (1.0 - q3));
    // root of (q^2+q^4)c^2 - c + 1 - q = 0
    const double root_upper = (1.0 - std::sqrt(1.0 - 4.0 * q2 * (1.0 - q) * (1.0 + q2))) /
                              (2.0 * q2 * (1.0 + q2));

    double a = 1e-9, b = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (lower_certificate_chain_no_tail(m, q, 4).is_infinite())
        b = m;
      else
        a = m;
    }
    CHECK(std::fabs(b - root_lower) < 1e-10);

    a = 1e-9;
    b = 1.0 - 1e-12;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      if (upper_certificate_chain(m, q, 3).is_finite())
        a = m;
      else
        b = m;
    }
    CHECK(std::fabs(a - root_upper) < 1e-10);
  }
}

TEST_CASE("closed-form bounds against frozen values") {
  struct Row {
    double q, lb, ub;
  };
  // six-decimal references computed independently from the displayed formulas
  const Row rows[] = {
      {0.1, 0.990826, 0.990826}, {0.2, 0.965522, 0.965532}, {0.3, 0.925679, 0.925829},
      {0.4, 0.871267, 0.872344}, {0.5, 0.800942, 0.806186}, {0.6, 0.711792, 0.732723},
      {0.7, 0.598543, 0.675983}, {0.8, 0.452296, 0.700200}, {0.9, 0.259219, 0.821543},
  };
  for (const Row& r : rows) {
    const auto [lb, ub] = closed_form_bounds(r.q);
    CHECK(lb == doctest::Approx(r.lb).epsilon(5e-6));
    CHECK(ub == doctest::Approx(r.ub).epsilon(5e-6));
  }
  for (double q = 0.01; q < 1.0; q += 0.01) {
    const auto [lb, ub] = closed_form_bounds(q);
    CHECK(lb < ub);
    CHECK(lb > 0.0);
    CHECK(ub < 1.0 / (1.0 - q));
    if (q <= 0.5) CHECK(ub - lb < 0.01);  // the bounds virtually coincide up to 1/2
  }
}

TEST_CASE("coarse 4(1-q) bound") {
  CHECK(hugo_upper_bound(0.9) == doctest::Approx(0.4));
  CHECK(hugo_upper_bound(0.75) == doctest::Approx(1.0));
  const auto [lb, ub] = closed_form_bounds(0.9);
  CHECK(std::min(ub, hugo_upper_bound(0.9)) == doctest::Approx(0.4));
  CHECK(hugo_upper_bound(0.9) < ub);
  CHECK(lb < hugo_upper_bound(0.9));
}

TEST_CASE("reference limits") {
  CHECK(limit_exponent_123(0.5) == doctest::Approx(0.8408964152537145).epsilon(1e-14));
  CHECK(limit_exponent_123(0.999999) == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(limit_132_213(0.5) == doctest::Approx(0.5));
  CHECK(limit_132_213(0.2) == doctest::Approx(0.8));
}

TEST_CASE("132/213 root converges to 1 - q from above") {
  const double q = 0.5;
  const AvoidanceSeries s = avoidance_series(4096, q, PatternTag::P213);
  const double gap256 = s.nth_root(256) - (1.0 - q);
  const double gap4096 = s.nth_root(4096) - (1.0 - q);
  CHECK(gap256 > 0.0);
  CHECK(gap4096 > 0.0);
  CHECK(gap4096 < gap256);
}

TEST_CASE("truncated generating function") {
  CHECK(G_truncated(0.0, 0.5, 50) == doctest::Approx(1.0));
  // matches the direct coefficient sum where both are stable
  const auto g = genfunc_coeffs(200, 0.5);
  double direct = 0.0, tn = 1.0;
  for (int n = 0; n <= 200; ++n) {
    direct += g[static_cast<std::size_t>(n)] * tn;
    tn *= 0.5;
  }
  CHECK(G_truncated(0.5, 0.5, 200) == doctest::Approx(direct).epsilon(1e-12));
  // first-order behaviour at 0: slope gamma_1 = 1 - q
  const double h = 1e-6;
  CHECK((G_truncated(h, 0.5, 50) - 1.0) / h == doctest::Approx(0.5).epsilon(1e-4));
  // strictly convex on the computed range: positive second differences
  const double dt = 0.05;
  for (double t = 0.0; t + 2 * dt <= 1.0; t += dt) {
    const double a = G_truncated(t, 0.5, 400);
    const double b = G_truncated(t + dt, 0.5, 400);
    const double c = G_truncated(t + 2 * dt, 0.5, 400);
    CHECK(a + c - 2 * b > 0.0);
  }
}

TEST_CASE("functional-equation residual") {
  CHECK(functional_equation_residual(0.0, 0.5, 10) == doctest::Approx(0.0));
  CHECK(functional_equation_residual(0.5, 0.5, 400) < 1e-8);
  // the residual shrinks as the truncation doubles
  double prev = functional_equation_residual(0.9, 0.5, 25);
  for (int n : {50, 100, 200}) {
    const double cur = functional_equation_residual(0.9, 0.5, n);
    CHECK(cur <= prev * (1.0 + 1e-9));
    prev = cur;
  }
}

TEST_CASE("certified bisection lands on the known limits") {
  struct Known {
    double q, value;
  };
  for (const Known& k : {Known{0.6, 0.716}, Known{0.7, 0.605}, Known{0.8, 0.461},
                         Known{0.9, 0.275}}) {
    const LimitInterval iv = certified_limit_312(k.q, 0.01);
    CHECK_FALSE(iv.flagged);
    CHECK(iv.width() <= 0.01);
    CHECK(iv.lo <= k.value);
    CHECK(k.value <= iv.hi);
  }
}

TEST_CASE("bisection intervals sit inside the closed-form bounds") {
  for (double q = 0.1; q < 0.95; q += 0.1) {
    const auto [lb, ub] = closed_form_bounds(q);
    const LimitInterval iv = certified_limit_312(q, 0.01);
    CHECK(lb <= iv.lo * (1.0 + 1e-12));
    CHECK(iv.hi <= ub * (1.0 + 1e-12));
    CHECK(iv.lo < iv.hi);
  }
  CHECK_THROWS_AS(certified_limit_312(0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(certified_limit_312(0.5, 0.01, 4), std::invalid_argument);
}

TEST_CASE("an exhausted depth budget flags the result instead of guessing") {
  const LimitInterval iv = certified_limit_312(0.5, 1e-12, 8);
  CHECK(iv.flagged);
  CHECK(iv.lo < iv.hi);
  // still sound: the limit (0.8011413610 to ten decimals, from deep
  // certificates) stays inside the flagged bracket
  CHECK(iv.lo <= 0.8011413616);
  CHECK(0.8011413609 <= iv.hi);
}

TEST_CASE("divergence witness just below the certified radius") {
  const LimitInterval iv = certified_limit_312(0.5, 0.01);
  const double t = (1.0 - 1e-9) / iv.lo;  // beyond the true radius since lo < limit
  double prev = 0.0;
  bool exceeded = false;
  for (int n = 1000; n <= 100000 && !exceeded; n *= 2) {
    const double g = G_truncated(t, 0.5, n, 1e6);
    CHECK(g >= prev);  // positive terms: partial sums grow
    prev = g;
    if (g > 1e3) exceeded = true;
  }
  CHECK(exceeded);
}

TEST_CASE("bound report wires everything together") {
  const BoundReport r = bound_report(0.5);
  CHECK(r.q == 0.5);
  CHECK(r.lb_closed == doctest::Approx(0.800942).epsilon(1e-5));
  CHECK(r.ub_closed == doctest::Approx(0.806186).epsilon(1e-5));
  CHECK(r.hugo == doctest::Approx(2.0));
  CHECK(r.lb_closed <= r.interval.lo * (1.0 + 1e-12));
  CHECK(r.interval.hi <= r.ub_closed * (1.0 + 1e-12));
}

}  // TEST_SUITE
