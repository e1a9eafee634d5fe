#pragma once

#include <utility>

namespace mallows {

/**
 * A nonnegative real extended with a symbolic +infinity. Infinity here is a
 * certificate outcome, never an IEEE overflow byproduct: it is produced only
 * by the guarded map inv_one_minus below, and absorbs under multiplication.
 */
class ExtendedReal {
public:
  ExtendedReal() : v_(0.0), inf_(false) {}
  /*implicit*/ ExtendedReal(double v) : v_(v), inf_(false) {}

  static ExtendedReal infinity() {
    ExtendedReal r;
    r.inf_ = true;
    return r;
  }

  bool is_infinite() const { return inf_; }
  bool is_finite() const { return !inf_; }
  double value() const { return v_; }  // meaningful only when finite

  friend ExtendedReal operator*(double s, ExtendedReal x) {
    if (x.inf_) return x;
    return ExtendedReal(s * x.v_);
  }

private:
  double v_;
  bool inf_;
};

/**
 * The certificate step map x -> 1/(1-x) on [0,1), +infinity elsewhere
 * (including negative arguments). Arguments within 1e-15 of 1 from below
 * are treated as 1: the guard keeps certificates conservative where the
 * chain is numerically explosive.
 */
ExtendedReal inv_one_minus(double x);
ExtendedReal inv_one_minus(ExtendedReal x);

// ---------------------------------------------------------------------------
// Truncated generating function G_q(t) = sum_n gamma_n t^n
// ---------------------------------------------------------------------------

/**
 * Partial sum sum_{n=0}^{N} gamma_n t^n. Internally runs the coefficient
 * convolution on the scaled terms u_n = gamma_n t^n, which evaluates the
 * same sum without underflowing for large N; accumulation stops early once
 * the partial sum exceeds `saturation` (all terms are positive, so the
 * returned value is then still a valid lower bound for the full sum).
 */
double G_truncated(double t, double q, int n_terms, double saturation = 1e9);

/// |G_N(t) (1 - (1-q) t G_N(q t)) - 1|; meaningful for t strictly inside
/// the disk of convergence.
double functional_equation_residual(double t, double q, int n_terms);

// ---------------------------------------------------------------------------
// Iterated certificate chains
// ---------------------------------------------------------------------------

/**
 * Nested chain F(c F(cq ... F(cq^{N-1}(1 + cq^N)) ... )). An infinite
 * outcome certifies lim (P_n^q(S_n(312)))^{1/n} > (1-q)/c. c in (0,1], N >= 1.
 */
ExtendedReal lower_certificate_chain(double c, double q, int depth);

/**
 * Nested chain F(c F(cq ... F(cq^{N-1} F(c q^N/(1-q))) ... )). A finite
 * outcome certifies lim (P_n^q(S_n(312)))^{1/n} < (1-q)/c. c in (0,1), N >= 1.
 */
ExtendedReal upper_certificate_chain(double c, double q, int depth);

/**
 * Lower chain with the tail factor dropped: innermost term cq^{N-1} instead
 * of cq^{N-1}(1 + cq^N). Also certifies the lower bound when infinite;
 * weaker at equal depth but algebraically simpler (its depth-4 form is a
 * quadratic in c). N >= 2.
 */
ExtendedReal lower_certificate_chain_no_tail(double c, double q, int depth);

// ---------------------------------------------------------------------------
// Closed forms and reference limits
// ---------------------------------------------------------------------------

/**
 * The two-sided closed-form bounds on lim (P_n^q(S_n(312)))^{1/n}:
 *   LB(q) = 2q^2(1-q)(1-q^3) / (1 - q^4 - sqrt((1-q^4)^2 - 4q^2(1-q)(1-q^3)))
 *   UB(q) = 2q^2(q^2+1)(1-q) / (1 - sqrt(1 - 4(1-q)q^2(q^2+1)))
 * Throws std::logic_error if a discriminant goes negative (cannot happen
 * for q in (0,1) unless the implementation is broken).
 */
std::pair<double, double> closed_form_bounds(double q);

/// The coarse upper bound 4(1-q); informative only for q > 3/4.
double hugo_upper_bound(double q);

/// lim (P_n^q(S_n(123)))^{1/n^2} = q^{1/4}.
double limit_exponent_123(double q);

/// lim (P_n^q(S_n(132)))^{1/n} = lim (P_n^q(S_n(213)))^{1/n} = 1 - q.
double limit_132_213(double q);

// ---------------------------------------------------------------------------
// Certified bisection for the 312/231 limit
// ---------------------------------------------------------------------------

struct LimitInterval {
  double lo = 0.0;     // certified strict lower bound for the limit
  double hi = 1.0;     // certified strict upper bound
  int depth_used = 0;  // largest chain depth reached
  bool flagged = false;  // true if some midpoint stayed undecided at depth_cap
  double mid() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
};

inline constexpr int kDefaultDepthCap = 1 << 16;

/**
 * Brackets lim (P_n^q(S_n(312)))^{1/n} to width <= eps by bisection,
 * starting from the closed-form bounds. Each midpoint is decided by
 * escalating the chain depth N in {8, 16, 32, ...} up to depth_cap until
 * one of the two certificates fires. An undecided midpoint stops the
 * bisection with the current (sound, wider) bracket and sets `flagged`.
 */
LimitInterval certified_limit_312(double q, double eps, int depth_cap = kDefaultDepthCap);

/// One row of the bounds table: everything known about a single q.
struct BoundReport {
  double q = 0.0;
  double lb_closed = 0.0;
  double ub_closed = 0.0;
  double hugo = 0.0;
  LimitInterval interval;
};

BoundReport bound_report(double q, double eps = 0.01, int depth_cap = kDefaultDepthCap);

}  // namespace mallows
