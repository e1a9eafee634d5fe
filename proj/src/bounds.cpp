#include "mallows/bounds.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mallows {

namespace {

constexpr double kUnitGuard = 1e-15;

void check_q_open_unit(double q, const char* where) {
  if (!(q > 0.0 && q < 1.0))
    throw std::domain_error(std::string(where) + ": q must be in (0,1)");
}

std::vector<double> powers(double q, int n_max) {
  std::vector<double> p(static_cast<std::size_t>(n_max) + 1);
  p[0] = 1.0;
  for (int k = 1; k <= n_max; ++k) p[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k - 1)] * q;
  return p;
}

}  // namespace

ExtendedReal inv_one_minus(double x) {
  if (x < 0.0 || x >= 1.0 - kUnitGuard) return ExtendedReal::infinity();
  return ExtendedReal(1.0 / (1.0 - x));
}

ExtendedReal inv_one_minus(ExtendedReal x) {
  if (x.is_infinite()) return x;
  return inv_one_minus(x.value());
}

// ---------------------------------------------------------------------------
// Truncated generating function
// ---------------------------------------------------------------------------

double G_truncated(double t, double q, int n_terms, double saturation) {
  check_q_open_unit(q, "G_truncated");
  if (t < 0.0) throw std::domain_error("G_truncated: t must be nonnegative");
  if (n_terms < 0) throw std::invalid_argument("G_truncated: n_terms must be nonnegative");
  // u_n = gamma_n t^n obeys u_n = (1-q) t sum_k q^{k-1} u_{k-1} u_{n-k}.
  std::vector<double> u;
  u.reserve(static_cast<std::size_t>(n_terms) + 1);
  u.push_back(1.0);
  double total = 1.0;
  for (int n = 1; n <= n_terms; ++n) {
    double s = 0.0, qk = 1.0;
    for (int k = 1; k <= n; ++k) {
      s += qk * u[static_cast<std::size_t>(k - 1)] * u[static_cast<std::size_t>(n - k)];
      qk *= q;
    }
    const double un = (1.0 - q) * t * s;
    u.push_back(un);
    total += un;
    if (total > saturation) break;
  }
  return total;
}

double functional_equation_residual(double t, double q, int n_terms) {
  const double g_t = G_truncated(t, q, n_terms);
  const double g_qt = G_truncated(q * t, q, n_terms);
  return std::fabs(g_t * (1.0 - (1.0 - q) * t * g_qt) - 1.0);
}

// ---------------------------------------------------------------------------
// Certificate chains
// ---------------------------------------------------------------------------

ExtendedReal lower_certificate_chain(double c, double q, int depth) {
  check_q_open_unit(q, "lower_certificate_chain");
  if (!(c > 0.0 && c <= 1.0))
    throw std::domain_error("lower_certificate_chain: c must be in (0,1]");
  if (depth < 1) throw std::invalid_argument("lower_certificate_chain: depth must be >= 1");
  const auto qp = powers(q, depth);
  ExtendedReal v(c * qp[static_cast<std::size_t>(depth - 1)] *
                 (1.0 + c * qp[static_cast<std::size_t>(depth)]));
  for (int k = depth - 2; k >= 0; --k) {
    v = (c * qp[static_cast<std::size_t>(k)]) * inv_one_minus(v);
    if (v.is_infinite()) return v;
  }
  return inv_one_minus(v);
}

ExtendedReal upper_certificate_chain(double c, double q, int depth) {
  check_q_open_unit(q, "upper_certificate_chain");
  if (!(c > 0.0 && c < 1.0))
    throw std::domain_error("upper_certificate_chain: c must be in (0,1)");
  if (depth < 1) throw std::invalid_argument("upper_certificate_chain: depth must be >= 1");
  const auto qp = powers(q, depth);
  ExtendedReal v = inv_one_minus(c * qp[static_cast<std::size_t>(depth)] / (1.0 - q));
  for (int k = depth - 1; k >= 0; --k) {
    if (v.is_infinite()) return v;
    v = inv_one_minus(c * qp[static_cast<std::size_t>(k)] * v.value());
  }
  return v;
}

ExtendedReal lower_certificate_chain_no_tail(double c, double q, int depth) {
  check_q_open_unit(q, "lower_certificate_chain_no_tail");
  if (!(c > 0.0 && c <= 1.0))
    throw std::domain_error("lower_certificate_chain_no_tail: c must be in (0,1]");
  if (depth < 2)
    throw std::invalid_argument("lower_certificate_chain_no_tail: depth must be >= 2");
  const auto qp = powers(q, depth);
  ExtendedReal v(c * qp[static_cast<std::size_t>(depth - 1)]);
  for (int k = depth - 2; k >= 0; --k) {
    v = (c * qp[static_cast<std::size_t>(k)]) * inv_one_minus(v);
    if (v.is_infinite()) return v;
  }
  return inv_one_minus(v);
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

std::pair<double, double> closed_form_bounds(double q) {
  check_q_open_unit(q, "closed_form_bounds");
  const double q2 = q * q;
  const double q3 = q2 * q;
  const double q4 = q2 * q2;

  const double disc_lb = (1.0 - q4) * (1.0 - q4) - 4.0 * q2 * (1.0 - q) * (1.0 - q3);
  const double disc_ub = 1.0 - 4.0 * (1.0 - q) * q2 * (q2 + 1.0);
  if (disc_lb < 0.0 || disc_ub < 0.0)
    throw std::logic_error("closed_form_bounds: negative discriminant");

  const double lb =
      2.0 * q2 * (1.0 - q) * (1.0 - q3) / (1.0 - q4 - std::sqrt(disc_lb));
  const double ub = 2.0 * q2 * (q2 + 1.0) * (1.0 - q) / (1.0 - std::sqrt(disc_ub));
  return {lb, ub};
}

double hugo_upper_bound(double q) {
  check_q_open_unit(q, "hugo_upper_bound");
  return 4.0 * (1.0 - q);
}

double limit_exponent_123(double q) {
  check_q_open_unit(q, "limit_exponent_123");
  return std::pow(q, 0.25);
}

double limit_132_213(double q) {
  check_q_open_unit(q, "limit_132_213");
  return 1.0 - q;
}

// ---------------------------------------------------------------------------
// Certified bisection
// ---------------------------------------------------------------------------

LimitInterval certified_limit_312(double q, double eps, int depth_cap) {
  check_q_open_unit(q, "certified_limit_312");
  if (!(eps > 0.0)) throw std::invalid_argument("certified_limit_312: eps must be positive");
  if (depth_cap < 8) throw std::invalid_argument("certified_limit_312: depth_cap must be >= 8");

  const auto [lb, ub] = closed_form_bounds(q);
  LimitInterval out;
  out.lo = lb;
  out.hi = ub;
  while (out.hi - out.lo > eps) {
    const double mid = 0.5 * (out.lo + out.hi);
    const double c = (1.0 - q) / mid;  // mid > lb > 1-q, so c in (0,1)
    bool decided = false;
    for (int depth = 8; depth <= depth_cap; depth *= 2) {
      if (depth > out.depth_used) out.depth_used = depth;
      if (lower_certificate_chain(c, q, depth).is_infinite()) {
        out.lo = mid;  // limit > (1-q)/c = mid
        decided = true;
        break;
      }
      if (upper_certificate_chain(c, q, depth).is_finite()) {
        out.hi = mid;  // limit < (1-q)/c = mid
        decided = true;
        break;
      }
    }
    if (!decided) {
      // Neither certificate fired: keep the last sound bracket (one
      // bisection step wider than requested) rather than guessing.
      out.flagged = true;
      break;
    }
  }
  return out;
}

BoundReport bound_report(double q, double eps, int depth_cap) {
  BoundReport r;
  r.q = q;
  const auto [lb, ub] = closed_form_bounds(q);
  r.lb_closed = lb;
  r.ub_closed = ub;
  r.hugo = hugo_upper_bound(q);
  r.interval = certified_limit_312(q, eps, depth_cap);
  return r;
}

}  // namespace mallows
