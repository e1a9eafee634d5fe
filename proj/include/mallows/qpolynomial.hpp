#pragma once

#include <gmpxx.h>

#include <string>
#include <vector>

namespace mallows {

/**
 * Polynomial in q with arbitrary-precision integer coefficients,
 * coefficient index = power of q. The exact representation used by the
 * brute-force oracle (e.g. the inversion generating polynomial of an
 * avoidance class).
 */
class QPolynomial {
public:
  QPolynomial() = default;  // the zero polynomial
  explicit QPolynomial(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) { trim(); }

  static QPolynomial one() { return QPolynomial({mpz_class(1)}); }

  /// Degree, or -1 for the zero polynomial.
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }

  const mpz_class& coeff(int k) const {
    static const mpz_class kZero(0);
    return (k >= 0 && k <= degree()) ? c_[static_cast<std::size_t>(k)] : kZero;
  }
  const std::vector<mpz_class>& coefficients() const { return c_; }

  void add_term(int power, const mpz_class& amount);

  QPolynomial& operator+=(const QPolynomial& o);
  QPolynomial operator*(const QPolynomial& o) const;
  bool operator==(const QPolynomial&) const = default;

  mpq_class evaluate(const mpq_class& q) const;
  double evaluate(double q) const;

  /// Value at q = 1 (the plain count when coefficients count objects).
  mpz_class sum_coefficients() const;

  /// Coefficients as decimal strings, constant term first.
  std::vector<std::string> to_decimal_strings() const;

private:
  void trim();
  std::vector<mpz_class> c_;
};

/// Inversion generating polynomial of the whole symmetric group S_n:
/// prod_{k=1}^{n} (1 + q + ... + q^{k-1}).
QPolynomial normalizer_polynomial(int n);

/// q^k as an exact rational, valid for any rational q and k >= 0.
mpq_class mpq_pow(const mpq_class& q, unsigned long k);

/// Exact rational value of a decimal literal ("0.25", "2", "1e-3").
mpq_class mpq_from_decimal(const std::string& text);

/// The exact rational of the shortest decimal that round-trips `v`
/// (so 0.1 becomes 1/10, not the dyadic expansion of the double).
mpq_class mpq_from_double_decimal(double v);

/// Catalan number binom(2n, n)/(n+1).
mpz_class catalan_number(int n);

mpz_class factorial_mpz(int n);

/// log of a positive big integer, via its base-2 mantissa/exponent split.
double log_mpz(const mpz_class& z);

}  // namespace mallows
