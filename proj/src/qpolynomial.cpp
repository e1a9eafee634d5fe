#include "mallows/qpolynomial.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>

namespace mallows {

void QPolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

void QPolynomial::add_term(int power, const mpz_class& amount) {
  if (power < 0) throw std::invalid_argument("QPolynomial: negative power");
  if (static_cast<std::size_t>(power) >= c_.size())
    c_.resize(static_cast<std::size_t>(power) + 1, mpz_class(0));
  c_[static_cast<std::size_t>(power)] += amount;
  trim();
}

QPolynomial& QPolynomial::operator+=(const QPolynomial& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), mpz_class(0));
  for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
  trim();
  return *this;
}

QPolynomial QPolynomial::operator*(const QPolynomial& o) const {
  if (is_zero() || o.is_zero()) return QPolynomial();
  std::vector<mpz_class> r(c_.size() + o.c_.size() - 1, mpz_class(0));
  for (std::size_t i = 0; i < c_.size(); ++i)
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return QPolynomial(std::move(r));
}

mpq_class QPolynomial::evaluate(const mpq_class& q) const {
  mpq_class r(0);
  for (std::size_t k = c_.size(); k-- > 0;) {
    r *= q;
    r += c_[k];
  }
  r.canonicalize();
  return r;
}

double QPolynomial::evaluate(double q) const {
  double r = 0.0;
  for (std::size_t k = c_.size(); k-- > 0;) r = r * q + c_[k].get_d();
  return r;
}

mpz_class QPolynomial::sum_coefficients() const {
  mpz_class s(0);
  for (const auto& c : c_) s += c;
  return s;
}

std::vector<std::string> QPolynomial::to_decimal_strings() const {
  std::vector<std::string> out;
  out.reserve(c_.size());
  for (const auto& c : c_) out.push_back(c.get_str());
  return out;
}

QPolynomial normalizer_polynomial(int n) {
  if (n < 0) throw std::invalid_argument("normalizer_polynomial: n must be nonnegative");
  QPolynomial r = QPolynomial::one();
  for (int k = 2; k <= n; ++k) {
    std::vector<mpz_class> ones(static_cast<std::size_t>(k), mpz_class(1));
    r = r * QPolynomial(std::move(ones));
  }
  return r;
}

mpq_class mpq_pow(const mpq_class& q, unsigned long k) {
  mpq_class r;
  mpz_pow_ui(r.get_num_mpz_t(), q.get_num_mpz_t(), k);
  mpz_pow_ui(r.get_den_mpz_t(), q.get_den_mpz_t(), k);
  r.canonicalize();
  return r;
}

mpq_class mpq_from_decimal(const std::string& text) {
  std::size_t i = 0;
  bool negative = false;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) negative = text[i++] == '-';
  mpz_class digits(0);
  long frac_digits = 0, exponent = 0;
  bool seen_digit = false, seen_dot = false;
  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (ch >= '0' && ch <= '9') {
      digits = digits * 10 + (ch - '0');
      if (seen_dot) ++frac_digits;
      seen_digit = true;
    } else if (ch == '.' && !seen_dot) {
      seen_dot = true;
    } else if ((ch == 'e' || ch == 'E') && seen_digit) {
      exponent = std::stol(text.substr(i + 1));
      i = text.size() - 1;
    } else {
      throw std::invalid_argument("not a decimal literal: " + text);
    }
  }
  if (!seen_digit) throw std::invalid_argument("not a decimal literal: " + text);
  mpq_class r(negative ? -digits : digits);
  const long net = exponent - frac_digits;
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(net < 0 ? -net : net));
  if (net < 0)
    r /= pow10;
  else
    r *= pow10;
  r.canonicalize();
  return r;
}

mpq_class mpq_from_double_decimal(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  std::string s = os.str();
  // prefer the shortest representation that still round-trips
  for (int prec = 1; prec < 17; ++prec) {
    std::ostringstream shorter;
    shorter << std::setprecision(prec) << v;
    if (std::stod(shorter.str()) == v) {
      s = shorter.str();
      break;
    }
  }
  return mpq_from_decimal(s);
}

mpz_class catalan_number(int n) {
  if (n < 0) throw std::invalid_argument("catalan_number: n must be nonnegative");
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), 2ul * static_cast<unsigned long>(n),
               static_cast<unsigned long>(n));
  return b / (n + 1);
}

mpz_class factorial_mpz(int n) {
  if (n < 0) throw std::invalid_argument("factorial_mpz: n must be nonnegative");
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

double log_mpz(const mpz_class& z) {
  if (z <= 0) throw std::domain_error("log_mpz: argument must be positive");
  signed long exp = 0;
  const double d = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log(d) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace mallows
