#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace mallows {

/**
 * Nonnegative real stored as its natural logarithm, with an explicit zero
 * (log value -inf). Keeps long products and convolution sums of tiny
 * probabilities out of the underflow range of plain doubles. Round-trips
 * to linear scale with relative error on the order of |log x| ulps.
 */
class LogReal {
public:
  LogReal() : lg_(-kInf) {}  // zero

  static LogReal zero() { return LogReal(); }
  static LogReal one() { return from_log(0.0); }
  static LogReal from_log(double lg) {
    LogReal r;
    r.lg_ = lg;
    return r;
  }
  static LogReal from_linear(double x) {
    return x > 0.0 ? from_log(std::log(x)) : zero();
  }

  bool is_zero() const { return lg_ == -kInf; }
  double log() const { return lg_; }
  double value() const { return std::exp(lg_); }

  LogReal operator*(LogReal o) const {
    if (is_zero() || o.is_zero()) return zero();
    return from_log(lg_ + o.lg_);
  }
  LogReal operator/(LogReal o) const { return from_log(lg_ - o.lg_); }

  // log(a+b) = max + log1p(exp(min-max))
  LogReal operator+(LogReal o) const {
    if (is_zero()) return o;
    if (o.is_zero()) return *this;
    const double hi = lg_ > o.lg_ ? lg_ : o.lg_;
    const double lo = lg_ > o.lg_ ? o.lg_ : lg_;
    return from_log(hi + std::log1p(std::exp(lo - hi)));
  }
  LogReal& operator+=(LogReal o) { return *this = *this + o; }
  LogReal& operator*=(LogReal o) { return *this = *this * o; }

  /// value^e (e may be fractional, e.g. 1/n roots).
  LogReal pow(double e) const {
    if (is_zero()) return zero();
    return from_log(lg_ * e);
  }

  auto operator<=>(const LogReal& o) const { return lg_ <=> o.lg_; }
  bool operator==(const LogReal& o) const { return lg_ == o.lg_; }

private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double lg_;
};

}  // namespace mallows
