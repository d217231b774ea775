#pragma once

#include "demmel/error.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <limits>

namespace demmel {

// A real number stored as sign * exp(logmag). Carries magnitudes such as
// Gamma(2500) that are far outside the double exponent range.
template <class Real = double>
struct SignedLog {
  int sign = 0;  // -1, 0, +1; zero ignores logmag
  Real logmag = 0;

  static SignedLog zero() { return {}; }
  static SignedLog one() { return {1, Real(0)}; }
  static SignedLog from_log(int sign, const Real& logmag) {
    if (sign == 0) return {};
    return {sign > 0 ? 1 : -1, logmag};
  }
  static SignedLog from_real(const Real& x) {
    using std::abs;
    using std::log;
    if (x == 0) return {};
    return {x > 0 ? 1 : -1, Real(log(abs(x)))};
  }

  bool is_zero() const { return sign == 0; }

  Real to_real() const {
    using std::exp;
    if (sign == 0) return Real(0);
    return sign > 0 ? Real(exp(logmag)) : Real(-exp(logmag));
  }

  template <class Other>
  SignedLog<Other> cast() const {
    return {sign, static_cast<Other>(logmag)};
  }

  SignedLog operator-() const { return {-sign, logmag}; }

  SignedLog& operator*=(const SignedLog& o) {
    sign *= o.sign;
    logmag = sign == 0 ? Real(0) : Real(logmag + o.logmag);
    return *this;
  }
  SignedLog& operator/=(const SignedLog& o) {
    if (o.sign == 0) throw DomainError("SignedLog: division by zero");
    sign *= o.sign;
    logmag = sign == 0 ? Real(0) : Real(logmag - o.logmag);
    return *this;
  }
  SignedLog& operator+=(const SignedLog& o) {
    using std::exp;
    using std::log1p;
    if (o.sign == 0) return *this;
    if (sign == 0) return *this = o;
    const bool self_big = logmag >= o.logmag;
    const SignedLog& big = self_big ? *this : o;
    const SignedLog& small = self_big ? o : *this;
    const Real ratio = exp(small.logmag - big.logmag);
    if (big.sign == small.sign) {
      *this = {big.sign, Real(big.logmag + log1p(ratio))};
    } else if (ratio == 1) {
      *this = {};
    } else {
      *this = {big.sign, Real(big.logmag + log1p(-ratio))};
    }
    return *this;
  }
  SignedLog& operator-=(const SignedLog& o) { return *this += -o; }

  friend SignedLog operator*(SignedLog a, const SignedLog& b) { return a *= b; }
  friend SignedLog operator/(SignedLog a, const SignedLog& b) { return a /= b; }
  friend SignedLog operator+(SignedLog a, const SignedLog& b) { return a += b; }
  friend SignedLog operator-(SignedLog a, const SignedLog& b) { return a -= b; }
};

template <class Real>
SignedLog<Real> pow(const SignedLog<Real>& x, int k) {
  if (k == 0) return SignedLog<Real>::one();
  if (x.sign == 0) {
    if (k < 0) throw DomainError("SignedLog: zero to a negative power");
    return {};
  }
  const int sign = (x.sign < 0 && (k % 2 != 0)) ? -1 : 1;
  return {sign, Real(x.logmag * k)};
}

// Compensated accumulator for sums of SignedLog terms. Terms are rescaled
// against the running largest magnitude and added with Neumaier's scheme;
// the running absolute sum gives the cancellation factor of the result.
template <class Real = double>
class LogSum {
 public:
  void add(const SignedLog<Real>& t) {
    using std::abs;
    using std::exp;
    if (t.sign == 0) return;
    if (!started_ || t.logmag > ref_) {
      if (started_) {
        const Real factor = exp(ref_ - t.logmag);
        sum_ *= factor;
        comp_ *= factor;
        abs_ *= factor;
      }
      ref_ = t.logmag;
      started_ = true;
    }
    const Real v = t.sign > 0 ? Real(exp(t.logmag - ref_)) : Real(-exp(t.logmag - ref_));
    const Real s = sum_ + v;
    if (abs(sum_) >= abs(v)) {
      comp_ += (sum_ - s) + v;
    } else {
      comp_ += (v - s) + sum_;
    }
    sum_ = s;
    abs_ += abs(v);
  }

  LogSum& operator+=(const SignedLog<Real>& t) {
    add(t);
    return *this;
  }

  SignedLog<Real> value() const {
    using std::log;
    if (!started_) return {};
    const Real total = sum_ + comp_;
    if (total == 0) return {};
    SignedLog<Real> r = SignedLog<Real>::from_real(total);
    r.logmag += ref_;
    return r;
  }

  // sum|t| / |sum t|; 1 for same-sign terms, +inf for an exact zero.
  Real cancellation() const {
    using std::abs;
    if (!started_) return Real(1);
    const Real total = abs(sum_ + comp_);
    if (total == 0) return std::numeric_limits<Real>::infinity();
    return abs_ / total;
  }

  SignedLog<Real> abs_value() const {
    using std::log;
    if (!started_ || abs_ == 0) return {};
    return {1, Real(ref_ + log(abs_))};
  }

 private:
  bool started_ = false;
  Real ref_ = 0;
  Real sum_ = 0;
  Real comp_ = 0;
  Real abs_ = 0;
};

}  // namespace demmel
