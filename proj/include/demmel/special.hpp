#pragma once

#include "demmel/error.hpp"
#include "demmel/poly.hpp"
#include "demmel/precision.hpp"
#include "demmel/signed_log.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

namespace demmel {

template <class Real>
Real log_gamma(const Real& x) {
  if (!(x > 0)) throw DomainError("log_gamma: argument must be positive");
  return boost::math::lgamma(x);
}

// ln k! for nonnegative integer k.
template <class Real = double>
Real log_factorial(int k) {
  require(k >= 0, "log_factorial: negative argument");
  return k < 2 ? Real(0) : log_gamma(Real(k + 1));
}

// Rising factorial (a)_j = a (a+1) ... (a+j-1).
template <class Real>
SignedLog<Real> pochhammer(const Real& a, int j) {
  using std::abs;
  using std::log;
  require(j >= 0, "pochhammer: j must be nonnegative");
  SignedLog<Real> r = SignedLog<Real>::one();
  for (int i = 0; i < j; ++i) {
    const Real f = a + i;
    if (f == 0) return SignedLog<Real>::zero();
    if (f < 0) r.sign = -r.sign;
    r.logmag += log(abs(f));
  }
  return r;
}

// Stirling number of the second kind S(p, q): partitions of a p-set into q
// nonempty blocks. Exact.
std::uint64_t stirling2(int p, int q);

std::uint64_t binomial(int n, int k);

// Monomial coefficients of the generalized Laguerre polynomial L_N^(rho).
template <class Real = double>
Poly<Real> laguerre_coeffs(int N, int rho) {
  require(N >= 0, "laguerre: degree must be nonnegative");
  require(rho > -1, "laguerre: rho must exceed -1");
  using std::log;
  std::vector<SignedLog<Real>> c(static_cast<std::size_t>(N) + 1);
  // c_0 = (rho+1)_N / N!
  SignedLog<Real> cur = pochhammer(Real(rho + 1), N);
  cur.logmag -= log_factorial<Real>(N);
  c[0] = cur;
  for (int j = 0; j < N; ++j) {
    // c_{j+1} / c_j = (j - N) / ((rho + 1 + j)(j + 1))
    cur.sign = -cur.sign;
    cur.logmag += log(Real(N - j)) - log(Real(rho + 1 + j)) - log(Real(j + 1));
    c[static_cast<std::size_t>(j) + 1] = cur;
  }
  return Poly<Real>(std::move(c));
}

// L_N^(rho)(z) from the terminating 1F1 sum. Alternating sums (z > 0) that
// cancel beyond 1e4 in double are redone in extended precision.
template <class Real>
SignedLog<Real> laguerre_eval(int N, int rho, const Real& z) {
  const Poly<Real> p = laguerre_coeffs<Real>(N, rho);
  if constexpr (std::is_same_v<Real, double>) {
    if (z > 0) {
      const SignedLog<double> lz = SignedLog<double>::from_real(z);
      LogSum<double> acc;
      SignedLog<double> power = SignedLog<double>::one();
      for (int d = 0; d <= p.degree(); ++d) {
        acc.add(p[d] * power);
        power *= lz;
      }
      if (acc.cancellation() <= 1e4) return acc.value();
      const Extended x(z);
      Extended prev(1);
      Extended cur = Extended(1 + rho) - x;
      if (N == 0) cur = prev;
      for (int k = 1; k < N; ++k) {
        const Extended next = ((Extended(2 * k + 1 + rho) - x) * cur - Extended(k + rho) * prev) / (k + 1);
        prev = cur;
        cur = next;
      }
      const SignedLog<Extended> v = SignedLog<Extended>::from_real(cur);
      return {v.sign, static_cast<double>(v.logmag)};
    }
  }
  return p.evaluate(z);
}

// log of I_order(z) (modified Bessel, first kind) by its power series. Terms
// follow the ratio recurrence on a rescaled linear scale, so the relative
// error grows like sqrt(terms) * eps rather than with the size of the logs.
template <class Real>
SignedLog<Real> bessel_i_log(int order, const Real& z) {
  using std::log;
  require(order >= 0, "bessel_i: order must be nonnegative");
  require(z >= 0, "bessel_i: argument must be nonnegative");
  if (z == 0) return order == 0 ? SignedLog<Real>::one() : SignedLog<Real>::zero();
  const Real q = z * z / 4;
  Real scale = order * log(z / 2) - log_factorial<Real>(order);
  Real term = 1;
  Real sum = 0;
  const Real big = Real(1e150);
  const double peak = static_cast<double>(z / 2);
  for (int k = 0; k < 1000000; ++k) {
    sum += term;
    if (k > peak && term < epsilon_of<Real>() * sum / 8) return {1, Real(scale + log(sum))};
    term *= q / (Real(k + 1) * Real(order + k + 1));
    if (term > big) {
      term /= big;
      sum /= big;
      scale += log(big);
    }
  }
  throw ConvergenceError("bessel_i: series did not converge");
}

double bessel_i(int order, double z);

// Generalized hypergeometric pFq by direct summation with term-ratio
// stopping, in log form so that large arguments do not overflow.
template <class Real>
SignedLog<Real> pfq_log(std::span<const Real> a, std::span<const Real> b, const Real& z,
                        int max_terms = 200000) {
  using std::abs;
  using std::floor;
  using std::log;
  for (const Real& bj : b) {
    if (bj <= 0 && floor(bj) == bj) {
      throw DomainError("pfq: lower parameter is a nonpositive integer");
    }
  }
  bool terminating = false;
  for (const Real& ai : a) terminating = terminating || (ai <= 0 && floor(ai) == ai);
  const auto p = a.size();
  const auto q = b.size();
  if (!terminating && z != 0) {
    if (p > q + 1) throw DomainError("pfq: divergent series (p > q + 1)");
    if (p == q + 1 && !(abs(z) < 1)) throw DomainError("pfq: |z| >= 1 with p = q + 1");
  }
  LogSum<Real> acc;
  SignedLog<Real> term = SignedLog<Real>::one();
  const SignedLog<Real> lz = SignedLog<Real>::from_real(z);
  const Real tiny = log(epsilon_of<Real>()) - 2;
  for (int k = 0; k < max_terms; ++k) {
    acc.add(term);
    if (z == 0) return acc.value();
    SignedLog<Real> ratio = lz;
    for (const Real& ai : a) ratio *= SignedLog<Real>::from_real(ai + k);
    for (const Real& bj : b) ratio /= SignedLog<Real>::from_real(bj + k);
    ratio.logmag -= log(Real(k + 1));
    if (ratio.is_zero()) return acc.value();
    term *= ratio;
    const SignedLog<Real> total = acc.abs_value();
    if (ratio.logmag < log(Real(0.5)) && term.logmag - total.logmag < tiny) {
      acc.add(term);
      return acc.value();
    }
  }
  throw ConvergenceError("pfq: no convergence within " + std::to_string(max_terms) + " terms");
}

template <class Real>
Real pfq(std::span<const Real> a, std::span<const Real> b, const Real& z, int max_terms = 200000) {
  return pfq_log(a, b, z, max_terms).to_real();
}

inline double pfq(std::initializer_list<double> a, std::initializer_list<double> b, double z) {
  const std::vector<double> av(a), bv(b);
  return pfq<double>(av, bv, z);
}

}  // namespace demmel
