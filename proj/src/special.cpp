#include "demmel/special.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <limits>

namespace demmel {

namespace {

using boost::multiprecision::cpp_int;

cpp_int binomial_big(int n, int k) {
  cpp_int r = 1;
  for (int i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

std::uint64_t narrow(const cpp_int& v, const char* what) {
  if (v < 0 || v > std::numeric_limits<std::uint64_t>::max()) {
    throw OverflowError(std::string(what) + ": result exceeds 64 bits");
  }
  return static_cast<std::uint64_t>(v);
}

}  // namespace

std::uint64_t stirling2(int p, int q) {
  require(p >= 0 && q >= 0, "stirling2: arguments must be nonnegative");
  require(q <= p, "stirling2: q must not exceed p");
  // S(p, q) = (1/q!) sum_j (-1)^(q-j) C(q, j) j^p
  cpp_int sum = 0;
  for (int j = 0; j <= q; ++j) {
    cpp_int term = binomial_big(q, j) * boost::multiprecision::pow(cpp_int(j), static_cast<unsigned>(p));
    if ((q - j) % 2 == 0) {
      sum += term;
    } else {
      sum -= term;
    }
  }
  cpp_int qfact = 1;
  for (int i = 2; i <= q; ++i) qfact *= i;
  return narrow(sum / qfact, "stirling2");
}

std::uint64_t binomial(int n, int k) {
  require(n >= 0, "binomial: n must be nonnegative");
  if (k < 0 || k > n) return 0;
  return narrow(binomial_big(n, k), "binomial");
}

double bessel_i(int order, double z) {
  const SignedLog<double> r = bessel_i_log(order, z);
  if (r.sign != 0 && r.logmag > std::log(std::numeric_limits<double>::max())) {
    throw OverflowError("bessel_i: result exceeds the double range");
  }
  return r.to_real();
}

}  // namespace demmel
