#pragma once

#include "demmel/signed_log.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace demmel {

// Dense univariate polynomial, coefficient d multiplies x^d.
template <class Real = double>
class Poly {
 public:
  using Coeff = SignedLog<Real>;

  Poly() = default;
  explicit Poly(std::vector<Coeff> coeffs) : c_(std::move(coeffs)) { trim(); }

  static Poly constant(const Coeff& c) { return Poly(std::vector<Coeff>{c}); }
  static Poly monomial(int degree, const Coeff& c = Coeff::one()) {
    std::vector<Coeff> v(static_cast<std::size_t>(degree) + 1);
    v.back() = c;
    return Poly(std::move(v));
  }

  const std::vector<Coeff>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }

  Coeff operator[](int d) const {
    if (d < 0 || d > degree()) return Coeff::zero();
    return c_[static_cast<std::size_t>(d)];
  }

  // p(c x): coefficient d picks up c^d.
  Poly scaled_argument(const Real& c) const {
    const Coeff lc = Coeff::from_real(c);
    std::vector<Coeff> out(c_.size());
    Coeff power = Coeff::one();
    for (std::size_t d = 0; d < c_.size(); ++d) {
      out[d] = c_[d] * power;
      power *= lc;
    }
    return Poly(std::move(out));
  }

  Poly scaled(const Coeff& factor) const {
    std::vector<Coeff> out(c_);
    for (auto& x : out) x *= factor;
    return Poly(std::move(out));
  }

  Poly truncated(int max_degree) const {
    if (max_degree >= degree()) return *this;
    if (max_degree < 0) return {};
    return Poly(std::vector<Coeff>(c_.begin(), c_.begin() + max_degree + 1));
  }

  Coeff evaluate(const Real& x) const {
    const Coeff lx = Coeff::from_real(x);
    LogSum<Real> acc;
    Coeff power = Coeff::one();
    for (const auto& c : c_) {
      acc.add(c * power);
      power *= lx;
    }
    return acc.value();
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Coeff> out(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t d = 0; d < out.size(); ++d) out[d] = a[int(d)] + b[int(d)];
    return Poly(std::move(out));
  }

  friend Poly operator-(const Poly& a) { return a.scaled({-1, Real(0)}); }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    const int deg = a.degree() + b.degree();
    std::vector<Coeff> out(static_cast<std::size_t>(deg) + 1);
    for (int d = 0; d <= deg; ++d) {
      LogSum<Real> acc;
      const int lo = std::max(0, d - b.degree());
      const int hi = std::min(d, a.degree());
      for (int i = lo; i <= hi; ++i) acc.add(a.c_[i] * b.c_[d - i]);
      out[d] = acc.value();
    }
    return Poly(std::move(out));
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  std::vector<Coeff> c_;
};

// Determinant of a small square matrix of polynomials by cofactor expansion
// along the first column. Row-major, size*size entries.
template <class Real>
Poly<Real> poly_determinant(const std::vector<Poly<Real>>& entries, int size) {
  if (size == 0) return Poly<Real>::constant(SignedLog<Real>::one());
  if (size == 1) return entries[0];
  Poly<Real> acc;
  std::vector<Poly<Real>> minor(static_cast<std::size_t>((size - 1) * (size - 1)));
  for (int r = 0; r < size; ++r) {
    const Poly<Real>& pivot = entries[static_cast<std::size_t>(r * size)];
    if (pivot.is_zero()) continue;
    int mr = 0;
    for (int i = 0; i < size; ++i) {
      if (i == r) continue;
      for (int j = 1; j < size; ++j) {
        minor[static_cast<std::size_t>(mr * (size - 1) + j - 1)] =
            entries[static_cast<std::size_t>(i * size + j)];
      }
      ++mr;
    }
    Poly<Real> term = pivot * poly_determinant(minor, size - 1);
    acc = (r % 2 == 0) ? acc + term : acc - term;
  }
  return acc;
}

}  // namespace demmel
