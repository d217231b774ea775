#pragma once

#include "demmel/error.hpp"
#include "demmel/signed_log.hpp"

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace demmel {

using BigInt = boost::multiprecision::cpp_int;

template <class Real>
using MatrixX = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

using BigIntMatrix = MatrixX<BigInt>;

// prod_{l<k} (x_k - x_l); 1 for a single entry.
template <class Real>
SignedLog<Real> vandermonde(std::span<const Real> xs) {
  require(!xs.empty(), "vandermonde: need at least one entry");
  SignedLog<Real> r = SignedLog<Real>::one();
  for (std::size_t k = 1; k < xs.size(); ++k) {
    for (std::size_t l = 0; l < k; ++l) r *= SignedLog<Real>::from_real(xs[k] - xs[l]);
  }
  return r;
}

// Same product as a plain number; exact for small integer nodes.
template <class Real>
Real vandermonde_value(std::span<const Real> xs) {
  Real r = 1;
  for (std::size_t k = 1; k < xs.size(); ++k) {
    for (std::size_t l = 0; l < k; ++l) r *= xs[k] - xs[l];
  }
  return r;
}

BigInt vandermonde_exact(std::span<const std::int64_t> xs);

// Determinant by Gaussian elimination with partial pivoting. The empty
// matrix has determinant 1; a singular matrix returns zero.
template <class Real>
SignedLog<Real> det_general(MatrixX<Real> a) {
  using std::abs;
  using std::log;
  require(a.rows() == a.cols(), "det_general: matrix must be square");
  const Eigen::Index n = a.rows();
  SignedLog<Real> r = SignedLog<Real>::one();
  for (Eigen::Index col = 0; col < n; ++col) {
    Eigen::Index piv = col;
    Real best = abs(a(col, col));
    for (Eigen::Index i = col + 1; i < n; ++i) {
      if (abs(a(i, col)) > best) {
        best = abs(a(i, col));
        piv = i;
      }
    }
    if (best == 0) return SignedLog<Real>::zero();
    if (piv != col) {
      a.row(piv).swap(a.row(col));
      r.sign = -r.sign;
    }
    const Real p = a(col, col);
    if (p < 0) r.sign = -r.sign;
    r.logmag += log(abs(p));
    for (Eigen::Index i = col + 1; i < n; ++i) {
      const Real f = a(i, col) / p;
      if (f == 0) continue;
      for (Eigen::Index j = col + 1; j < n; ++j) a(i, j) -= f * a(col, j);
    }
  }
  return r;
}

// Fraction-free (Bareiss) elimination; exact for integer matrices.
BigInt det_exact(BigIntMatrix a);

// Multi-index with per-entry inclusive upper bounds, iterated odometer style.
class IndexVector {
 public:
  IndexVector() = default;
  explicit IndexVector(std::vector<int> bounds);
  IndexVector(std::vector<int> entries, std::vector<int> bounds);

  const std::vector<int>& entries() const { return entries_; }
  const std::vector<int>& bounds() const { return bounds_; }
  std::size_t size() const { return entries_.size(); }
  int operator[](std::size_t i) const { return entries_[i]; }
  int sum() const;

  // Advances to the next lattice point; false after the last one (the
  // index then wraps to all zeros).
  bool next();

  // Number of lattice points, prod (bound + 1).
  std::uint64_t count() const;

  template <class Rng>
  static IndexVector random(const std::vector<int>& bounds, Rng& rng) {
    std::vector<int> e(bounds.size());
    for (std::size_t i = 0; i < bounds.size(); ++i) {
      e[i] = std::uniform_int_distribution<int>(0, bounds[i])(rng);
    }
    return IndexVector(std::move(e), bounds);
  }

 private:
  std::vector<int> entries_;
  std::vector<int> bounds_;
};

// Bounds j_l <= n + alpha - 1 - l, l = 1..alpha, of the kappa_D nested sum.
std::vector<int> shifted_factorial_bounds(int n, int alpha);

// det[ prod_{i=0}^{alpha-k-1} (ct_l - i) ]_{k,l=1..alpha} with
// ct_l = n + alpha - 1 - j_l - l.
BigInt shifted_factorial_lhs(const IndexVector& j, int n, int alpha);

// Delta_alpha(c) with c_l = l + j_l.
BigInt shifted_factorial_rhs(const IndexVector& j);

// Bounds l_j <= n + alpha - j (j = 1, 2), l_k <= n + alpha + 2 - k (k >= 3).
std::vector<int> mixed_power_bounds(int n, int alpha);

// (alpha+2)-square determinant of falling products in zt_j = n + alpha - z_j
// and wt_k = n + alpha - w_k, z_j = j + l_j, w_k = k + l_k - 2.
BigInt mixed_power_lhs(const IndexVector& l, int n, int alpha);

// Delta_{alpha+2}(z_1, z_2, w_3, ..., w_{alpha+2}).
BigInt mixed_power_rhs(const IndexVector& l);

}  // namespace demmel
