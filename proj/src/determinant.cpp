#include "demmel/determinant.hpp"

#include <string>

namespace demmel {

BigInt vandermonde_exact(std::span<const std::int64_t> xs) {
  require(!xs.empty(), "vandermonde: need at least one entry");
  BigInt r = 1;
  for (std::size_t k = 1; k < xs.size(); ++k) {
    for (std::size_t l = 0; l < k; ++l) r *= BigInt(xs[k] - xs[l]);
  }
  return r;
}

BigInt det_exact(BigIntMatrix a) {
  require(a.rows() == a.cols(), "det_exact: matrix must be square");
  const Eigen::Index n = a.rows();
  if (n == 0) return 1;
  int sign = 1;
  BigInt prev = 1;
  for (Eigen::Index k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      Eigen::Index swap = -1;
      for (Eigen::Index i = k + 1; i < n; ++i) {
        if (a(i, k) != 0) {
          swap = i;
          break;
        }
      }
      if (swap < 0) return 0;
      a.row(swap).swap(a.row(k));
      sign = -sign;
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      for (Eigen::Index j = k + 1; j < n; ++j) {
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      }
      a(i, k) = 0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

IndexVector::IndexVector(std::vector<int> bounds)
    : entries_(bounds.size(), 0), bounds_(std::move(bounds)) {
  for (int b : bounds_) require(b >= 0, "IndexVector: bounds must be nonnegative");
}

IndexVector::IndexVector(std::vector<int> entries, std::vector<int> bounds)
    : entries_(std::move(entries)), bounds_(std::move(bounds)) {
  require(entries_.size() == bounds_.size(), "IndexVector: entries/bounds size mismatch");
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i] < 0 || entries_[i] > bounds_[i]) {
      throw DomainError("IndexVector: entry " + std::to_string(i + 1) + " = " +
                        std::to_string(entries_[i]) + " outside [0, " + std::to_string(bounds_[i]) +
                        "]");
    }
  }
}

int IndexVector::sum() const {
  int s = 0;
  for (int e : entries_) s += e;
  return s;
}

bool IndexVector::next() {
  for (std::size_t i = entries_.size(); i-- > 0;) {
    if (entries_[i] < bounds_[i]) {
      ++entries_[i];
      return true;
    }
    entries_[i] = 0;
  }
  return false;
}

std::uint64_t IndexVector::count() const {
  std::uint64_t c = 1;
  for (int b : bounds_) c *= static_cast<std::uint64_t>(b) + 1;
  return c;
}

std::vector<int> shifted_factorial_bounds(int n, int alpha) {
  require(n >= 1 && alpha >= 1, "shifted factorial identity needs n >= 1 and alpha >= 1");
  std::vector<int> b(static_cast<std::size_t>(alpha));
  for (int l = 1; l <= alpha; ++l) b[static_cast<std::size_t>(l - 1)] = n + alpha - 1 - l;
  return b;
}

namespace {

BigInt falling(std::int64_t x, int count) {
  BigInt r = 1;
  for (int i = 0; i < count; ++i) r *= BigInt(x - i);
  return r;
}

void check_against(const IndexVector& v, const std::vector<int>& bounds, const char* what) {
  require(v.size() == bounds.size(), std::string(what) + ": wrong index length");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (v[i] < 0 || v[i] > bounds[i]) {
      throw DomainError(std::string(what) + ": index " + std::to_string(i + 1) +
                        " out of bounds");
    }
  }
}

}  // namespace

BigInt shifted_factorial_lhs(const IndexVector& j, int n, int alpha) {
  check_against(j, shifted_factorial_bounds(n, alpha), "shifted_factorial_lhs");
  BigIntMatrix m(alpha, alpha);
  for (int l = 1; l <= alpha; ++l) {
    const std::int64_t ct = n + alpha - 1 - j[static_cast<std::size_t>(l - 1)] - l;
    for (int k = 1; k <= alpha; ++k) m(k - 1, l - 1) = falling(ct, alpha - k);
  }
  return det_exact(std::move(m));
}

BigInt shifted_factorial_rhs(const IndexVector& j) {
  std::vector<std::int64_t> c(j.size());
  for (std::size_t l = 0; l < j.size(); ++l) c[l] = static_cast<std::int64_t>(l + 1) + j[l];
  return vandermonde_exact(c);
}

std::vector<int> mixed_power_bounds(int n, int alpha) {
  require(n >= 2 && alpha >= 0, "mixed power identity needs n >= 2 and alpha >= 0");
  std::vector<int> b(static_cast<std::size_t>(alpha) + 2);
  b[0] = n + alpha - 1;
  b[1] = n + alpha - 2;
  for (int k = 3; k <= alpha + 2; ++k) b[static_cast<std::size_t>(k - 1)] = n + alpha + 2 - k;
  return b;
}

namespace {

std::vector<std::int64_t> mixed_power_nodes(const IndexVector& l) {
  // z_j = j + l_j for j = 1, 2; w_k = k + l_k - 2 for k >= 3.
  std::vector<std::int64_t> w(l.size());
  for (std::size_t i = 0; i < l.size(); ++i) {
    const auto col = static_cast<std::int64_t>(i + 1);
    w[i] = (col <= 2 ? col : col - 2) + l[i];
  }
  return w;
}

}  // namespace

BigInt mixed_power_lhs(const IndexVector& l, int n, int alpha) {
  check_against(l, mixed_power_bounds(n, alpha), "mixed_power_lhs");
  const int size = alpha + 2;
  const auto nodes = mixed_power_nodes(l);
  BigIntMatrix m(size, size);
  for (int c = 0; c < size; ++c) {
    const std::int64_t shifted = n + alpha - nodes[static_cast<std::size_t>(c)];
    for (int i = 1; i <= size; ++i) m(i - 1, c) = falling(shifted, alpha + 2 - i);
  }
  return det_exact(std::move(m));
}

BigInt mixed_power_rhs(const IndexVector& l) { return vandermonde_exact(mixed_power_nodes(l)); }

}  // namespace demmel
