#include "demmel/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <numbers>
#include <string>
#include <thread>

namespace demmel {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

// Spectra here stay far from the overflow range, so the plain formula is
// safe and much cheaper than std::hypot.
inline double norm2(double a, double b) { return std::sqrt(a * a + b * b); }

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = std::uint64_t(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

NormalStream::NormalStream(std::uint64_t seed, std::uint64_t index)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, index_(index) {}

void NormalStream::refill() {
  buf_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                     static_cast<std::uint32_t>(index_), static_cast<std::uint32_t>(index_ >> 32)},
                    key_);
  ++block_;
  used_ = 0;
}

double NormalStream::uniform() {
  if (used_ > 2) refill();
  const std::uint64_t bits = (std::uint64_t(buf_[used_]) << 32) | buf_[used_ + 1];
  used_ += 2;
  return (double(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::complex<double> NormalStream::complex_normal() {
  // Box-Muller with radius sqrt(-ln u): each component has variance 1/2.
  const double r = std::sqrt(-std::log(uniform()));
  const double theta = 2.0 * std::numbers::pi * uniform();
  return {r * std::cos(theta), r * std::sin(theta)};
}

ComplexMatrix sample_matrix(const Dims& dims, NormalStream& stream) {
  ComplexMatrix a(dims.m(), dims.n);
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = stream.complex_normal();
  }
  return a;
}

HermitianEigen hermitian_eigen(const ComplexMatrix& h, bool want_vectors) {
  require(h.rows() == h.cols(), "hermitian_eigen: matrix must be square");
  const Eigen::Index n = h.rows();
  ComplexMatrix a = h;
  ComplexMatrix q;
  if (want_vectors) q = ComplexMatrix::Identity(n, n);

  using CVec = Eigen::VectorXcd;
  for (Eigen::Index k = 0; k + 2 < n; ++k) {
    const Eigen::Index len = n - k - 1;
    CVec v = a.col(k).segment(k + 1, len);
    const double xnorm = v.norm();
    if (xnorm == 0.0) continue;
    const std::complex<double> x0 = v(0);
    const std::complex<double> phase = std::abs(x0) > 0 ? x0 / std::abs(x0) : std::complex<double>(1.0);
    const std::complex<double> beta = -phase * xnorm;
    v(0) -= beta;
    const double vnorm = v.norm();
    if (vnorm == 0.0) continue;
    v /= vnorm;
    auto b = a.block(k + 1, k + 1, len, len);
    CVec p = 2.0 * (b.selfadjointView<Eigen::Lower>() * v);
    const std::complex<double> vp = v.dot(p);
    p -= vp * v;
    b.selfadjointView<Eigen::Lower>().rankUpdate(v, p, -1.0);
    a.col(k).segment(k + 1, len).setZero();
    a(k + 1, k) = beta;
    if (want_vectors) {
      auto qb = q.rightCols(len);
      const CVec qv = qb * v;
      qb.noalias() -= 2.0 * qv * v.adjoint();
    }
  }

  // Diagonal phase similarity makes the off-diagonal real and nonnegative.
  Eigen::VectorXd d(n), e = Eigen::VectorXd::Zero(n);
  std::vector<std::complex<double>> phase(static_cast<std::size_t>(n), 1.0);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i) = a(i, i).real();
    if (i + 1 < n) {
      const std::complex<double> t = a(i + 1, i);
      e(i) = std::abs(t);
      const std::size_t u = static_cast<std::size_t>(i);
      phase[u + 1] = e(i) > 0 ? phase[u] * t / e(i) : phase[u];
    }
  }

  Eigen::MatrixXd z;
  if (want_vectors) z = Eigen::MatrixXd::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();
  for (Eigen::Index l = 0; l < n; ++l) {
    int iter = 0;
    Eigen::Index m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d(m)) + std::abs(d(m + 1));
        if (std::abs(e(m)) <= eps * dd) break;
      }
      if (m == l) break;
      if (iter++ == 60) throw ConvergenceError("hermitian_eigen: no convergence for eigenvalue " + std::to_string(l));
      double g = (d(l + 1) - d(l)) / (2.0 * e(l));
      double r = norm2(g, 1.0);
      g = d(m) - d(l) + e(l) / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      Eigen::Index i;
      bool underflow = false;
      for (i = m - 1; i >= l; --i) {
        double f = s * e(i);
        const double b = c * e(i);
        r = norm2(f, g);
        e(i + 1) = r;
        if (r == 0.0) {
          d(i + 1) -= p;
          e(m) = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d(i + 1) - p;
        r = (d(i) - g) * s + 2.0 * c * b;
        p = s * r;
        d(i + 1) = g + p;
        g = c * r - b;
        if (want_vectors) {
          for (Eigen::Index k = 0; k < n; ++k) {
            f = z(k, i + 1);
            z(k, i + 1) = s * z(k, i) + c * f;
            z(k, i) = c * z(k, i) - s * f;
          }
        }
      }
      if (underflow) continue;
      d(l) -= p;
      e(l) = g;
      e(m) = 0.0;
    } while (m != l);
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) { return d(x) < d(y); });
  HermitianEigen out;
  out.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) out.values(i) = d(order[static_cast<std::size_t>(i)]);
  if (want_vectors) {
    ComplexMatrix y(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::Index src = order[static_cast<std::size_t>(j)];
      for (Eigen::Index i = 0; i < n; ++i) y(i, j) = phase[static_cast<std::size_t>(i)] * z(i, src);
    }
    out.vectors = q * y;
  }
  return out;
}

EigenSpectrum gram_spectrum(const ComplexMatrix& a) {
  require(a.rows() >= a.cols(), "gram_spectrum: need rows >= cols");
  ComplexMatrix g = ComplexMatrix::Zero(a.cols(), a.cols());
  g.selfadjointView<Eigen::Lower>().rankUpdate(a.adjoint());
  HermitianEigen eig = hermitian_eigen(g);
  if (!(eig.values(0) > 0)) throw NumericalError("gram_spectrum: nonpositive eigenvalue " + std::to_string(eig.values(0)));
  return {std::move(eig.values)};
}

int sampler_threads() {
  if (const char* env = std::getenv("DEMMEL_THREADS")) {
    const int t = std::atoi(env);
    if (t >= 1) return t;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> mc_collect(Metric metric, const Dims& dims, std::int64_t count, std::uint64_t seed,
                               int threads) {
  require(count >= 1, "mc_collect: count must be positive");
  if (metric == Metric::kappa_d || metric == Metric::lambda_2) require_kappa_d(dims);
  if (metric == Metric::kappa_e) require_kappa_e(dims);
  if (threads <= 0) threads = sampler_threads();
  threads = static_cast<int>(std::min<std::int64_t>(threads, count));

  std::vector<double> out(static_cast<std::size_t>(count));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  std::vector<std::int64_t> failed_at(static_cast<std::size_t>(threads), -1);
  auto work = [&](int t) {
    const std::int64_t lo = count * t / threads;
    const std::int64_t hi = count * (t + 1) / threads;
    std::int64_t i = lo;
    try {
      for (; i < hi; ++i) {
        NormalStream stream(seed, static_cast<std::uint64_t>(i));
        out[static_cast<std::size_t>(i)] = metric_from_spectrum(gram_spectrum(sample_matrix(dims, stream)), metric);
      }
    } catch (...) {
      errors[static_cast<std::size_t>(t)] = std::current_exception();
      failed_at[static_cast<std::size_t>(t)] = i;
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
    for (auto& th : pool) th.join();
  }
  for (std::size_t t = 0; t < errors.size(); ++t) {
    if (!errors[t]) continue;
    try {
      std::rethrow_exception(errors[t]);
    } catch (const std::exception& ex) {
      throw NumericalError("sample " + std::to_string(failed_at[t]) + ": " + ex.what());
    }
  }
  return out;
}

double ks_compare(std::vector<double> draws, const std::function<double(double)>& cdf) {
  require(!draws.empty(), "ks_compare: no draws");
  std::sort(draws.begin(), draws.end());
  const double n = static_cast<double>(draws.size());
  double worst = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < draws.size(); ++i) {
    const double f = cdf(draws[i]);
    require(f >= -1e-9 && f <= 1 + 1e-9, "ks_compare: cdf value " + std::to_string(f) + " outside [0, 1]");
    require(f >= prev - 1e-9, "ks_compare: cdf decreases at x = " + std::to_string(draws[i]));
    prev = std::max(prev, f);
    const double fc = std::clamp(f, 0.0, 1.0);
    worst = std::max({worst, fc - double(i) / n, double(i + 1) / n - fc});
  }
  return worst;
}

double ks_threshold(std::int64_t n) {
  require(n >= 1, "ks_threshold: need samples");
  return 1.63 / std::sqrt(static_cast<double>(n));
}

Histogram make_histogram(const std::vector<double>& draws, double lo, double hi, int bins) {
  require(bins >= 1, "histogram: bins must be positive");
  require(lo < hi, "histogram: need lo < hi");
  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / bins;
  std::vector<std::int64_t> counts(static_cast<std::size_t>(bins), 0);
  std::int64_t inside = 0;
  for (double x : draws) {
    if (!(x >= lo && x <= hi)) continue;
    int b = static_cast<int>((x - lo) / (hi - lo) * bins);
    b = std::clamp(b, 0, bins - 1);
    ++counts[static_cast<std::size_t>(b)];
    ++inside;
  }
  h.masses.assign(static_cast<std::size_t>(bins), 0.0);
  if (inside > 0) {
    for (int b = 0; b < bins; ++b) h.masses[static_cast<std::size_t>(b)] = double(counts[static_cast<std::size_t>(b)]) / inside;
  }
  h.in_range = draws.empty() ? 0.0 : double(inside) / double(draws.size());
  return h;
}

}  // namespace demmel
