#pragma once

#include "demmel/exact.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace demmel {

using ComplexMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic>;

// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// Standard complex normals (variance 1/2 per component) drawn from the Philox
// blocks keyed by seed, counter (index, block). Equal (seed, index) give equal
// streams.
class NormalStream {
 public:
  NormalStream(std::uint64_t seed, std::uint64_t index);

  // uniform on the open interval (0, 1), 53 random bits
  double uniform();
  std::complex<double> complex_normal();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::uint64_t index_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
};

ComplexMatrix sample_matrix(const Dims& dims, NormalStream& stream);

struct HermitianEigen {
  Eigen::VectorXd values;        // ascending
  ComplexMatrix vectors;         // columns, empty unless requested
};

// Householder reduction to real tridiagonal form, then implicit QL with
// Wilkinson shifts. Reads the lower triangle of h only. Throws
// ConvergenceError after 60 sweeps on one eigenvalue.
HermitianEigen hermitian_eigen(const ComplexMatrix& h, bool want_vectors = false);

// Ascending eigenvalues of A*A; A must have at least as many rows as columns.
EigenSpectrum gram_spectrum(const ComplexMatrix& a);

// Worker threads for mc_collect: DEMMEL_THREADS if set, else the hardware
// count.
int sampler_threads();

// draws[i] depends only on (seed, i).
std::vector<double> mc_collect(Metric metric, const Dims& dims, std::int64_t count, std::uint64_t seed,
                               int threads = 0);

// sup |F_emp - F| over the sorted draws. Rejects cdf values outside [0, 1]
// or decreasing along the sorted sample.
double ks_compare(std::vector<double> draws, const std::function<double(double)>& cdf);

// 1.63 / sqrt(N), the 1% two-sided asymptotic critical value.
double ks_threshold(std::int64_t n);

struct Histogram {
  std::vector<double> edges;   // bins + 1 ascending
  std::vector<double> masses;  // fraction of the in-range draws
  double in_range = 0.0;       // fraction of all draws inside [edges.front(), edges.back()]
};

Histogram make_histogram(const std::vector<double>& draws, double lo, double hi, int bins);

struct McReport {
  Dims dims;
  Metric metric = Metric::kappa_d;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  int bins = 0;
  Histogram histogram;
  double ks_statistic = 0.0;
  double ks_threshold = 0.0;
  bool pass = false;
};

}  // namespace demmel
