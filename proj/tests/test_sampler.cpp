#include "demmel/sampler.hpp"

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace demmel;

namespace {

// real part of det(G - x I) for a 3 x 3 Hermitian G
double char_poly(const ComplexMatrix& g, double x) {
  ComplexMatrix s = g - x * ComplexMatrix::Identity(3, 3);
  return s.determinant().real();
}

std::vector<double> roots_by_bisection(const ComplexMatrix& g) {
  const double top = g.norm() + 1.0;
  std::vector<double> roots;
  const int steps = 200000;
  double prev_x = -1e-9, prev_f = char_poly(g, prev_x);
  for (int k = 1; k <= steps; ++k) {
    const double x = top * k / steps;
    const double f = char_poly(g, x);
    if ((f > 0) != (prev_f > 0)) {
      double lo = prev_x, hi = x;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if ((char_poly(g, mid) > 0) == (char_poly(g, lo) > 0)) lo = mid; else hi = mid;
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_x = x;
    prev_f = f;
  }
  return roots;
}

}  // namespace

TEST_SUITE("sampler") {

TEST_CASE("philox known answers") {
  using A4 = std::array<std::uint32_t, 4>;
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) == A4{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        A4{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        A4{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("complex normal entries") {
  NormalStream a(17, 3), b(17, 3), c(17, 4);
  const ComplexMatrix ma = sample_matrix(make_dims(4, 2), a);
  const ComplexMatrix mb = sample_matrix(make_dims(4, 2), b);
  const ComplexMatrix mc = sample_matrix(make_dims(4, 2), c);
  CHECK(ma == mb);
  CHECK(ma != mc);
  CHECK(ma.rows() == 6);
  CHECK(ma.cols() == 4);

  NormalStream s(2024, 0);
  double sq = 0.0, re = 0.0, re2 = 0.0, im2 = 0.0, cross = 0.0;
  const int count = 1000000;
  for (int i = 0; i < count; ++i) {
    const std::complex<double> z = s.complex_normal();
    sq += std::norm(z);
    re += z.real();
    re2 += z.real() * z.real();
    im2 += z.imag() * z.imag();
    cross += z.real() * z.imag();
  }
  CHECK(std::abs(sq / count - 1.0) < 0.01);
  CHECK(std::abs(re / count) < 0.005);
  CHECK(std::abs(re2 / count - 0.5) < 0.005);
  CHECK(std::abs(im2 / count - 0.5) < 0.005);
  CHECK(std::abs(cross / count) < 0.005);

  double trace = 0.0;
  const int mats = 100000;
  for (int i = 0; i < mats; ++i) {
    NormalStream st(9, static_cast<std::uint64_t>(i));
    const ComplexMatrix m = sample_matrix(make_dims(4, 2), st);
    trace += m.squaredNorm();
  }
  CHECK(std::abs(trace / mats / 24.0 - 1.0) < 0.01);
}

TEST_CASE("hermitian eigensolver") {
  const EigenSpectrum id = gram_spectrum(ComplexMatrix::Identity(4, 4));
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(std::abs(id.values(i) - 1.0) < 1e-15);
  ComplexMatrix dg = ComplexMatrix::Zero(2, 2);
  dg(0, 0) = 2.0;
  dg(1, 1) = 1.0;
  const EigenSpectrum sp = gram_spectrum(dg);
  CHECK(std::abs(sp.values(0) - 1.0) < 1e-15);
  CHECK(std::abs(sp.values(1) - 4.0) < 1e-15);
  CHECK_THROWS_AS(gram_spectrum(ComplexMatrix::Identity(2, 3)), DomainError);

  for (int t = 0; t < 20; ++t) {
    NormalStream st(55, static_cast<std::uint64_t>(t));
    const ComplexMatrix a = sample_matrix(make_dims(3, 2), st);
    const ComplexMatrix g = a.adjoint() * a;
    const std::vector<double> want = roots_by_bisection(g);
    REQUIRE(want.size() == 3);
    const EigenSpectrum got = gram_spectrum(a);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(got.values(i) - want[static_cast<std::size_t>(i)]) < 1e-8 * want[2]);
  }

  for (int n : {1, 2, 5, 17, 50}) {
    NormalStream st(77, static_cast<std::uint64_t>(n));
    const ComplexMatrix a = sample_matrix(make_dims(n, 1), st);
    const ComplexMatrix h = a.adjoint() * a;
    const HermitianEigen e = hermitian_eigen(h, true);
    const double scale = h.norm();
    for (int j = 0; j < n; ++j) {
      const Eigen::VectorXcd u = e.vectors.col(j);
      CHECK((h * u - e.values(j) * u).norm() <= 1e-10 * scale);
      if (j > 0) CHECK(e.values(j) >= e.values(j - 1));
    }
    CHECK((e.vectors.adjoint() * e.vectors - ComplexMatrix::Identity(n, n)).norm() < 1e-12 * n);
    CHECK(std::abs(e.values.sum() - h.trace().real()) < 1e-12 * scale * n);
  }
}

TEST_CASE("monte carlo collection") {
  const Dims d = make_dims(5, 1);
  const auto kd = mc_collect(Metric::kappa_d, d, 2000, 11, 1);
  const auto ke = mc_collect(Metric::kappa_e, d, 2000, 11, 1);
  const auto l1 = mc_collect(Metric::lambda_min, d, 2000, 11, 1);
  const auto l2 = mc_collect(Metric::lambda_2, d, 2000, 11, 1);
  for (std::size_t i = 0; i < kd.size(); ++i) {
    CHECK(kd[i] >= 5.0 * (1 - 1e-14));
    CHECK(kd[i] >= ke[i]);
    CHECK(ke[i] >= 4.0 * (1 - 1e-14));
    CHECK(l1[i] > 0.0);
    CHECK(l2[i] >= l1[i]);
  }
  CHECK(mc_collect(Metric::kappa_d, d, 2000, 11, 3) == kd);
  CHECK(mc_collect(Metric::kappa_d, d, 2000, 11, 4) == mc_collect(Metric::kappa_d, d, 2000, 11, 1));
  CHECK(mc_collect(Metric::kappa_d, d, 2000, 12, 1) != kd);

  const auto exp1 = mc_collect(Metric::lambda_min, make_dims(1, 0), 1000000, 5);
  const double mean = std::accumulate(exp1.begin(), exp1.end(), 0.0) / exp1.size();
  CHECK(std::abs(mean - 1.0) < 0.01);

  CHECK_THROWS_AS(mc_collect(Metric::kappa_e, make_dims(2, 0), 10, 1), DomainError);
  CHECK_THROWS_AS(mc_collect(Metric::kappa_d, make_dims(3, 0), 0, 1), DomainError);
}

TEST_CASE("kolmogorov-smirnov statistic") {
  auto cdf = [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); };
  std::vector<double> draws;
  NormalStream s(31, 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) draws.push_back(-std::log(s.uniform()));
  const double d = ks_compare(draws, cdf);
  CHECK(d < ks_threshold(n));
  CHECK(d > 0.0);
  CHECK(ks_threshold(100000) == doctest::Approx(0.0051545).epsilon(1e-4));

  // shifting the reference by 0.1 moves about 1 - e^-0.1 of the mass
  const double shifted = ks_compare(draws, [&](double x) { return cdf(x - 0.1); });
  CHECK(std::abs(shifted - (1 - std::exp(-0.1))) < 0.02);

  const std::vector<double> flat(500, 1.0);
  CHECK(ks_compare(flat, cdf) >= 0.5);

  CHECK_THROWS_AS(ks_compare(draws, [](double x) { return std::cos(x); }), DomainError);
  CHECK_THROWS_AS(ks_compare(draws, [](double) { return 2.0; }), DomainError);
  CHECK_THROWS_AS(ks_compare({}, cdf), DomainError);
}

TEST_CASE("histogram") {
  std::vector<double> draws;
  NormalStream s(8, 0);
  for (int i = 0; i < 5000; ++i) draws.push_back(s.uniform() * 3.0);
  const Histogram h = make_histogram(draws, 0.0, 2.0, 40);
  CHECK(h.edges.size() == 41);
  CHECK(std::abs(std::accumulate(h.masses.begin(), h.masses.end(), 0.0) - 1.0) < 1e-12);
  CHECK(std::abs(h.in_range - 2.0 / 3.0) < 0.03);
  CHECK_THROWS_AS(make_histogram(draws, 1.0, 1.0, 10), DomainError);
}

}
