#include "demmel/determinant.hpp"
#include "demmel/exact.hpp"
#include "demmel/special.hpp"

#include "doctest.h"

#include <cmath>
#include <random>

using namespace demmel;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<120>, boost::multiprecision::et_off>;

// sum_k C(N+a, N-k) (-x)^k / k!
Wide laguerre_wide(int N, int a, const Wide& x) {
  Wide sum = 0, binom = 1;
  for (int k = 1; k <= N; ++k) binom = binom * (a + k) / k;
  Wide pw = 1;
  for (int k = 0; k <= N; ++k) {
    sum += binom * pw;
    binom = binom * (N - k) / (a + k + 1);
    pw = pw * (-x) / (k + 1);
  }
  return sum;
}

// Total mass of a density supported on (edge, inf) with a y^-p tail, via
// t = edge / y.
template <class F>
double mass_ratio_tail(F&& f, double edge) {
  return integrate_finite(
      [&](double t) {
        if (t <= 0) return 0.0;
        return f(edge / t) * edge / (t * t);
      },
      0.0, 1.0, {64, 1e-10, 0.0, 4000});
}

template <class F>
double mass_semi_infinite(F&& f, double decay) {
  return integrate_semi_infinite(f, decay, {64, 1e-10, 0.0, 4000});
}

}  // namespace

TEST_SUITE("exact") {

TEST_CASE("joint eigenvalue density") {
  for (double x : {0.3, 1.0, 4.5}) {
    Eigen::VectorXd v(1);
    v << x;
    CHECK(rel(joint_eigen_density(make_spectrum(v), make_dims(1, 0)), std::exp(-x)) < 1e-14);
  }
  Eigen::VectorXd two(2);
  two << 1.0, 2.0;
  CHECK(rel(joint_eigen_density(make_spectrum(two), make_dims(2, 0)), std::exp(-3.0)) < 1e-14);
  Eigen::VectorXd rep(3);
  rep << 1.0, 1.5, 1.5;
  CHECK(joint_eigen_density(make_spectrum(rep), make_dims(3, 1)) == 0.0);
  CHECK_THROWS_AS(joint_eigen_density(make_spectrum(two), make_dims(3, 0)), DomainError);

  // integrates to one over the ordered cone (n = 2, alpha = 1)
  const Dims d = make_dims(2, 1);
  const double total = integrate_semi_infinite(
      [&](double l1) {
        return integrate_semi_infinite(
            [&](double gap) {
              Eigen::VectorXd v(2);
              v << l1, l1 + gap;
              if (!(l1 > 0) || !(gap > 0)) return 0.0;
              return joint_eigen_density({v}, d);
            },
            0.5, {32, 1e-12, 0.0, 200});
      },
      1.0, {32, 1e-10, 0.0, 200});
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("metrics from a spectrum") {
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(5);
  CHECK(metric_from_spectrum(make_spectrum(ones), Metric::kappa_d) == 5.0);
  Eigen::VectorXd v(3);
  v << 1.0, 2.0, 3.0;
  CHECK(metric_from_spectrum(make_spectrum(v), Metric::kappa_d) == 6.0);
  CHECK(metric_from_spectrum(make_spectrum(v), Metric::kappa_e) == 3.0);
  Eigen::VectorXd two(2);
  two << 1.0, 2.0;
  CHECK_THROWS_AS(metric_from_spectrum(make_spectrum(two), Metric::kappa_e), DomainError);
  Eigen::VectorXd bad(2);
  bad << 2.0, 1.0;
  CHECK_THROWS_AS(make_spectrum(bad), DomainError);
}

TEST_CASE("smallest eigenvalue density") {
  for (double x : {0.01, 0.4, 2.0}) {
    CHECK(rel(pdf_lambda_min(x, make_dims(3, 0)), 3.0 * std::exp(-3.0 * x)) < 1e-14);
  }
  CHECK(pdf_lambda_min(0.0, make_dims(4, 0)) == doctest::Approx(4.0));
  for (int n = 1; n <= 6; ++n) {
    for (int a = 0; a <= 3; ++a) {
      const Dims d = make_dims(n, a);
      const double m = mass_semi_infinite([&](double x) { return pdf_lambda_min(x, d); }, 0.5 * n);
      CHECK_MESSAGE(std::abs(m - 1.0) < 1e-8, "n=" << n << " alpha=" << a);
    }
  }
}

TEST_CASE("shifted power inverse laplace kernel") {
  CHECK(laplace_inv_shifted_power(0.0, 1, 3.7).to_real() == doctest::Approx(1.0));
  CHECK(laplace_inv_shifted_power(2.0, 3, 1.5).is_zero());
  CHECK(laplace_inv_shifted_power(2.0, 3, 4.0).to_real() == doctest::Approx(2.0));
}

TEST_CASE("kappa_d density: closed form values and support") {
  CHECK(rel(pdf_kappa_d(4.0, make_dims(2, 0)), 0.09375) < 1e-14);
  for (int n = 2; n <= 5; ++n) {
    for (int a = 0; a <= 3; ++a) {
      CHECK(pdf_kappa_d(n - 0.5, make_dims(n, a)) == 0.0);
      CHECK(pdf_kappa_d(n, make_dims(n, a)) == 0.0);
    }
  }
  CHECK_THROWS_AS(pdf_kappa_d(5.0, make_dims(3, 2), {KappaDMode::closed}), DomainError);
  CHECK_THROWS_AS(pdf_kappa_d(5.0, make_dims(3, 5), {KappaDMode::term_table}), DomainError);
  CHECK_THROWS_AS(pdf_kappa_d(5.0, make_dims(1, 0)), DomainError);
}

TEST_CASE("kappa_d density: term table equals closed forms") {
  std::mt19937_64 rng(31);
  for (int n = 2; n <= 6; ++n) {
    for (int a = 0; a <= 1; ++a) {
      const Dims d = make_dims(n, a);
      for (int i = 0; i < 40; ++i) {
        const double y = n + std::exp(std::uniform_real_distribution<double>(-4.0, 5.0)(rng));
        const double th = pdf_kappa_d(y, d, {KappaDMode::term_table});
        const double cl = pdf_kappa_d(y, d, {KappaDMode::closed});
        CHECK_MESSAGE(rel(th, cl) < 1e-10, "n=" << n << " alpha=" << a << " y=" << y);
      }
    }
  }
}

TEST_CASE("kappa_d density normalizes") {
  for (int n = 2; n <= 6; ++n) {
    for (int a = 0; a <= 2; ++a) {
      const Dims d = make_dims(n, a);
      const double m = mass_ratio_tail([&](double y) { return pdf_kappa_d(y, d); }, n);
      CHECK_MESSAGE(std::abs(m - 1.0) < 1e-8, "n=" << n << " alpha=" << a);
    }
  }
}

TEST_CASE("kappa_d density is nonnegative") {
  for (int a = 2; a <= 4; ++a) {
    const Dims d = make_dims(5, a);
    double peak = 0.0;
    double low = 0.0;
    for (int i = 1; i <= 400; ++i) {
      const double v = pdf_kappa_d(5.0 + 0.25 * i, d);
      peak = std::max(peak, v);
      low = std::min(low, v);
    }
    CHECK(low >= -1e-9 * peak);
  }
}

TEST_CASE("kappa_d via the smallest eigenvalue connection") {
  CHECK(rel(pdf_via_min_connection(7.0, make_dims(3, 1)), pdf_kappa_d(7.0, make_dims(3, 1))) < 1e-8);
  CHECK(pdf_via_min_connection(2.5, make_dims(3, 1)) == 0.0);
  // alpha = 0, n = 2: n(n^2-1)(y-n)^(n^2-2) y^-(n^2)
  for (double y : {2.1, 4.0, 30.0}) {
    CHECK(rel(pdf_via_min_connection(y, make_dims(2, 0)), 6.0 * std::pow(y - 2, 2) * std::pow(y, -4)) < 1e-13);
  }
  std::mt19937_64 rng(41);
  for (int n = 3; n <= 5; ++n) {
    for (int a = 0; a <= 2; ++a) {
      const Dims d = make_dims(n, a);
      for (int i = 0; i < 20; ++i) {
        const double y = n + std::exp(std::uniform_real_distribution<double>(-3.0, 4.0)(rng));
        CHECK(rel(pdf_via_min_connection(y, d), pdf_kappa_d(y, d, {KappaDMode::term_table})) < 1e-8);
      }
    }
  }
}

TEST_CASE("kappa_d moment generating function") {
  for (int n = 2; n <= 4; ++n) {
    for (int a = 0; a <= 2; ++a) {
      CHECK(mgf_kappa_d(0.0, make_dims(n, a)) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
  double prev = 1.0;
  for (double s : {0.01, 0.05, 0.2, 1.0, 3.0}) {
    const double m = mgf_kappa_d(s, make_dims(3, 1));
    CHECK(m > 0.0);
    CHECK(m < prev);
    prev = m;
  }
  for (int n = 2; n <= 5; ++n) {
    for (int a = 0; a <= 2; ++a) {
      const Dims d = make_dims(n, a);
      for (double s : {0.01, 0.1, 0.5}) {
        const double lap = mass_ratio_tail([&](double y) { return std::exp(-s * y) * pdf_kappa_d(y, d); }, n);
        CHECK_MESSAGE(std::abs(lap - mgf_kappa_d(s, d)) < 1e-6, "n=" << n << " alpha=" << a << " s=" << s);
      }
    }
  }
  CHECK_THROWS_AS(mgf_kappa_d(-0.1, make_dims(3, 0)), DomainError);
}

TEST_CASE("precision policy") {
  EvalInfo info;
  pdf_kappa_d(20.0, make_dims(4, 2), {KappaDMode::term_table}, &info);
  CHECK(info.used == Precision::double_precision);
  pdf_kappa_d(3000.0, make_dims(14, 2), {KappaDMode::term_table}, &info);
  CHECK(info.used == Precision::extended);
  const double e = pdf_kappa_d(900.0, make_dims(9, 3), {KappaDMode::term_table, Precision::extended});
  const double d = pdf_kappa_d(900.0, make_dims(9, 3), {KappaDMode::term_table, Precision::automatic});
  CHECK(rel(d, e) < 1e-9);
  CHECK(rel(pdf_kappa_d(40.0, make_dims(4, 1), {KappaDMode::closed, Precision::extended}),
            pdf_kappa_d(40.0, make_dims(4, 1))) < 1e-14);
}

TEST_CASE("kappa_e coefficient table") {
  for (int n = 3; n <= 6; ++n) {
    for (int a = 0; a <= 3; ++a) {
      const KappaEPipeline<double> p(make_dims(n, a));
      CHECK(p.max_degree() == kappa_e_block_degree(make_dims(n, a)));
      CHECK(p.excess_degree_mass() < 1e-12);
      CHECK(p.division_residual() < 1e-12);
    }
  }
}

TEST_CASE("kappa_e density: support, closed form, normalization") {
  for (int n = 3; n <= 5; ++n) {
    CHECK(pdf_kappa_e(n - 1.5, make_dims(n, 1)) == 0.0);
    CHECK(pdf_kappa_e(n - 1.0, make_dims(n, 0)) == 0.0);
  }
  CHECK_THROWS_AS(pdf_kappa_e(5.0, make_dims(2, 0)), DomainError);
  std::mt19937_64 rng(51);
  for (int n = 3; n <= 5; ++n) {
    for (int i = 0; i < 25; ++i) {
      const double y = n - 1 + std::exp(std::uniform_real_distribution<double>(-3.0, 4.0)(rng));
      const double cf = static_cast<double>(pdf_kappa_e_closed<Extended>(Extended(y), n));
      CHECK_MESSAGE(rel(pdf_kappa_e(y, make_dims(n, 0)), cf) < 1e-8, "n=" << n << " y=" << y);
    }
  }
  for (int n = 3; n <= 6; ++n) {
    for (int a = 0; a <= 2; ++a) {
      const Dims d = make_dims(n, a);
      const double m = mass_ratio_tail([&](double y) { return pdf_kappa_e(y, d); }, n - 1);
      CHECK_MESSAGE(std::abs(m - 1.0) < 1e-6, "n=" << n << " alpha=" << a);
    }
  }
}

TEST_CASE("kappa_e via the lambda_2 connection") {
  CHECK(rel(pdf_via_lambda2_connection(4.0, make_dims(3, 0)), pdf_kappa_e(4.0, make_dims(3, 0))) < 1e-8);
  CHECK(pdf_via_lambda2_connection(1.5, make_dims(3, 0)) == 0.0);
  std::mt19937_64 rng(61);
  for (int n = 3; n <= 5; ++n) {
    for (int a = 0; a <= 1; ++a) {
      const Dims d = make_dims(n, a);
      for (int i = 0; i < 10; ++i) {
        const double y = n - 1 + std::exp(std::uniform_real_distribution<double>(-3.0, 4.0)(rng));
        CHECK(rel(pdf_via_lambda2_connection(y, d), pdf_kappa_e(y, d)) < 1e-8);
      }
    }
  }
  const Dims d3 = make_dims(3, 0);
  CHECK(std::abs(mass_ratio_tail([&](double y) { return pdf_via_lambda2_connection(y, d3); }, 2.0) - 1.0) < 1e-6);
}

TEST_CASE("block determinant near z = 1") {
  // against the direct determinant in 120-digit arithmetic
  for (int a = 1; a <= 3; ++a) {
    const Dims d = make_dims(4, a);
    for (double t : {1e-5, 0.05, 1.0, 6.0, 25.0}) {
      for (double z : {0.1, 0.5, 0.9, 0.99, 1.0 - 1e-4, 1.0 - 1e-7}) {
        const int size = a + 2;
        MatrixX<Wide> m(size, size);
        const Wide te(t), ze(z);
        for (int i = 1; i <= size; ++i) {
          for (int j = 1; j <= 2; ++j) {
            const int N = d.n + i - j - 2;
            m(i - 1, j - 1) = N < 0 ? Wide(0) : laguerre_wide(N, j + 1, -te * ze);
          }
          for (int k = 3; k <= size; ++k) {
            const int N = d.n + i - k;
            m(i - 1, k - 1) = N < 0 ? Wide(0) : laguerre_wide(N, k - 1, -te);
          }
        }
        SignedLog<Wide> ref = det_general(m);
        ref.logmag -= a * log(1 - ze);
        const double got = lambda2_block_det_scaled(t, z, d).to_real();
        CHECK_MESSAGE(rel(got, static_cast<double>(ref.to_real())) < 1e-9, "alpha=" << a << " t=" << t << " z=" << z);
      }
    }
  }
}

TEST_CASE("lambda_2 density") {
  std::mt19937_64 rng(71);
  for (int n = 3; n <= 5; ++n) {
    for (int i = 0; i < 10; ++i) {
      const double x = std::exp(std::uniform_real_distribution<double>(-3.0, 1.5)(rng));
      const double integral = pdf_lambda2(x, make_dims(n, 0), Lambda2Mode::integral);
      const double closed = pdf_lambda2(x, make_dims(n, 0), Lambda2Mode::closed);
      CHECK_MESSAGE(rel(integral, closed) < 1e-8, "n=" << n << " x=" << x);
    }
  }
  CHECK(pdf_lambda2(1e-6, make_dims(3, 1)) < 1e-15);
  CHECK(pdf_lambda2(0.0, make_dims(3, 1)) == 0.0);
  for (int n = 3; n <= 5; ++n) {
    for (int a = 0; a <= 2; ++a) {
      const Dims d = make_dims(n, a);
      const double m = mass_semi_infinite([&](double x) { return pdf_lambda2(x, d); }, 0.5 * (n - 1));
      CHECK_MESSAGE(std::abs(m - 1.0) < 1e-6, "n=" << n << " alpha=" << a);
    }
  }
}

TEST_CASE("kappa_e moment generating function") {
  CHECK(mgf_kappa_e(0.0, make_dims(3, 0)) == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(mgf_kappa_e(0.0, make_dims(4, 2)) == doctest::Approx(1.0).epsilon(1e-8));
  double prev = 1.0;
  for (double s : {0.02, 0.2, 1.0}) {
    const double m = mgf_kappa_e(s, make_dims(4, 1));
    CHECK(m > 0.0);
    CHECK(m < prev);
    prev = m;
  }
  for (int n = 3; n <= 5; ++n) {
    for (int a = 0; a <= 1; ++a) {
      const Dims d = make_dims(n, a);
      for (double s : {0.02, 0.5}) {
        const double lap = mass_ratio_tail([&](double y) { return std::exp(-s * y) * pdf_kappa_e(y, d); }, n - 1);
        CHECK_MESSAGE(std::abs(lap - mgf_kappa_e(s, d)) < 1e-6, "n=" << n << " alpha=" << a << " s=" << s);
      }
    }
  }
}

TEST_CASE("proof integrals") {
  for (double z : {-1.0, 0.5, 3.0}) {
    CHECK(q_integral_oracle(1, 0, z) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(q_integral_oracle(1, 1, z) == doctest::Approx(2 * z - 6).epsilon(1e-12));
    CHECK(q_closed_form(1, 1, z) == doctest::Approx(2 * z - 6).epsilon(1e-12));
  }
  CHECK(rel(q_closed_form(2, 1, -1.5), q_integral_oracle(2, 1, -1.5)) < 1e-6);
  std::mt19937_64 rng(81);
  std::uniform_real_distribution<double> u(-4.0, -0.5);
  for (int n = 1; n <= 3; ++n) {
    for (int a = 0; a <= 2; ++a) {
      for (int i = 0; i < 5; ++i) {
        const double z = u(rng);
        CHECK(rel(q_closed_form(n, a, z), q_integral_oracle(n, a, z)) < 1e-6);
        const double x = u(rng);
        const double y = u(rng) - 5.0;
        CHECK(rel(r_closed_form(n, x, y, a), r_integral_oracle(n, x, y, a)) < 1e-6);
      }
    }
  }
  CHECK(r_closed_form(1, 2.0, -1.0, 0) == doctest::Approx(2 * 4.0 - 24.0 + 24.0));
  CHECK_THROWS_AS(q_integral_oracle(4, 0, 1.0), DomainError);
}

}
