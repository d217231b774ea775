#pragma once

#include "demmel/error.hpp"
#include "demmel/poly.hpp"
#include "demmel/precision.hpp"
#include "demmel/quadrature.hpp"
#include "demmel/signed_log.hpp"

#include <Eigen/Dense>

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace demmel {

// Ensemble parameters: A is m x n with m = n + alpha.
struct Dims {
  int n = 2;
  int alpha = 0;

  int m() const { return n + alpha; }
  int mn() const { return n * (n + alpha); }
};

Dims make_dims(int n, int alpha);
void require_kappa_d(const Dims& d);  // n >= 2
void require_kappa_e(const Dims& d);  // n >= 3

// Ordered eigenvalues 0 < l_1 <= ... <= l_n of A*A.
struct EigenSpectrum {
  Eigen::VectorXd values;
  Eigen::Index size() const { return values.size(); }
};

EigenSpectrum make_spectrum(const Eigen::VectorXd& values);

enum class Metric { kappa_d, kappa_e, lambda_min, lambda_2 };
enum class CurveKind { exact, asymptotic, closed_form };

std::string to_string(Metric m);
std::string to_string(CurveKind k);
Metric parse_metric(const std::string& s);
CurveKind parse_kind(const std::string& s);

// Lower end of the support: n, n-1 for the squared condition numbers, 0 for
// eigenvalues.
double support_edge(Metric m, const Dims& d);

// K_{n,alpha} Delta^2 prod l^alpha e^-l.
double joint_eigen_density(const EigenSpectrum& spec, const Dims& dims);

// kappa_d: sum/l_1, kappa_e: sum/l_2 (squared condition numbers);
// lambda_min / lambda_2 return the eigenvalue itself.
double metric_from_spectrum(const EigenSpectrum& spec, Metric which);

// Density of the smallest eigenvalue; the alpha x alpha Laguerre
// determinant is empty (= 1) for alpha = 0.
double pdf_lambda_min(double x, const Dims& dims);

// L^{-1}{ e^{-a s} s^{-k} }(y) = (y - a)^{k-1} / Gamma(k) for y > a, 0 otherwise.
// For k <= 0 the inverse is supported at y = a only, so the value for y > a is 0.
template <class Real>
SignedLog<Real> laplace_inv_shifted_power(const Real& a, int k, const Real& y);

// ---------------------------------------------------------------------------
// kappa_D^2

enum class KappaDMode { automatic, term_table, closed };

struct KappaDOptions {
  KappaDMode mode = KappaDMode::automatic;
  Precision precision = Precision::automatic;
  int alpha_cap = 4;
};

// Finite-n density of kappa_D^2 as an alpha-fold nested sum. The sum over
// j_1..j_alpha is grouped by J = sum j_k once at construction, so each
// density value is a single sum over J.
template <class Real>
class KappaDTermTable {
 public:
  explicit KappaDTermTable(const Dims& dims);

  // Density value and the cancellation factor of the sum.
  SignedLog<Real> evaluate(const Real& y, Real* cancellation = nullptr) const;

  const Dims& dims() const { return dims_; }
  std::uint64_t term_count() const { return terms_; }

 private:
  Dims dims_;
  std::uint64_t terms_ = 0;
  Real log_prefactor_ = 0;           // ln Gamma(mn) + ln prod (n+k)/(k+1)!
  std::vector<SignedLog<Real>> b_;   // grouped coefficients by J
  std::vector<SignedLog<Real>> abs_; // their absolute-term sums
};

// Closed forms for alpha = 0 and alpha = 1.
template <class Real>
SignedLog<Real> pdf_kappa_d_closed(const Real& y, const Dims& dims);

double pdf_kappa_d(double y, const Dims& dims, const KappaDOptions& opt = {},
                   EvalInfo* info = nullptr);

// Laplace-domain m.g.f. E[exp(-s kappa_D^2)] by a semi-infinite x integral.
double mgf_kappa_d(double s, const Dims& dims, const QuadratureOptions& quad = {});

// Same density through f = Gamma(mn) y^-mn L^{-1}{ f_min(s) / s^(mn-1) },
// with f_min expanded as e^{-ns} times a polynomial in s.
double pdf_via_min_connection(double y, const Dims& dims, Precision precision = Precision::automatic);

// ---------------------------------------------------------------------------
// kappa_E^2 and lambda_2

// Coefficient table of the (alpha+2)-square block Laguerre determinant
// D(s, z) = sum_{d1, d2} T[d1][d2] z^d1 s^(d1+d2), built by Laplace expansion
// along the two z-dependent columns. For each total degree d the polynomial
// in z is divided exactly by (1 - z)^alpha, so the density integrand carries
// no endpoint factor.
template <class Real>
class KappaEPipeline {
 public:
  explicit KappaEPipeline(const Dims& dims);

  SignedLog<Real> evaluate(double y, const QuadratureOptions& quad, double* cancellation = nullptr) const;

  // z^2 (1-z)^alpha sum_d H_d(z) K_d(y, z): the integrand over z.
  Real integrand(double y, double z, Real* abs_value = nullptr) const;

  int max_degree() const { return static_cast<int>(h_.size()) - 1; }
  // Largest remainder left by the (1 - z)^(2 alpha) division, relative to the
  // coefficient scale; ~eps when the table is exact.
  double division_residual() const { return residual_; }
  // Untruncated table magnitude above the true degree, relative to the scale.
  double excess_degree_mass() const { return excess_; }

  const Dims& dims() const { return dims_; }

 private:
  Dims dims_;
  Real log_gamma_mn_ = 0;
  std::vector<std::vector<Real>> h_;   // h_[d][e]: coefficient of z^e s^d after division
  std::vector<Real> log_gamma_k_;      // ln Gamma(mn - 4 - d)
  double residual_ = 0.0;
  double excess_ = 0.0;
};

// True s-degree of the kappa_E block determinant (larger coefficients vanish).
int kappa_e_block_degree(const Dims& dims);
// True s-degree of the kappa_D (minimum eigenvalue) Laguerre determinant.
int kappa_d_block_degree(const Dims& dims);

struct KappaEOptions {
  Precision precision = Precision::automatic;
  int alpha_cap = 3;
  QuadratureOptions quad{};
};

double pdf_kappa_e(double y, const Dims& dims, const KappaEOptions& opt = {}, EvalInfo* info = nullptr);

// Square case closed form (alpha = 0).
template <class Real>
Real pdf_kappa_e_closed(const Real& y, int n, Real* cancellation = nullptr);

// Same density entered through f_lambda2: per z node the full block
// determinant is expanded as a polynomial in s by cofactor expansion, then
// inverted term by term.
double pdf_via_lambda2_connection(double y, const Dims& dims, const QuadratureOptions& quad = {});

// Numeric z-integral J(t) = int_0^1 z^2 (1-z)^-alpha e^{-(1-z)t} D(t, z) dz,
// with D evaluated as a floating determinant per node.
double lambda2_block_integral(double t, const Dims& dims, const QuadratureOptions& quad = {});

// D(t, z) (1 - z)^-alpha for one node, evaluated without the endpoint
// cancellation near z = 1.
SignedLog<double> lambda2_block_det_scaled(double t, double z, const Dims& dims);

enum class Lambda2Mode { automatic, integral, closed };

double pdf_lambda2(double x, const Dims& dims, Lambda2Mode mode = Lambda2Mode::automatic,
                   const QuadratureOptions& quad = {});

// alpha = 0 closed form.
template <class Real>
Real pdf_lambda2_closed(const Real& x, int n, Real* cancellation = nullptr);

double mgf_kappa_e(double s, const Dims& dims, const QuadratureOptions& quad = {});

// ---------------------------------------------------------------------------
// Multidimensional integrals behind the determinant forms, for tiny n.

// Q(n, alpha, z) = int Delta^2(y) prod y_j^2 e^-y_j (z - y_j)^alpha dy.
double q_integral_oracle(int n, int alpha, double z);
// R(n, a, b, alpha) = int Delta^2(x) prod x_j^2 e^-x_j (a - x_j)^2 (b - x_j)^alpha dx.
double r_integral_oracle(int n, double a, double b, int alpha);

double q_closed_form(int n, int alpha, double z);
double r_closed_form(int n, double a, double b, int alpha);

}  // namespace demmel
