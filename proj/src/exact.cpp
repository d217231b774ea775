#include "demmel/exact.hpp"

#include "demmel/determinant.hpp"
#include "demmel/special.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <utility>

namespace demmel {

namespace {

double lfact(int k) { return log_factorial<double>(k); }

// Monomial coefficients of L_N^(rho); empty for N < 0 (the polynomial is 0).
template <class Real>
std::vector<Real> laguerre_real(int N, int rho) {
  if (N < 0) return {};
  const Poly<Real> p = laguerre_coeffs<Real>(N, rho);
  std::vector<Real> out(static_cast<std::size_t>(p.degree() + 1));
  for (int d = 0; d <= p.degree(); ++d) out[static_cast<std::size_t>(d)] = p[d].to_real();
  return out;
}

template <class Real>
Real horner(const std::vector<Real>& c, const Real& x) {
  Real acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

// L_N^(rho)(-t) as a polynomial in t.
template <class Real>
Poly<Real> laguerre_neg(int N, int rho) {
  if (N < 0) return {};
  return laguerre_coeffs<Real>(N, rho).scaled_argument(Real(-1));
}

double finish(const SignedLog<double>& v, const char* what) {
  if (v.sign != 0 && v.logmag > std::log(std::numeric_limits<double>::max())) {
    throw OverflowError(std::string(what) + ": value overflows double");
  }
  return v.to_real();
}

template <class Real>
double finish_real(const SignedLog<Real>& v, const char* what) {
  return finish(v.template cast<double>(), what);
}

template <class Map, class Make>
auto& cached(Map& map, std::mutex& mu, const Dims& d, Make make) {
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(d.n, d.alpha);
  auto it = map.find(key);
  if (it == map.end()) it = map.emplace(key, make()).first;
  return *it->second;
}

}  // namespace

Dims make_dims(int n, int alpha) {
  require(n >= 1, "dims: n must be at least 1");
  require(alpha >= 0, "dims: alpha must be nonnegative");
  require(n <= 2000 && alpha <= 2000, "dims: n and alpha must be at most 2000");
  return {n, alpha};
}

void require_kappa_d(const Dims& d) {
  require(d.n >= 2, "kappa-d needs n >= 2 (got n = " + std::to_string(d.n) + ")");
  require(d.alpha >= 0, "alpha must be nonnegative");
}

void require_kappa_e(const Dims& d) {
  require(d.n >= 3, "kappa-e and lambda-2 need n >= 3 (got n = " + std::to_string(d.n) + ")");
  require(d.alpha >= 0, "alpha must be nonnegative");
}

EigenSpectrum make_spectrum(const Eigen::VectorXd& values) {
  require(values.size() >= 1, "spectrum: need at least one eigenvalue");
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    require(values[i] > 0 && std::isfinite(values[i]), "spectrum: eigenvalues must be positive");
    if (i > 0) require(values[i] >= values[i - 1], "spectrum: eigenvalues must be ascending");
  }
  return {values};
}

std::string to_string(Metric m) {
  switch (m) {
    case Metric::kappa_d: return "kappa-d";
    case Metric::kappa_e: return "kappa-e";
    case Metric::lambda_min: return "lambda-min";
    case Metric::lambda_2: return "lambda-2";
  }
  return "?";
}

std::string to_string(CurveKind k) {
  switch (k) {
    case CurveKind::exact: return "exact";
    case CurveKind::asymptotic: return "asymptotic";
    case CurveKind::closed_form: return "closed-form";
  }
  return "?";
}

Metric parse_metric(const std::string& s) {
  if (s == "kappa-d") return Metric::kappa_d;
  if (s == "kappa-e") return Metric::kappa_e;
  if (s == "lambda-min") return Metric::lambda_min;
  if (s == "lambda-2") return Metric::lambda_2;
  throw DomainError("unknown metric '" + s + "' (expected kappa-d, kappa-e, lambda-min, lambda-2)");
}

CurveKind parse_kind(const std::string& s) {
  if (s == "exact") return CurveKind::exact;
  if (s == "asymptotic") return CurveKind::asymptotic;
  if (s == "closed-form") return CurveKind::closed_form;
  throw DomainError("unknown kind '" + s + "' (expected exact, asymptotic, closed-form)");
}

double support_edge(Metric m, const Dims& d) {
  switch (m) {
    case Metric::kappa_d: return d.n;
    case Metric::kappa_e: return d.n - 1;
    default: return 0.0;
  }
}

double joint_eigen_density(const EigenSpectrum& spec, const Dims& dims) {
  require(spec.size() == dims.n, "joint density: spectrum length " + std::to_string(spec.size()) +
                                     " differs from n = " + std::to_string(dims.n));
  const int n = dims.n;
  const int a = dims.alpha;
  double log_k = lfact(n);
  for (int j = 0; j < n; ++j) log_k -= lfact(j + 1) + lfact(j + a);
  std::vector<double> xs(spec.values.data(), spec.values.data() + n);
  const SignedLog<double> delta = vandermonde<double>(xs);
  if (delta.is_zero()) return 0.0;
  double lg = log_k + 2.0 * delta.logmag;
  for (double x : xs) {
    require(x > 0, "joint density: eigenvalues must be positive");
    lg += a * std::log(x) - x;
  }
  return finish({1, lg}, "joint_eigen_density");
}

double metric_from_spectrum(const EigenSpectrum& spec, Metric which) {
  const Eigen::VectorXd& v = spec.values;
  switch (which) {
    case Metric::kappa_d:
      require(v.size() >= 2, "kappa-d needs a spectrum of length >= 2");
      return v.sum() / v[0];
    case Metric::kappa_e:
      require(v.size() >= 3, "kappa-e needs a spectrum of length >= 3");
      return v.sum() / v[1];
    case Metric::lambda_min:
      require(v.size() >= 1, "empty spectrum");
      return v[0];
    case Metric::lambda_2:
      require(v.size() >= 2, "lambda-2 needs a spectrum of length >= 2");
      return v[1];
  }
  return 0.0;
}

double pdf_lambda_min(double x, const Dims& dims) {
  const int n = dims.n;
  const int a = dims.alpha;
  require(n >= 1, "pdf_lambda_min: n must be at least 1");
  if (x < 0 || (x == 0 && a > 0)) return 0.0;
  double lg = lfact(n) - lfact(n + a - 1) - n * x;
  if (a > 0) lg += a * std::log(x);
  MatrixX<double> m(a, a);
  for (int k = 1; k <= a; ++k) {
    for (int l = 1; l <= a; ++l) {
      const int N = n + k - l - 1;
      m(k - 1, l - 1) = N < 0 ? 0.0 : horner(laguerre_real<double>(N, l + 1), -x);
    }
  }
  SignedLog<double> d = det_general(m);
  d.logmag += lg;
  return finish(d, "pdf_lambda_min");
}

template <class Real>
SignedLog<Real> laplace_inv_shifted_power(const Real& a, int k, const Real& y) {
  using std::log;
  if (!(y > a) || k <= 0) return SignedLog<Real>::zero();
  Real lg = -log_gamma(Real(k));
  if (k > 1) lg += (k - 1) * log(y - a);
  return {1, lg};
}

int kappa_d_block_degree(const Dims& d) { return d.alpha * (d.n - 1); }

int kappa_e_block_degree(const Dims& d) {
  const int a = d.alpha;
  return (a + 2) * (d.n + a) - (a + 1) * (a + 1) - 3;
}

// ---------------------------------------------------------------------------
// kappa_D^2

template <class Real>
KappaDTermTable<Real>::KappaDTermTable(const Dims& dims) : dims_(dims) {
  using std::log;
  require_kappa_d(dims);
  const int n = dims.n;
  const int a = dims.alpha;
  log_prefactor_ = log_gamma(Real(dims.mn()));
  for (int k = 0; k <= a; ++k) log_prefactor_ += log(Real(n + k)) - log_factorial<Real>(k + 1);

  if (a == 0) {
    b_ = {SignedLog<Real>::one()};
    abs_ = b_;
    terms_ = 1;
    return;
  }
  const std::vector<int> bounds = shifted_factorial_bounds(n, a);
  // factor[k][j] = (-1)^j (-n-a+k+1)_j / ((k+2)_j j!)
  std::vector<std::vector<SignedLog<Real>>> factor(static_cast<std::size_t>(a));
  int max_j = 0;
  for (int k = 1; k <= a; ++k) {
    const int bound = bounds[static_cast<std::size_t>(k - 1)];
    max_j += bound;
    auto& f = factor[static_cast<std::size_t>(k - 1)];
    f.resize(static_cast<std::size_t>(bound) + 1);
    for (int j = 0; j <= bound; ++j) {
      SignedLog<Real> t = pochhammer(Real(-n - a + k + 1), j) / pochhammer(Real(k + 2), j);
      t.logmag -= log_factorial<Real>(j);
      if (j % 2 != 0) t = -t;
      f[static_cast<std::size_t>(j)] = t;
    }
  }
  std::vector<LogSum<Real>> acc(static_cast<std::size_t>(max_j) + 1);
  std::vector<Real> c(static_cast<std::size_t>(a));
  IndexVector idx(bounds);
  do {
    ++terms_;
    for (int l = 0; l < a; ++l) c[static_cast<std::size_t>(l)] = Real(l + 1 + idx[static_cast<std::size_t>(l)]);
    const Real delta = vandermonde_value<Real>(c);
    if (delta == 0) continue;
    SignedLog<Real> t = SignedLog<Real>::from_real(delta);
    for (int l = 0; l < a; ++l) {
      t *= factor[static_cast<std::size_t>(l)][static_cast<std::size_t>(idx[static_cast<std::size_t>(l)])];
    }
    acc[static_cast<std::size_t>(idx.sum())].add(t);
  } while (idx.next());
  b_.resize(acc.size());
  abs_.resize(acc.size());
  for (std::size_t j = 0; j < acc.size(); ++j) {
    b_[j] = acc[j].value();
    abs_[j] = acc[j].abs_value();
  }
}

template <class Real>
SignedLog<Real> KappaDTermTable<Real>::evaluate(const Real& y, Real* cancellation) const {
  using std::abs;
  using std::exp;
  using std::log;
  if (cancellation) *cancellation = 1;
  const int n = dims_.n;
  const int mn = dims_.mn();
  const int a = dims_.alpha;
  if (!(y > n)) return SignedLog<Real>::zero();
  const Real ly = log(y - n);
  LogSum<Real> sum;
  LogSum<Real> abs_sum;
  for (std::size_t j = 0; j < b_.size(); ++j) {
    if (b_[j].is_zero() && abs_[j].is_zero()) continue;
    const int J = static_cast<int>(j);
    const int k = mn - a - 1 - J;
    if (k <= 0) continue;  // 1/Gamma at a nonpositive integer
    const SignedLog<Real> kernel{1, Real((k - 1) * ly - log_gamma(Real(k)))};
    sum.add(b_[j] * kernel);
    abs_sum.add(abs_[j] * kernel);
  }
  SignedLog<Real> r = sum.value();
  if (r.is_zero()) {
    if (cancellation) *cancellation = std::numeric_limits<Real>::infinity();
    return r;
  }
  if (cancellation) *cancellation = exp(abs_sum.value().logmag - r.logmag);
  r.logmag += log_prefactor_ - mn * log(y);
  return r;
}

template <class Real>
SignedLog<Real> pdf_kappa_d_closed(const Real& y, const Dims& dims) {
  using std::log;
  require_kappa_d(dims);
  const int n = dims.n;
  if (!(y > n)) return SignedLog<Real>::zero();
  const Real ly = log(y - n);
  if (dims.alpha == 0) {
    const int n2 = n * n;
    return {1, Real(log(Real(n)) + log(Real(n2 - 1)) + (n2 - 2) * ly - n2 * log(y))};
  }
  require(dims.alpha == 1, "kappa-d closed form exists for alpha = 0 and 1 only");
  const int mn = dims.mn();
  LogSum<Real> sum;
  for (int i = 0; i <= n - 1; ++i) {
    SignedLog<Real> t = pochhammer(Real(-n + 1), i) / pochhammer(Real(3), i);
    t.logmag -= log_factorial<Real>(i);
    if (i % 2 != 0) t = -t;
    t.logmag += -i * ly - log_gamma(Real(mn - i - 2));
    sum.add(t);
  }
  SignedLog<Real> r = sum.value();
  r.logmag += log_gamma(Real(mn)) - log(Real(2)) + log(Real(n)) + log(Real(n + 1)) + (mn - 3) * ly -
              mn * log(y);
  return r;
}

namespace {

std::mutex kappa_d_mu;
std::map<std::pair<int, int>, std::unique_ptr<KappaDTermTable<double>>> kappa_d_double;
std::map<std::pair<int, int>, std::unique_ptr<KappaDTermTable<Extended>>> kappa_d_ext;

const KappaDTermTable<double>& kappa_d_table_double(const Dims& d) {
  return cached(kappa_d_double, kappa_d_mu, d,
                [&] { return std::make_unique<KappaDTermTable<double>>(d); });
}

const KappaDTermTable<Extended>& kappa_d_table_ext(const Dims& d) {
  return cached(kappa_d_ext, kappa_d_mu, d,
                [&] { return std::make_unique<KappaDTermTable<Extended>>(d); });
}

std::string budget_message(const char* what, double c) {
  return std::string(what) + ": cancellation factor " + std::to_string(c) +
         " exceeds the double-precision budget; use extended precision";
}

}  // namespace

double pdf_kappa_d(double y, const Dims& dims, const KappaDOptions& opt, EvalInfo* info) {
  require_kappa_d(dims);
  KappaDMode mode = opt.mode;
  if (mode == KappaDMode::automatic) mode = dims.alpha <= 1 ? KappaDMode::closed : KappaDMode::term_table;
  if (mode == KappaDMode::closed) {
    require(dims.alpha <= 1, "kappa-d closed form exists for alpha = 0 and 1 only");
  } else {
    require(dims.alpha <= opt.alpha_cap, "kappa-d term-table mode: alpha = " + std::to_string(dims.alpha) +
                                             " above the cap " + std::to_string(opt.alpha_cap));
  }
  if (info) *info = {Precision::double_precision, 1.0};
  if (!(y > dims.n)) return 0.0;

  if (mode == KappaDMode::closed) {
    // All terms of the closed forms share one sign.
    if (opt.precision == Precision::extended) {
      if (info) info->used = Precision::extended;
      return finish_real(pdf_kappa_d_closed<Extended>(Extended(y), dims), "pdf_kappa_d");
    }
    return finish(pdf_kappa_d_closed<double>(y, dims), "pdf_kappa_d");
  }

  bool extended = opt.precision == Precision::extended ||
                  (opt.precision == Precision::automatic && dims.n > kDoublePrecisionMaxN);
  if (!extended) {
    double c = 1.0;
    const SignedLog<double> v = kappa_d_table_double(dims).evaluate(y, &c);
    if (c <= kDoubleCancellationBudget) {
      if (info) info->cancellation = c;
      return finish(v, "pdf_kappa_d");
    }
    if (opt.precision == Precision::double_precision) throw PrecisionLossError(budget_message("pdf_kappa_d", c));
    extended = true;
  }
  Extended c = 1;
  const SignedLog<Extended> v = kappa_d_table_ext(dims).evaluate(Extended(y), &c);
  if (info) *info = {Precision::extended, static_cast<double>(c)};
  return finish_real(v, "pdf_kappa_d");
}

double mgf_kappa_d(double s, const Dims& dims, const QuadratureOptions& quad) {
  require_kappa_d(dims);
  require(s >= 0, "mgf: s must be nonnegative");
  const int n = dims.n;
  const int a = dims.alpha;
  const int mn = dims.mn();
  std::vector<std::vector<double>> cells(static_cast<std::size_t>(a * a));
  for (int k = 1; k <= a; ++k) {
    for (int l = 1; l <= a; ++l) cells[static_cast<std::size_t>((k - 1) * a + l - 1)] = laguerre_real<double>(n + k - l - 1, l + 1);
  }
  const double base = lfact(n) - n * s - lfact(dims.m() - 1);
  auto f = [&](double x) -> double {
    if (x <= 0) return 0.0;
    const double t = s + x;
    MatrixX<double> m(a, a);
    for (int i = 0; i < a * a; ++i) m(i / a, i % a) = horner(cells[static_cast<std::size_t>(i)], -t);
    SignedLog<double> d = det_general(m);
    d.logmag += base + (mn - 1) * std::log(x) - n * x - (mn - a - 1) * std::log(t);
    return d.to_real();
  };
  return integrate_semi_infinite(f, n, quad);
}

namespace {

template <class Real>
SignedLog<Real> via_min_connection(const Real& y, const Dims& dims, Real* cancellation) {
  using std::log;
  const int n = dims.n;
  const int a = dims.alpha;
  const int mn = dims.mn();
  std::vector<Poly<Real>> cells(static_cast<std::size_t>(a * a));
  for (int k = 1; k <= a; ++k) {
    for (int l = 1; l <= a; ++l) cells[static_cast<std::size_t>((k - 1) * a + l - 1)] = laguerre_neg<Real>(n + k - l - 1, l + 1);
  }
  const Poly<Real> p = poly_determinant(cells, a).truncated(kappa_d_block_degree(dims));
  // f_min(s)/s^(mn-1) = C e^{-ns} sum_d p_d s^(d + a - mn + 1)
  LogSum<Real> sum;
  for (int d = 0; d <= p.degree(); ++d) {
    sum.add(p[d] * laplace_inv_shifted_power(Real(n), mn - 1 - a - d, y));
  }
  if (cancellation) *cancellation = sum.cancellation();
  SignedLog<Real> r = sum.value();
  r.logmag += log_gamma(Real(mn)) - mn * log(y) + log_factorial<Real>(n) - log_factorial<Real>(n + a - 1);
  return r;
}

}  // namespace

double pdf_via_min_connection(double y, const Dims& dims, Precision precision) {
  require_kappa_d(dims);
  if (!(y > dims.n)) return 0.0;
  bool extended = precision == Precision::extended ||
                  (precision == Precision::automatic && dims.n > kDoublePrecisionMaxN);
  if (!extended) {
    double c = 1.0;
    const SignedLog<double> v = via_min_connection<double>(y, dims, &c);
    if (c <= kDoubleCancellationBudget) return finish(v, "pdf_via_min_connection");
    if (precision == Precision::double_precision) throw PrecisionLossError(budget_message("pdf_via_min_connection", c));
  }
  Extended c = 1;
  return finish_real(via_min_connection<Extended>(Extended(y), dims, &c), "pdf_via_min_connection");
}

// ---------------------------------------------------------------------------
// kappa_E^2

template <class Real>
KappaEPipeline<Real>::KappaEPipeline(const Dims& dims) : dims_(dims) {
  using std::abs;
  require_kappa_e(dims);
  const int n = dims.n;
  const int a = dims.alpha;
  const int size = a + 2;
  log_gamma_mn_ = static_cast<Real>(log_gamma(Extended(dims.mn())));

  // The table is always built in extended precision.
  // Rows i = 1..a+2: columns 1, 2 are L^(2)_{n+i-3}(-sz), L^(3)_{n+i-4}(-sz);
  // column k >= 3 is L^(k-1)_{n+i-k}(-s).
  std::vector<Poly<Extended>> p1(static_cast<std::size_t>(size)), p2(static_cast<std::size_t>(size));
  std::vector<Poly<Extended>> q(static_cast<std::size_t>(size * a));
  for (int i = 1; i <= size; ++i) {
    p1[static_cast<std::size_t>(i - 1)] = laguerre_neg<Extended>(n + i - 3, 2);
    p2[static_cast<std::size_t>(i - 1)] = laguerre_neg<Extended>(n + i - 4, 3);
    for (int k = 3; k <= size; ++k) q[static_cast<std::size_t>((i - 1) * a + (k - 3))] = laguerre_neg<Extended>(n + i - k, k - 1);
  }

  struct Pair {
    Poly<Extended> w, c;
    int sign;
  };
  std::vector<Pair> pairs;
  int deg_w = 0, deg_c = 0;
  for (int r1 = 0; r1 < size; ++r1) {
    for (int r2 = r1 + 1; r2 < size; ++r2) {
      Poly<Extended> w = p1[static_cast<std::size_t>(r1)] * p2[static_cast<std::size_t>(r2)] -
                     p1[static_cast<std::size_t>(r2)] * p2[static_cast<std::size_t>(r1)];
      std::vector<Poly<Extended>> minor;
      for (int i = 0; i < size; ++i) {
        if (i == r1 || i == r2) continue;
        for (int k = 0; k < a; ++k) minor.push_back(q[static_cast<std::size_t>(i * a + k)]);
      }
      Poly<Extended> c = poly_determinant(minor, a);
      if (w.is_zero() || c.is_zero()) continue;
      deg_w = std::max(deg_w, w.degree());
      deg_c = std::max(deg_c, c.degree());
      pairs.push_back({std::move(w), std::move(c), (r1 + r2 + 1) % 2 == 0 ? 1 : -1});
    }
  }

  // T[d1][d2]: coefficient of z^d1 s^(d1+d2).
  std::vector<std::vector<Extended>> t(static_cast<std::size_t>(deg_w + 1), std::vector<Extended>(static_cast<std::size_t>(deg_c + 1), Extended(0)));
  Extended scale = 0;
  for (int d1 = 0; d1 <= deg_w; ++d1) {
    for (int d2 = 0; d2 <= deg_c; ++d2) {
      LogSum<Extended> acc;
      for (const Pair& pr : pairs) {
        SignedLog<Extended> v = pr.w[d1] * pr.c[d2];
        if (pr.sign < 0) v = -v;
        acc.add(v);
      }
      const Extended v = acc.value().to_real();
      t[static_cast<std::size_t>(d1)][static_cast<std::size_t>(d2)] = v;
      scale = std::max(scale, Extended(abs(v)));
    }
  }
  require(scale > 0, "kappa-e: empty block determinant");

  const int dmax = kappa_e_block_degree(dims);
  Extended excess = 0;
  for (int d1 = 0; d1 <= deg_w; ++d1) {
    for (int d2 = 0; d2 <= deg_c; ++d2) {
      if (d1 + d2 > dmax) excess = std::max(excess, Extended(abs(t[static_cast<std::size_t>(d1)][static_cast<std::size_t>(d2)])));
    }
  }
  excess_ = static_cast<double>(excess / scale);

  Extended residual = 0;
  h_.resize(static_cast<std::size_t>(dmax + 1));
  log_gamma_k_.resize(static_cast<std::size_t>(dmax + 1));
  for (int d = 0; d <= dmax; ++d) {
    std::vector<Extended> g;
    for (int e = 0; e <= d && e <= deg_w; ++e) {
      const int d2 = d - e;
      g.push_back(d2 <= deg_c ? t[static_cast<std::size_t>(e)][static_cast<std::size_t>(d2)] : Extended(0));
    }
    // The block vanishes like (1 - z)^(2 alpha); divide that out exactly so
    // that H_d carries no cancellation near z = 1.
    for (int rep = 0; rep < 2 * a && !g.empty(); ++rep) {
      const std::size_t top = g.size() - 1;
      std::vector<Extended> qt(top);
      Extended carry = 0;
      for (std::size_t i = top; i >= 1; --i) {
        carry += g[i];
        qt[i - 1] = carry;
      }
      residual = std::max(residual, Extended(abs(carry + g[0]) / scale));
      g = std::move(qt);
    }
    for (const Extended& v : g) h_[static_cast<std::size_t>(d)].push_back(static_cast<Real>(v));
    log_gamma_k_[static_cast<std::size_t>(d)] = static_cast<Real>(log_gamma(Extended(dims.mn() - 4 - d)));
  }
  residual_ = static_cast<double>(residual);
}

template <class Real>
Real KappaEPipeline<Real>::integrand(double y, double z, Real* abs_value) const {
  using std::abs;
  using std::log;
  if (abs_value) *abs_value = 0;
  const int n = dims_.n;
  const int mn = dims_.mn();
  const Real u = Real(y) - n + Real(z);
  if (!(u > 0) || !(z > 0)) return Real(0);
  const Real zr(z);
  const Real lu = log(u);
  if (dims_.alpha > 0 && !(z < 1)) return Real(0);
  const Real base = log_gamma_mn_ - mn * log(Real(y)) + 2 * log(zr) + dims_.alpha * log(1 - zr);
  LogSum<Real> sum;
  for (std::size_t d = 0; d < h_.size(); ++d) {
    const std::vector<Real>& c = h_[d];
    Real g = 0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) g = g * zr + *it;
    if (g == 0) continue;
    const int k = mn - 4 - static_cast<int>(d);
    SignedLog<Real> term = SignedLog<Real>::from_real(g);
    term.logmag += base + (k - 1) * lu - log_gamma_k_[d];
    sum.add(term);
  }
  if (abs_value) *abs_value = sum.abs_value().to_real();
  return sum.value().to_real();
}

template <class Real>
SignedLog<Real> KappaEPipeline<Real>::evaluate(double y, const QuadratureOptions& quad, double* cancellation) const {
  if (cancellation) *cancellation = 1.0;
  const int n = dims_.n;
  if (!(y > n - 1)) return SignedLog<Real>::zero();
  const double z0 = std::max(0.0, n - y);
  auto f = [&](double z) { return static_cast<double>(integrand(y, z)); };
  const double v = integrate_finite(f, z0, 1.0, quad);
  if (cancellation) {
    auto fa = [&](double z) {
      Real av = 0;
      integrand(y, z, &av);
      return static_cast<double>(av);
    };
    const double va = integrate_fixed(fa, z0, 1.0, 32);
    *cancellation = v == 0.0 ? std::numeric_limits<double>::infinity() : va / std::abs(v);
  }
  return SignedLog<Real>::from_real(Real(v));
}

namespace {

std::mutex kappa_e_mu;
std::map<std::pair<int, int>, std::unique_ptr<KappaEPipeline<double>>> kappa_e_double;
std::map<std::pair<int, int>, std::unique_ptr<KappaEPipeline<Extended>>> kappa_e_ext;

}  // namespace

double pdf_kappa_e(double y, const Dims& dims, const KappaEOptions& opt, EvalInfo* info) {
  require_kappa_e(dims);
  require(dims.alpha <= opt.alpha_cap, "kappa-e: alpha = " + std::to_string(dims.alpha) + " above the cap " +
                                           std::to_string(opt.alpha_cap));
  if (info) *info = {Precision::double_precision, 1.0};
  if (!(y > dims.n - 1)) return 0.0;
  bool extended = opt.precision == Precision::extended ||
                  (opt.precision == Precision::automatic && dims.n > kDoublePrecisionMaxN);
  if (!extended) {
    const auto& p = cached(kappa_e_double, kappa_e_mu, dims, [&] { return std::make_unique<KappaEPipeline<double>>(dims); });
    double c = 1.0;
    const SignedLog<double> v = p.evaluate(y, opt.quad, &c);
    if (c <= kDoubleCancellationBudget) {
      if (info) info->cancellation = c;
      return finish(v, "pdf_kappa_e");
    }
    if (opt.precision == Precision::double_precision) throw PrecisionLossError(budget_message("pdf_kappa_e", c));
  }
  const auto& p = cached(kappa_e_ext, kappa_e_mu, dims, [&] { return std::make_unique<KappaEPipeline<Extended>>(dims); });
  double c = 1.0;
  const SignedLog<Extended> v = p.evaluate(y, opt.quad, &c);
  if (info) *info = {Precision::extended, c};
  return finish_real(v, "pdf_kappa_e");
}

namespace {

// A_ij (j + 1 - i) (i + j + 2)! of the square-case double sums.
template <class Real>
SignedLog<Real> square_case_weight(int n, int i, int j) {
  if (j + 1 - i == 0) return SignedLog<Real>::zero();
  SignedLog<Real> w = pochhammer(Real(-n + 1), i) * pochhammer(Real(-n + 2), j) /
                      (pochhammer(Real(3), i) * pochhammer(Real(4), j));
  w.logmag += log_factorial<Real>(i + j + 2) - log_factorial<Real>(i) - log_factorial<Real>(j);
  return w * SignedLog<Real>::from_real(Real(j + 1 - i));
}

}  // namespace

template <class Real>
Real pdf_kappa_e_closed(const Real& y, int n, Real* cancellation) {
  using std::log;
  require(n >= 3, "kappa-e closed form needs n >= 3");
  if (!(y > n - 1)) return Real(0);
  const int n2 = n * n;
  const Real ly = log(y);
  const bool second = y > n;
  LogSum<Real> sum;
  for (int i = 0; i <= n - 1; ++i) {
    for (int j = 0; j <= n - 2; ++j) {
      const SignedLog<Real> w = square_case_weight<Real>(n, i, j);
      if (w.is_zero()) continue;
      const int p = i + j + 2;
      for (int k = 0; k <= p; ++k) {
        SignedLog<Real> t = w * laplace_inv_shifted_power(Real(n - 1), n2 + k - i - j - 3, y);
        t.logmag -= log_factorial<Real>(p - k);
        if ((i + j + k) % 2 != 0) t = -t;
        sum.add(t);
      }
      if (second) sum.add(-(w * laplace_inv_shifted_power(Real(n), n2 - 1, y)));
    }
  }
  if (cancellation) *cancellation = sum.cancellation();
  SignedLog<Real> r = sum.value();
  r.logmag += log_gamma(Real(n2)) - log(Real(12)) + log(Real(n2)) + log(Real(n2 - 1)) - n2 * ly;
  return r.to_real();
}

template <class Real>
Real pdf_lambda2_closed(const Real& x, int n, Real* cancellation) {
  using std::abs;
  using std::exp;
  using std::log;
  require(n >= 3, "lambda-2 closed form needs n >= 3");
  if (!(x > 0)) return Real(0);
  LogSum<Real> sum;
  for (int i = 0; i <= n - 1; ++i) {
    for (int j = 0; j <= n - 2; ++j) {
      const SignedLog<Real> w = square_case_weight<Real>(n, i, j);
      if (w.is_zero()) continue;
      const int p = i + j + 2;
      // sum_k (-1)^(i+j+k) x^(p-k)/(p-k)! - e^-x, i.e. the degree-p Taylor
      // polynomial of e^-x minus e^-x. For x < 1 the same value is summed as
      // minus the tail of the series.
      Real bracket = 0;
      if (x < 1) {
        Real term = 1;
        for (int r = 1; r <= p; ++r) term *= -x / r;
        for (int r = p + 1; r < p + 400; ++r) {
          term *= -x / r;
          bracket -= term;
          if (abs(term) < epsilon_of<Real>() * abs(bracket)) break;
        }
      } else {
        Real term = 1;
        bracket = 1;
        for (int r = 1; r <= p; ++r) {
          term *= -x / r;
          bracket += term;
        }
        bracket -= exp(-x);
      }
      sum.add(w * SignedLog<Real>::from_real(bracket));
    }
  }
  if (cancellation) *cancellation = sum.cancellation();
  SignedLog<Real> r = sum.value();
  const int n2 = n * n;
  r.logmag += -log(Real(12)) + log(Real(n2)) + log(Real(n2 - 1)) - (n - 1) * x;
  return r.to_real();
}

namespace {

// D(t, z) (1 - z)^-alpha for the (alpha+2)-square Laguerre block with
// columns L^(2)_{n+i-3}(-tz), L^(3)_{n+i-4}(-tz), V_k = L^(k-1)_{n+i-k}(-t).
// With x = t(z - 1), columns 1 and 2 are sum_tau x^tau/tau! V_{3+tau} and
// sum_tau x^tau/tau! V_{4+tau}. Close to z = 1 the components along the
// real columns V_3..V_{alpha+2} are dropped and the leading V_{alpha+3}
// term is eliminated between the two, leaving D = x^(2 alpha) det[R1, R2, V].
class Lambda2Block {
 public:
  explicit Lambda2Block(const Dims& dims) : n_(dims.n), a_(dims.alpha), size_(dims.alpha + 2) {
    const std::size_t s = static_cast<std::size_t>(size_);
    cells_.resize(s * s);
    for (int i = 1; i <= size_; ++i) {
      cell(i, 1) = laguerre_real<double>(n_ + i - 3, 2);
      cell(i, 2) = laguerre_real<double>(n_ + i - 4, 3);
      for (int k = 3; k <= size_; ++k) cell(i, k) = laguerre_real<double>(n_ + i - k, k - 1);
    }
    if (a_ > 0) {
      virt_.resize(s);
      for (int i = 1; i <= size_; ++i) {
        for (int k = a_ + 3; n_ + i - k >= 0; ++k) virt_[static_cast<std::size_t>(i - 1)].push_back(laguerre_real<double>(n_ + i - k, k - 1));
      }
      for (int k = a_ + 3; k <= n_ + size_; ++k) {
        const double r = k - a_ - 3;
        w2_.push_back(std::exp(-lfact(k - 4)));
        w1_.push_back((-1.0 - r) / a_ * std::exp(-lfact(k - 2)));
      }
    }
  }

  // Values of the z-independent columns at t.
  struct AtT {
    double t;
    MatrixX<double> fixed;                  // columns 3..alpha+2
    std::vector<std::vector<double>> virt;  // V_k(-t), k >= alpha+3, per row
  };

  AtT at(double t) const {
    AtT c{t, MatrixX<double>(size_, size_), {}};
    for (int i = 1; i <= size_; ++i) {
      for (int k = 3; k <= size_; ++k) c.fixed(i - 1, k - 1) = horner(cell(i, k), -t);
    }
    c.virt.resize(virt_.size());
    for (std::size_t i = 0; i < virt_.size(); ++i) {
      for (const auto& p : virt_[i]) c.virt[i].push_back(horner(p, -t));
    }
    return c;
  }

  SignedLog<double> det_scaled(double t, double z) const { return det_scaled(at(t), z); }

  SignedLog<double> det_scaled(const AtT& c, double z) const {
    const double t = c.t;
    MatrixX<double> m = c.fixed;
    const double w = 1.0 - z;
    const bool near_one = a_ > 0 && w * (n_ + a_) * std::min(1.0, t / 3.0) < 1.0;
    if (!near_one) {
      for (int i = 1; i <= size_; ++i) {
        m(i - 1, 0) = horner(cell(i, 1), -t * z);
        m(i - 1, 1) = horner(cell(i, 2), -t * z);
      }
      SignedLog<double> d = det_general(m);
      if (a_ > 0) d.logmag -= a_ * std::log(w);
      return d;
    }
    if (t == 0 || w == 0) return SignedLog<double>::zero();
    const double x = -t * w;
    for (int i = 1; i <= size_; ++i) {
      // R1 = sum_{k >= a+4} x^(k-a-4) (a+3-k) / (a (k-3)!) V_k
      // R2 = sum_{k >= a+3} x^(k-a-3) / (k-4)! V_k
      const auto& v = c.virt[static_cast<std::size_t>(i - 1)];
      double r1 = 0.0, r2 = 0.0, pw = 1.0;
      for (std::size_t r = 0; r < v.size(); ++r) {
        r2 += pw * w2_[r] * v[r];
        if (r + 1 < v.size()) r1 += pw * w1_[r] * v[r + 1];
        pw *= x;
      }
      m(i - 1, 0) = r1;
      m(i - 1, 1) = r2;
    }
    // D (1-z)^-a = x^(2a) (1-z)^-a det = t^(2a) (1-z)^a det
    SignedLog<double> d = det_general(m);
    d.logmag += 2 * a_ * std::log(t) + a_ * std::log(w);
    return d;
  }

  // int_0^1 z^2 e^{-(1-z)t} D(t, z) (1-z)^-alpha dz
  double integral(double t, const QuadratureOptions& quad) const {
    const AtT c = at(t);
    auto f = [&](double z) {
      SignedLog<double> d = det_scaled(c, z);
      if (d.is_zero()) return 0.0;
      d.logmag += 2.0 * std::log(z) - (1.0 - z) * t;
      return d.to_real();
    };
    return integrate_finite(f, 0.0, 1.0, quad);
  }

 private:
  std::vector<double>& cell(int i, int k) { return cells_[static_cast<std::size_t>((i - 1) * size_ + k - 1)]; }
  const std::vector<double>& cell(int i, int k) const {
    return cells_[static_cast<std::size_t>((i - 1) * size_ + k - 1)];
  }

  int n_, a_, size_;
  std::vector<std::vector<double>> cells_;
  std::vector<std::vector<std::vector<double>>> virt_;
  std::vector<double> w1_, w2_;  // series weights of R1, R2
};

}  // namespace

SignedLog<double> lambda2_block_det_scaled(double t, double z, const Dims& dims) {
  require_kappa_e(dims);
  require(z >= 0 && z < 1, "block determinant: z must lie in [0, 1)");
  return Lambda2Block(dims).det_scaled(t, z);
}

double lambda2_block_integral(double t, const Dims& dims, const QuadratureOptions& quad) {
  require_kappa_e(dims);
  require(t >= 0, "block integral: t must be nonnegative");
  return Lambda2Block(dims).integral(t, quad);
}

double pdf_lambda2(double x, const Dims& dims, Lambda2Mode mode, const QuadratureOptions& quad) {
  require_kappa_e(dims);
  if (mode == Lambda2Mode::automatic) mode = dims.alpha == 0 ? Lambda2Mode::closed : Lambda2Mode::integral;
  if (mode == Lambda2Mode::closed) require(dims.alpha == 0, "lambda-2 closed form exists for alpha = 0 only");
  if (!(x > 0)) return 0.0;
  if (mode == Lambda2Mode::closed) {
    double c = 1.0;
    const double v = pdf_lambda2_closed<double>(x, dims.n, &c);
    if (c <= kDoubleCancellationBudget) return v;
    return static_cast<double>(pdf_lambda2_closed<Extended>(Extended(x), dims.n));
  }
  const double j = Lambda2Block(dims).integral(x, quad);
  return std::exp(3.0 * std::log(x) - (dims.n - 1) * x) * j;
}

double mgf_kappa_e(double s, const Dims& dims, const QuadratureOptions& quad) {
  require_kappa_e(dims);
  require(s >= 0, "mgf: s must be nonnegative");
  const Lambda2Block block(dims);
  const int n = dims.n;
  const int mn = dims.mn();
  QuadratureOptions inner = quad;
  inner.rel_tol = std::min(quad.rel_tol, 1e-12);
  auto f = [&](double x) -> double {
    if (x <= 0) return 0.0;
    const double t = x + s;
    const double j = block.integral(t, inner);
    return std::exp((mn - 1) * std::log(x) - (n - 1) * t - (mn - 4) * std::log(t)) * j;
  };
  return integrate_semi_infinite(f, n - 1, quad);
}

namespace {

using PlainPoly = std::vector<Extended>;

PlainPoly plain_mul(const PlainPoly& p, const PlainPoly& q) {
  if (p.empty() || q.empty()) return {};
  PlainPoly r(p.size() + q.size() - 1, Extended(0));
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0) continue;
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  }
  return r;
}

void plain_add(PlainPoly& acc, const PlainPoly& p, int sign) {
  if (acc.size() < p.size()) acc.resize(p.size(), Extended(0));
  for (std::size_t i = 0; i < p.size(); ++i) acc[i] += sign > 0 ? p[i] : Extended(-p[i]);
}

// Cofactor expansion along the first column; sizes stay below 7 here.
PlainPoly plain_det(const std::vector<PlainPoly>& cells, const std::vector<int>& rows, const std::vector<int>& cols,
                    int size) {
  if (cols.size() == 1) return cells[static_cast<std::size_t>(rows[0] * size + cols[0])];
  PlainPoly acc;
  const std::vector<int> rest(cols.begin() + 1, cols.end());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const PlainPoly& head = cells[static_cast<std::size_t>(rows[r] * size + cols[0])];
    if (head.empty()) continue;
    std::vector<int> sub;
    for (std::size_t q = 0; q < rows.size(); ++q) {
      if (q != r) sub.push_back(rows[q]);
    }
    plain_add(acc, plain_mul(head, plain_det(cells, sub, rest, size)), r % 2 == 0 ? 1 : -1);
  }
  return acc;
}

}  // namespace

double pdf_via_lambda2_connection(double y, const Dims& dims, const QuadratureOptions& quad) {
  require_kappa_e(dims);
  const int n = dims.n;
  const int a = dims.alpha;
  const int mn = dims.mn();
  const int size = a + 2;
  if (!(y > n - 1)) return 0.0;
  // Monomial coefficients of L^(rho)_N(-s) in s.
  std::vector<PlainPoly> base(static_cast<std::size_t>(size * size));
  for (int i = 1; i <= size; ++i) {
    for (int c = 1; c <= size; ++c) {
      const int N = c <= 2 ? n + i - c - 2 : n + i - c;
      const int rho = c <= 2 ? c + 1 : c - 1;
      if (N < 0) continue;
      const Poly<Extended> p = laguerre_coeffs<Extended>(N, rho).scaled_argument(Extended(-1));
      PlainPoly& out = base[static_cast<std::size_t>((i - 1) * size + c - 1)];
      for (int d = 0; d <= p.degree(); ++d) out.push_back(p[d].to_real());
    }
  }
  const int dmax = kappa_e_block_degree(dims);
  std::vector<Extended> lgk(static_cast<std::size_t>(dmax) + 1);
  for (int d = 0; d <= dmax; ++d) lgk[static_cast<std::size_t>(d)] = log_gamma(Extended(mn - 4 - d));
  const Extended lead = log_gamma(Extended(mn)) - mn * log(Extended(y));
  std::vector<int> idx(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) idx[static_cast<std::size_t>(i)] = i;
  // Evaluated in extended precision: the determinant vanishes like
  // (1 - z)^(2 alpha) and is divided by (1 - z)^alpha.
  auto f = [&](double z) -> double {
    if (z >= 1.0 || z <= 0.0) return 0.0;
    const Extended ze(z);
    const Extended u = Extended(y) - n + ze;
    if (!(u > 0)) return 0.0;
    std::vector<PlainPoly> cells(base);
    for (int i = 0; i < size; ++i) {
      for (int c = 0; c < 2; ++c) {
        Extended pw = 1;
        for (Extended& v : cells[static_cast<std::size_t>(i * size + c)]) {
          v *= pw;
          pw *= ze;
        }
      }
    }
    // f_lambda2(s) / s^(mn-1) carries s^3 s^d e^{-(n-z)s} / s^(mn-1); each
    // power inverts to (y - n + z)^(mn-5-d) / Gamma(mn-4-d).
    const PlainPoly det = plain_det(cells, idx, idx, size);
    const Extended lu = log(u);
    Extended sum = 0;
    for (int d = 0; d <= dmax && d < static_cast<int>(det.size()); ++d) {
      if (det[static_cast<std::size_t>(d)] == 0) continue;
      sum += det[static_cast<std::size_t>(d)] * exp((mn - 5 - d) * lu - lgk[static_cast<std::size_t>(d)] + lead);
    }
    return static_cast<double>(sum * ze * ze / pow(1 - ze, a));
  };
  const double z0 = std::max(0.0, n - y);
  return integrate_finite(f, z0, 1.0, quad);
}

// ---------------------------------------------------------------------------
// Proof integrals

namespace {

// Gauss rule for the weight y^2 e^-y on (0, inf) by Golub-Welsch.
std::pair<std::vector<double>, std::vector<double>> gauss_laguerre_rho2(int order) {
  const double rho = 2.0;
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(order, order);
  for (int k = 0; k < order; ++k) {
    jac(k, k) = 2.0 * k + rho + 1.0;
    if (k + 1 < order) {
      const double b = std::sqrt((k + 1.0) * (k + 1.0 + rho));
      jac(k, k + 1) = b;
      jac(k + 1, k) = b;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  std::vector<double> x(static_cast<std::size_t>(order)), w(static_cast<std::size_t>(order));
  for (int i = 0; i < order; ++i) {
    x[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    w[static_cast<std::size_t>(i)] = 2.0 * v0 * v0;  // Gamma(3) = 2
  }
  return {x, w};
}

template <class G>
double tensor_laguerre(int n, G&& g) {
  const auto [x, w] = gauss_laguerre_rho2(12);
  const int m = static_cast<int>(x.size());
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  std::vector<double> pts(static_cast<std::size_t>(n));
  double total = 0.0;
  for (;;) {
    double weight = 1.0;
    for (int i = 0; i < n; ++i) {
      pts[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
      weight *= w[static_cast<std::size_t>(idx[static_cast<std::size_t>(i)])];
    }
    const double d = vandermonde_value<double>(pts);
    total += weight * d * d * g(pts);
    int pos = 0;
    while (pos < n && ++idx[static_cast<std::size_t>(pos)] == m) idx[static_cast<std::size_t>(pos++)] = 0;
    if (pos == n) break;
  }
  return total;
}

double log_q0(int n) {
  double r = 0.0;
  for (int j = 0; j < n; ++j) r += lfact(1 + j) + lfact(2 + j);
  return r;
}

}  // namespace

double q_integral_oracle(int n, int alpha, double z) {
  require(n >= 1 && n <= 3, "q oracle: n must be 1, 2 or 3");
  require(alpha >= 0 && alpha <= 4, "q oracle: alpha must be in 0..4");
  return tensor_laguerre(n, [&](const std::vector<double>& y) {
    double p = 1.0;
    for (double v : y) p *= std::pow(z - v, alpha);
    return p;
  });
}

double r_integral_oracle(int n, double a, double b, int alpha) {
  require(n >= 1 && n <= 3, "r oracle: n must be 1, 2 or 3");
  require(alpha >= 0 && alpha <= 4, "r oracle: alpha must be in 0..4");
  return tensor_laguerre(n, [&](const std::vector<double>& x) {
    double p = 1.0;
    for (double v : x) p *= (a - v) * (a - v) * std::pow(b - v, alpha);
    return p;
  });
}

double q_closed_form(int n, int alpha, double z) {
  require(n >= 1 && alpha >= 0, "q closed form: need n >= 1, alpha >= 0");
  MatrixX<double> m(alpha, alpha);
  for (int k = 0; k < alpha; ++k) {
    for (int l = 0; l < alpha; ++l) {
      m(k, l) = horner(laguerre_real<double>(n + k - l, 2 + l), z);
    }
  }
  SignedLog<double> d = det_general(m);
  d.logmag += log_q0(n);
  for (int j = 0; j < alpha; ++j) d.logmag += lfact(n + j) - lfact(j);
  if ((n * alpha) % 2 != 0) d = -d;
  return d.to_real();
}

double r_closed_form(int n, double a, double b, int alpha) {
  require(n >= 1 && alpha >= 0, "r closed form: need n >= 1, alpha >= 0");
  require(alpha == 0 || a != b, "r closed form: a and b must differ");
  const int size = alpha + 2;
  MatrixX<double> m(size, size);
  for (int i = 1; i <= size; ++i) {
    for (int j = 1; j <= 2; ++j) {
      const int N = n + i - j;
      m(i - 1, j - 1) = N < 0 ? 0.0 : horner(laguerre_real<double>(N, j + 1), a);
    }
    for (int k = 3; k <= size; ++k) {
      const int N = n + i - k + 2;
      m(i - 1, k - 1) = N < 0 ? 0.0 : horner(laguerre_real<double>(N, k - 1), b);
    }
  }
  SignedLog<double> d = det_general(m);
  d.logmag += log_q0(n) - 2.0 * alpha * std::log(std::abs(a - b));
  for (int j = 0; j <= alpha + 1; ++j) d.logmag += lfact(n + j);
  for (int j = 0; j < alpha; ++j) d.logmag -= lfact(j);
  if ((n * alpha) % 2 != 0) d = -d;
  return d.to_real();
}

template class KappaDTermTable<double>;
template class KappaDTermTable<Extended>;
template class KappaEPipeline<double>;
template class KappaEPipeline<Extended>;
template SignedLog<double> laplace_inv_shifted_power(const double&, int, const double&);
template SignedLog<Extended> laplace_inv_shifted_power(const Extended&, int, const Extended&);
template SignedLog<double> pdf_kappa_d_closed(const double&, const Dims&);
template SignedLog<Extended> pdf_kappa_d_closed(const Extended&, const Dims&);
template double pdf_kappa_e_closed(const double&, int, double*);
template Extended pdf_kappa_e_closed(const Extended&, int, Extended*);
template double pdf_lambda2_closed(const double&, int, double*);
template Extended pdf_lambda2_closed(const Extended&, int, Extended*);

}  // namespace demmel
