#include "demmel/asymptotic.hpp"

#include "demmel/determinant.hpp"
#include "demmel/error.hpp"
#include "demmel/special.hpp"

#include <array>
#include <cmath>
#include <vector>

namespace demmel {

namespace {

using Cell = SignedLog<double>;

double lfact(int k) { return log_factorial<double>(k); }

// c(a, j, q) = sum_{p=q}^{a} S(p, q) C(a, p) j^(a-p), tabulated for small
// indices.
double coef_direct(int a, int j, int q) {
  double c = 0.0;
  for (int p = q; p <= a; ++p) {
    c += static_cast<double>(stirling2(p, q)) * static_cast<double>(binomial(a, p)) * std::pow(double(j), a - p);
  }
  return c;
}

constexpr int kCoefA = 8, kCoefJ = 48;

const std::vector<double>& coef_table() {
  static const std::vector<double> table = [] {
    std::vector<double> t(static_cast<std::size_t>(kCoefA * kCoefJ * kCoefA), 0.0);
    for (int a = 0; a < kCoefA; ++a) {
      for (int j = 0; j < kCoefJ; ++j) {
        for (int q = 0; q <= a; ++q) t[static_cast<std::size_t>((a * kCoefJ + j) * kCoefA + q)] = coef_direct(a, j, q);
      }
    }
    return t;
  }();
  return table;
}

double coef(int a, int j, int q) {
  if (a < kCoefA && j < kCoefJ) return coef_table()[static_cast<std::size_t>((a * kCoefJ + j) * kCoefA + q)];
  return coef_direct(a, j, q);
}

// log I_nu(2 rho) for nu = 0..top; empty for rho = 0. The two highest orders
// come from the series, the rest from I_{nu-1} = I_{nu+1} + (nu / rho) I_nu,
// which only adds positive terms going down.
std::vector<double> bessel_logs(double rho, int top) {
  std::vector<double> out;
  if (rho <= 0) return out;
  top = std::max(top, 1);
  out.resize(static_cast<std::size_t>(top) + 1);
  const double hi = bessel_i_log<double>(top, 2.0 * rho).logmag;
  const double lo = bessel_i_log<double>(top - 1, 2.0 * rho).logmag;
  out[static_cast<std::size_t>(top)] = hi;
  out[static_cast<std::size_t>(top - 1)] = lo;
  // scaled values relative to exp(shift)
  double shift = lo;
  double next = std::exp(hi - shift), cur = 1.0;
  for (int nu = top - 1; nu >= 1; --nu) {
    const double prev = next + (nu / rho) * cur;
    next = cur;
    cur = prev;
    if (cur > 1e250) {
      shift += std::log(cur);
      next /= cur;
      cur = 1.0;
    }
    out[static_cast<std::size_t>(nu - 1)] = shift + std::log(cur);
  }
  return out;
}

Cell g_entry(int i, int j, double rho, const std::vector<double>& logi) {
  if (rho <= 0) return Cell::from_real(std::pow(double(j), i - 1) / std::exp(lfact(j + 1)));
  const double lr = std::log(rho);
  LogSum<double> acc;
  for (int q = 0; q < i; ++q) {
    const double c = coef(i - 1, j, q);
    if (c == 0) continue;
    acc.add({1, std::log(c) + (q - j - 1) * lr + logi[static_cast<std::size_t>(q + j + 1)]});
  }
  return acc.value();
}

// Determinant of a matrix of log-form cells, columns rescaled to unit size.
Cell det_cells(const std::vector<Cell>& cells, int size) {
  MatrixX<double> m(size, size);
  double shift = 0.0;
  for (int c = 0; c < size; ++c) {
    double top = -std::numeric_limits<double>::infinity();
    for (int r = 0; r < size; ++r) {
      const Cell& x = cells[static_cast<std::size_t>(r * size + c)];
      if (!x.is_zero()) top = std::max(top, x.logmag);
    }
    if (!std::isfinite(top)) return Cell::zero();
    for (int r = 0; r < size; ++r) {
      const Cell& x = cells[static_cast<std::size_t>(r * size + c)];
      m(r, c) = x.is_zero() ? 0.0 : x.sign * std::exp(x.logmag - top);
    }
    shift += top;
  }
  Cell d = det_general(m);
  if (!d.is_zero()) d.logmag += shift;
  return d;
}

double finish_density(const Cell& v) {
  if (v.is_zero()) return 0.0;
  if (v.logmag > 709.0) throw OverflowError("asymptotic density overflows");
  return v.to_real();
}

// Determinant columns for kappa_E at w = 1/(mu v). u_[i-1][j-1] = g_{i,j}(1, v)
// e^{-m_i} holds the fixed columns j = 1..alpha and the extra ones needed for
// the expansion about z = 1; row i is scaled by e^{-m_i}, m_i = log g_{i,1}(1, v).
class KappaEBlock {
 public:
  static constexpr int kExtra = 30;

  KappaEBlock(int alpha, double w) : a_(alpha), w_(w), size_(alpha + 2), jmax_(alpha + 1 + kExtra) {
    const double rho = std::sqrt(w);
    const auto logi = bessel_logs(rho, size_ + jmax_);
    u_.assign(static_cast<std::size_t>(size_), std::vector<double>(static_cast<std::size_t>(jmax_), 0.0));
    m_.resize(static_cast<std::size_t>(size_));
    for (int i = 1; i <= size_; ++i) {
      const double top = g_entry(i, 1, rho, logi).logmag;
      m_[static_cast<std::size_t>(i - 1)] = top;
      for (int j = 1; j <= jmax_; ++j) {
        const Cell g = g_entry(i, j, rho, logi);
        u(i, j) = g.is_zero() ? 0.0 : std::exp(g.logmag - top);
      }
    }
    for (double v : m_) shift_ += v;
    c1_.assign(static_cast<std::size_t>(jmax_) + 1, 0.0);
    c2_.assign(static_cast<std::size_t>(jmax_) + 1, 0.0);
    for (int j = a_ + 1; j <= jmax_ && a_ > 0; ++j) {
      c2_[static_cast<std::size_t>(j)] = std::exp(-lfact(j - 2));
      c1_[static_cast<std::size_t>(j)] = -double(j - a_) / a_ * std::exp(-lfact(j));
    }
  }

  Cell det_scaled(double z) const { return with_shift(det_rows(z)); }
  double log_scale() const { return shift_; }

  // int_0^1 z^2 D (1-z)^-alpha dz
  Cell integral(const QuadratureOptions& quad) const {
    auto f = [&](double z) {
      if (z <= 0) return 0.0;
      return z * z * det_rows(z);
    };
    return with_shift(integrate_finite(f, 0.0, 1.0, quad));
  }

 private:
  double& u(int i, int j) { return u_[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }
  double u(int i, int j) const { return u_[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(j - 1)]; }

  Cell with_shift(double v) const {
    Cell c = Cell::from_real(v);
    if (!c.is_zero()) c.logmag += shift_;
    return c;
  }

  // D (1 - z)^-alpha with row i divided by e^{m_i}.
  double det_rows(double z) const {
    const double w1 = 1.0 - z;
    if (a_ > 0 && !(w1 > 0)) return 0.0;
    MatrixX<double> m(size_, size_);
    for (int i = 1; i <= size_; ++i) {
      for (int k = 3; k <= size_; ++k) m(i - 1, k - 1) = u(i, k - 2);
    }
    const bool near_one = a_ > 0 && w1 * std::min(w_, std::sqrt(w_)) < 2.0;
    if (!near_one) {
      const double rho = std::sqrt(z * w_);
      const auto logi = bessel_logs(rho, size_ + 3);
      for (int i = 1; i <= size_; ++i) {
        for (int c = 1; c <= 2; ++c) {
          const Cell g = g_entry(i, c, rho, logi);
          m(i - 1, c - 1) = g.is_zero() ? 0.0 : std::exp(g.logmag - m_[static_cast<std::size_t>(i - 1)]);
        }
      }
      return det_general(m).to_real() * std::pow(w1, -a_);
    }
    // Columns 1 and 2 are sum_tau x^tau / tau! u_{1+tau} and u_{2+tau} with
    // x = w (z - 1). Removing u_1..u_alpha and the u_{alpha+1} component
    // leaves x^(2 alpha) det[R1, R2, u_1..u_alpha]:
    // R1 = sum_{j >= a+2} x^(j-a-2) (a+1-j) / (a (j-1)!) u_j
    // R2 = sum_{j >= a+1} x^(j-a-1) / (j-2)! u_j
    const double x = -w_ * w1;
    for (int i = 1; i <= size_; ++i) {
      double r1 = 0.0, r2 = 0.0, pw = 1.0;
      for (int j = a_ + 1; j <= jmax_; ++j) {
        r2 += pw * c2_[static_cast<std::size_t>(j)] * u(i, j);
        if (j + 1 <= jmax_) r1 += pw * c1_[static_cast<std::size_t>(j)] * u(i, j + 1);
        pw *= x;
      }
      m(i - 1, 0) = r1;
      m(i - 1, 1) = r2;
    }
    // D (1-z)^-a = x^(2a) (1-z)^-a det = w^(2a) (1-z)^a det
    return det_general(m).to_real() * std::pow(w_, 2 * a_) * std::pow(w1, a_);
  }

  int a_;
  double w_;
  int size_, jmax_;
  std::vector<std::vector<double>> u_;
  std::vector<double> m_;
  std::vector<double> c1_, c2_;  // series weights of R1, R2
  double shift_ = 0.0;
};

}  // namespace

ScaledParams make_scaled(int alpha, double mu) {
  require(alpha >= 0, "alpha must be nonnegative");
  require(mu > 0 && std::isfinite(mu), "mu must be positive");
  return {alpha, mu};
}

SignedLog<double> asym_g_entry(int i, int j, double rho) {
  require(i >= 1 && j >= 1, "g entry: indices start at 1");
  require(rho >= 0, "g entry: rho must be nonnegative");
  return g_entry(i, j, rho, bessel_logs(rho, i + j + 1));
}

double pdf_v_kappa_d(double v, const ScaledParams& p, AsymKappaDMode mode, int alpha_cap) {
  require(p.mu > 0, "mu must be positive");
  const int a = p.alpha;
  if (mode == AsymKappaDMode::automatic) mode = a <= 2 ? AsymKappaDMode::closed : AsymKappaDMode::determinant;
  if (mode == AsymKappaDMode::closed) require(a <= 2, "asymptotic kappa-d closed form exists for alpha <= 2 only");
  if (mode == AsymKappaDMode::determinant) {
    require(a <= alpha_cap, "asymptotic kappa-d: alpha = " + std::to_string(a) + " above the cap " +
                                std::to_string(alpha_cap));
  }
  if (!(v > 0)) return 0.0;
  const double w = 1.0 / (p.mu * v);
  const double r = std::sqrt(w);
  // e^{-1/(mu v)} / (mu v^2) = mu w^2 e^{-w}
  Cell lead{1, std::log(p.mu) + 2.0 * std::log(w) - w};
  if (a == 0) return finish_density(lead);
  if (mode == AsymKappaDMode::closed) {
    const auto li = bessel_logs(r, 4);
    if (a == 1) return finish_density(lead * Cell{1, li[2]});
    // I2 I4 - I3^2 + sqrt(mu v) I2 I3
    LogSum<double> acc;
    acc.add({1, li[2] + li[4]});
    acc.add({-1, 2.0 * li[3]});
    acc.add({1, li[2] + li[3] - std::log(r)});
    return finish_density(lead * acc.value());
  }
  // Entry (k, l) is r^2 g_{k,l}(1, v).
  const auto li = bessel_logs(r, 2 * a + 1);
  std::vector<Cell> cells(static_cast<std::size_t>(a * a));
  for (int k = 1; k <= a; ++k) {
    for (int l = 1; l <= a; ++l) {
      Cell e = g_entry(k, l, r, li);
      if (!e.is_zero()) e.logmag += 2.0 * std::log(r);
      cells[static_cast<std::size_t>((k - 1) * a + l - 1)] = e;
    }
  }
  return finish_density(lead * det_cells(cells, a));
}

double cdf_v_kappa_d_alpha0(double v, double mu) {
  require(mu > 0, "mu must be positive");
  if (!(v > 0)) return 0.0;
  return std::exp(-1.0 / (mu * v));
}

SignedLog<double> asym_block_det_scaled(double z, double w, int alpha) {
  require(alpha >= 0, "alpha must be nonnegative");
  require(w > 0, "w must be positive");
  require(z >= 0 && z <= 1, "z must lie in [0, 1]");
  return KappaEBlock(alpha, w).det_scaled(z);
}

template <class Real>
Real pdf_v_kappa_e_closed(const Real& v, const Real& mu, Real* cancellation) {
  using std::log;
  if (!(v > 0)) return Real(0);
  const Real w = 1 / (mu * v);
  const Real x = 4 * w;
  const std::array<Real, 2> a1{Real(3), Real(7) / 2};
  const std::array<Real, 3> b1{Real(4), Real(4), Real(6)};
  const std::array<Real, 1> a2{Real(7) / 2};
  const std::array<Real, 2> b2{Real(5), Real(7)};
  const std::array<Real, 3> a3{Real(7) / 2, Real(4), Real(4)};
  const std::array<Real, 4> b3{Real(3), Real(5), Real(5), Real(7)};
  LogSum<Real> acc;
  SignedLog<Real> t1 = pfq_log<Real>(a1, b1, x);
  t1.logmag += log(Real(16));
  acc.add(t1);
  SignedLog<Real> t2 = pfq_log<Real>(a2, b2, x);
  t2.logmag += log(x);
  acc.add(-t2);
  SignedLog<Real> t3 = pfq_log<Real>(a3, b3, x);
  t3.logmag += log(3 * w);
  acc.add(t3);
  if (cancellation) *cancellation = acc.cancellation();
  SignedLog<Real> r = acc.value();
  if (r.is_zero()) return Real(0);
  // e^{-1/(mu v)} / (576 mu^4 v^5) = mu w^5 e^{-w} / 576
  r.logmag += log(mu) + 5 * log(w) - w - log(Real(576));
  return r.to_real();
}

double pdf_v_kappa_e(double v, const ScaledParams& p, const AsymKappaEOptions& opt) {
  require(p.mu > 0, "mu must be positive");
  const int a = p.alpha;
  AsymKappaEMode mode = opt.mode;
  if (mode == AsymKappaEMode::automatic) mode = a == 0 ? AsymKappaEMode::closed : AsymKappaEMode::integral;
  if (mode == AsymKappaEMode::closed) require(a == 0, "asymptotic kappa-e closed form exists for alpha = 0 only");
  if (mode == AsymKappaEMode::integral) {
    require(a <= opt.alpha_cap, "asymptotic kappa-e: alpha = " + std::to_string(a) + " above the cap " +
                                    std::to_string(opt.alpha_cap));
  }
  if (!(v > 0)) return 0.0;
  if (mode == AsymKappaEMode::closed) {
    double c = 1.0;
    const double f = pdf_v_kappa_e_closed<double>(v, p.mu, &c);
    if (c <= kDoubleCancellationBudget) return f;
    return static_cast<double>(pdf_v_kappa_e_closed<Extended>(Extended(v), Extended(p.mu)));
  }
  const double w = 1.0 / (p.mu * v);
  const KappaEBlock block(a, w);
  // e^{-1/(mu v)} / (mu^4 v^5) = mu w^5 e^{-w}
  const double outer = std::log(p.mu) + 5.0 * std::log(w) - w;
  // absolute floor of 1e-30 on the density
  QuadratureOptions quad = opt.quad;
  const double floor_log = std::log(1e-30) - outer - block.log_scale();
  quad.abs_tol = std::max(quad.abs_tol, floor_log > 700.0 ? 1e300 : std::exp(floor_log));
  Cell r = block.integral(quad);
  if (r.is_zero()) return 0.0;
  r.logmag += outer;
  return finish_density(r);
}

template double pdf_v_kappa_e_closed<double>(const double&, const double&, double*);
template Extended pdf_v_kappa_e_closed<Extended>(const Extended&, const Extended&, Extended*);

}  // namespace demmel
