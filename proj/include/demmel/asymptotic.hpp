#pragma once

#include "demmel/precision.hpp"
#include "demmel/quadrature.hpp"
#include "demmel/signed_log.hpp"

namespace demmel {

// Limit of kappa^2 / (mu n^3) as n -> inf with alpha fixed.
struct ScaledParams {
  int alpha = 0;
  double mu = 1.0;
};

ScaledParams make_scaled(int alpha, double mu);

enum class AsymKappaDMode { automatic, determinant, closed };
enum class AsymKappaEMode { automatic, integral, closed };

// sum_q c(i-1, j, q) rho^(q-j-1) I_{q+j+1}(2 rho) with
// c(a, j, q) = sum_p S(p, q) C(a, p) j^(a-p); rho = sqrt(z / (mu v)).
SignedLog<double> asym_g_entry(int i, int j, double rho);

double pdf_v_kappa_d(double v, const ScaledParams& p, AsymKappaDMode mode = AsymKappaDMode::automatic,
                     int alpha_cap = 6);

// e^{-1/(mu v)}, the distribution function of the alpha = 0 limit.
double cdf_v_kappa_d_alpha0(double v, double mu);

struct AsymKappaEOptions {
  AsymKappaEMode mode = AsymKappaEMode::automatic;
  int alpha_cap = 4;
  // the (alpha+2)-determinant carries roundoff near 1e-11 at large w
  QuadratureOptions quad{64, 1e-9, 0.0, 4000};
};

double pdf_v_kappa_e(double v, const ScaledParams& p, const AsymKappaEOptions& opt = {});

// alpha = 0 closed form through 2F3, 1F2 and 3F4 at 4/(mu v).
template <class Real>
Real pdf_v_kappa_e_closed(const Real& v, const Real& mu, Real* cancellation = nullptr);

// det[g(z) g(z) g(1)...] (1 - z)^-alpha at w = 1/(mu v), in log form.
SignedLog<double> asym_block_det_scaled(double z, double w, int alpha);

}  // namespace demmel
