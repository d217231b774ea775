#pragma once

#include "demmel/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

namespace demmel {

struct QuadratureRule {
  enum class Kind { finite_gl, semi_infinite };
  std::vector<double> nodes;
  std::vector<double> weights;
  Kind kind = Kind::finite_gl;
};

// Gauss-Legendre rule on [a, b]. Nodes are strictly interior.
QuadratureRule gauss_legendre(int order, double a = -1.0, double b = 1.0);

// Cached reference rule on [-1, 1] for order = 2^k, 2 <= order <= 2048.
const QuadratureRule& gauss_legendre_reference(int order);

// Rule for the semi-infinite map x = -ln(u)/decay applied to a finite rule
// on (0, 1); weights include the Jacobian 1/(decay u).
QuadratureRule semi_infinite_rule(int order, double decay);

struct QuadratureOptions {
  int order = 64;          // panel rule; the error estimate uses 2*order
  double rel_tol = 1e-11;  // on the total
  double abs_tol = 0.0;
  int max_panels = 4000;
};

namespace detail {

struct Panel {
  double a, b, value, err, abs;
};

inline bool worse(const Panel& x, const Panel& y) { return x.err < y.err; }

template <class F>
Panel eval_panel(F& f, double a, double b, const QuadratureRule& lo, const QuadratureRule& hi) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double vlo = 0.0;
  for (std::size_t i = 0; i < lo.nodes.size(); ++i) {
    vlo += lo.weights[i] * static_cast<double>(f(mid + half * lo.nodes[i]));
  }
  double vhi = 0.0;
  double vabs = 0.0;
  for (std::size_t i = 0; i < hi.nodes.size(); ++i) {
    const double fx = static_cast<double>(f(mid + half * hi.nodes[i]));
    if (!std::isfinite(fx)) {
      throw NumericalError("quadrature: integrand not finite at x = " +
                           std::to_string(mid + half * hi.nodes[i]));
    }
    vhi += hi.weights[i] * fx;
    vabs += hi.weights[i] * std::abs(fx);
  }
  vlo *= half;
  vhi *= half;
  vabs *= std::abs(half);
  double err = std::abs(vhi - vlo);
  // Rounding noise of the integrand cannot be resolved by splitting.
  if (err <= 64.0 * std::numeric_limits<double>::epsilon() * vabs) err = 0.0;
  return {a, b, vhi, err, vabs};
}

}  // namespace detail

// Globally adaptive Gauss-Legendre: each panel is integrated with order and
// 2*order nodes, the worst panel is bisected until the summed error estimate
// meets the tolerance. Smooth integrands finish on the first panel.
template <class F>
double integrate_finite(F&& f, double a, double b, const QuadratureOptions& opt = {}) {
  require(a < b, "integrate_finite: need a < b");
  const QuadratureRule& lo = gauss_legendre_reference(opt.order);
  const QuadratureRule& hi = gauss_legendre_reference(2 * opt.order);
  const double min_width = 1e-15 * (b - a);
  std::vector<detail::Panel> heap{detail::eval_panel(f, a, b, lo, hi)};
  for (;;) {
    double total = 0.0;
    double err = 0.0;
    double mass = 0.0;
    for (const auto& p : heap) {
      total += p.value;
      err += p.err;
      mass += p.abs;
    }
    // A total that cancels to ~0 is accepted at the rounding level of the
    // absolute integral.
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * mass;
    if (err <= std::max({opt.rel_tol * std::abs(total), opt.abs_tol, floor})) return total;
    if (static_cast<int>(heap.size()) >= opt.max_panels) {
      char msg[200];
      std::snprintf(msg, sizeof msg, "integrate_finite: no convergence on [%.6g, %.6g], error estimate %.3g vs total %.6g",
                    a, b, err, total);
      throw ConvergenceError(msg);
    }
    std::pop_heap(heap.begin(), heap.end(), detail::worse);
    const detail::Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (worst.b - worst.a < min_width) {
      heap.push_back({worst.a, worst.b, worst.value, 0.0, worst.abs});
      std::push_heap(heap.begin(), heap.end(), detail::worse);
      continue;
    }
    heap.push_back(detail::eval_panel(f, worst.a, mid, lo, hi));
    std::push_heap(heap.begin(), heap.end(), detail::worse);
    heap.push_back(detail::eval_panel(f, mid, worst.b, lo, hi));
    std::push_heap(heap.begin(), heap.end(), detail::worse);
  }
}

// Integral over [lower, inf) of f with |f(x)| <= C exp(-decay x) eventually,
// via x = lower - ln(u)/decay on (0, 1).
template <class F>
double integrate_semi_infinite(F&& f, double decay, const QuadratureOptions& opt = {},
                               double lower = 0.0) {
  require(decay > 0, "integrate_semi_infinite: decay must be positive");
  auto mapped = [&](double u) -> double {
    const double x = lower - std::log(u) / decay;
    const double fx = static_cast<double>(f(x));
    if (fx == 0.0) return 0.0;
    return fx / (decay * u);
  };
  return integrate_finite(mapped, 0.0, 1.0, opt);
}

// Plain fixed-order rule, no error control.
template <class F>
double integrate_fixed(F&& f, double a, double b, int order) {
  const QuadratureRule& r = gauss_legendre_reference(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    acc += r.weights[i] * static_cast<double>(f(mid + half * r.nodes[i]));
  }
  return acc * half;
}

}  // namespace demmel
