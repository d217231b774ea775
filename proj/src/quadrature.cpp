#include "demmel/quadrature.hpp"

#include <array>
#include <numbers>

namespace demmel {

namespace {

constexpr int kMaxLog2Order = 11;

QuadratureRule build_reference(int order) {
  QuadratureRule r;
  r.nodes.resize(static_cast<std::size_t>(order));
  r.weights.resize(static_cast<std::size_t>(order));
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= order; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = order * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) {
        // refresh the derivative at the converged node
        p0 = 1.0;
        p1 = x;
        for (int k = 2; k <= order; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = order * (x * p1 - p0) / (x * x - 1.0);
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[static_cast<std::size_t>(i)] = -x;
    r.nodes[static_cast<std::size_t>(order - 1 - i)] = x;
    r.weights[static_cast<std::size_t>(i)] = w;
    r.weights[static_cast<std::size_t>(order - 1 - i)] = w;
  }
  return r;
}

}  // namespace

const QuadratureRule& gauss_legendre_reference(int order) {
  static const std::array<QuadratureRule, kMaxLog2Order + 1> table = [] {
    std::array<QuadratureRule, kMaxLog2Order + 1> t;
    for (int k = 1; k <= kMaxLog2Order; ++k) t[static_cast<std::size_t>(k)] = build_reference(1 << k);
    return t;
  }();
  for (int k = 1; k <= kMaxLog2Order; ++k) {
    if (order == (1 << k)) return table[static_cast<std::size_t>(k)];
  }
  throw DomainError("gauss_legendre_reference: order must be a power of two in [2, 2048]");
}

QuadratureRule gauss_legendre(int order, double a, double b) {
  require(order >= 1, "gauss_legendre: order must be positive");
  require(a < b, "gauss_legendre: need a < b");
  QuadratureRule r = order == 1 ? QuadratureRule{{0.0}, {2.0}, QuadratureRule::Kind::finite_gl}
                                : build_reference(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    r.nodes[i] = mid + half * r.nodes[i];
    r.weights[i] *= half;
  }
  return r;
}

QuadratureRule semi_infinite_rule(int order, double decay) {
  require(decay > 0, "semi_infinite_rule: decay must be positive");
  QuadratureRule r = gauss_legendre(order, 0.0, 1.0);
  for (std::size_t i = 0; i < r.nodes.size(); ++i) {
    const double u = r.nodes[i];
    r.weights[i] /= decay * u;
    r.nodes[i] = -std::log(u) / decay;
  }
  r.kind = QuadratureRule::Kind::semi_infinite;
  return r;
}

}  // namespace demmel
