#pragma once

#include "demmel/asymptotic.hpp"
#include "demmel/exact.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace demmel {

// start:stop:points, evenly spaced, both ends included.
struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  int points = 2;
};

GridSpec parse_grid(const std::string& text);
std::string to_string(const GridSpec& g);
std::vector<double> grid_points(const GridSpec& g);

// Which density to evaluate. Exact and closed-form curves need dims; the
// asymptotic kind needs mu and takes v = kappa^2 / (mu n^3) as argument.
struct CurveRequest {
  Metric metric = Metric::kappa_d;
  CurveKind kind = CurveKind::exact;
  std::optional<Dims> dims;
  std::optional<double> mu;
  std::optional<int> alpha;  // asymptotic kind
  Precision precision = Precision::automatic;
  QuadratureOptions quad{};
};

void validate(const CurveRequest& r);

struct CurveMeta {
  Precision precision_used = Precision::double_precision;
  int quad_order = 64;
  double quad_rel_tol = 1e-11;
  std::string timestamp;
};

struct DensityCurve {
  Metric metric = Metric::kappa_d;
  CurveKind kind = CurveKind::exact;
  std::optional<Dims> dims;
  std::optional<double> mu;
  std::optional<int> alpha;
  std::vector<double> grid;
  std::vector<double> values;
  CurveMeta meta;
};

// Density as a callable; info (if given) accumulates the widest precision
// used across calls.
std::function<double(double)> density_function(const CurveRequest& r, Precision* widest = nullptr);

DensityCurve evaluate_curve(const CurveRequest& r, const std::vector<double>& grid);

// Lower support edge of the requested density.
double support_lower(const CurveRequest& r);
// A typical magnitude of the variable, used to place table nodes.
double natural_scale(const CurveRequest& r);

// Distribution function by cumulative quadrature on u = (x - lower) /
// (x - lower + scale) in [0, 1]: fixed Gauss-Legendre on each of `panels`
// equal u panels, cubic Hermite interpolation with the density as slope.
class CdfTable {
 public:
  CdfTable(const std::function<double(double)>& pdf, double lower, double scale, int panels = 512,
           int order = 16);

  double operator()(double x) const;
  // Mass collected over [lower, inf); 1 for a normalized density.
  double total() const { return g_.back(); }
  int evaluations() const { return evaluations_; }

 private:
  double lower_, scale_;
  int panels_;
  std::vector<double> g_;      // cumulative at u_k = k / panels
  std::vector<double> slope_;  // dG/du at u_k
  int evaluations_ = 0;
};

// ISO 8601 UTC; SOURCE_DATE_EPOCH overrides the clock when set.
std::string utc_timestamp();

}  // namespace demmel
