#include "demmel/curve.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <sstream>

namespace demmel {

namespace {

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw DomainError("grid: cannot read " + what + " from '" + s + "'");
  }
  if (used != s.size()) throw DomainError("grid: trailing characters in " + what + " '" + s + "'");
  return v;
}

void widen(Precision* widest, Precision used) {
  if (widest && used == Precision::extended) *widest = Precision::extended;
}

bool is_asymptotic(const CurveRequest& r) {
  return r.kind == CurveKind::asymptotic || (r.kind == CurveKind::closed_form && !r.dims && r.mu);
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() != 3) throw DomainError("grid: expected start:stop:points, got '" + text + "'");
  GridSpec g;
  g.start = parse_number(parts[0], "start");
  g.stop = parse_number(parts[1], "stop");
  const double pts = parse_number(parts[2], "points");
  if (pts != std::floor(pts) || pts > 1e7) throw DomainError("grid: points must be a whole number");
  g.points = static_cast<int>(pts);
  if (!(std::isfinite(g.start) && std::isfinite(g.stop) && g.start < g.stop)) {
    throw DomainError("grid: need finite start < stop in '" + text + "'");
  }
  if (g.points < 2) throw DomainError("grid: need at least 2 points");
  return g;
}

std::string to_string(const GridSpec& g) {
  std::ostringstream os;
  os.precision(17);
  os << g.start << ':' << g.stop << ':' << g.points;
  return os.str();
}

std::vector<double> grid_points(const GridSpec& g) {
  std::vector<double> x(static_cast<std::size_t>(g.points));
  for (int i = 0; i < g.points; ++i) {
    x[static_cast<std::size_t>(i)] = g.start + (g.stop - g.start) * i / (g.points - 1);
  }
  x.back() = g.stop;
  return x;
}

void validate(const CurveRequest& r) {
  if (is_asymptotic(r)) {
    require(r.metric == Metric::kappa_d || r.metric == Metric::kappa_e,
            "asymptotic curves exist for kappa-d and kappa-e only");
    require(!r.dims, "asymptotic curves take alpha and mu, not n");
    require(r.mu.has_value(), "asymptotic curves need mu");
    require(*r.mu > 0 && std::isfinite(*r.mu), "mu must be positive");
    require(r.alpha.has_value() && *r.alpha >= 0, "asymptotic curves need alpha >= 0");
    if (r.kind == CurveKind::closed_form) {
      if (r.metric == Metric::kappa_d) require(*r.alpha <= 2, "asymptotic kappa-d closed form needs alpha <= 2");
      if (r.metric == Metric::kappa_e) require(*r.alpha == 0, "asymptotic kappa-e closed form needs alpha = 0");
    }
    return;
  }
  require(r.dims.has_value(), to_string(r.kind) + " curves need n and alpha");
  require(!r.mu, to_string(r.kind) + " curves do not take mu");
  const Dims& d = *r.dims;
  switch (r.metric) {
    case Metric::kappa_d: require_kappa_d(d); break;
    case Metric::kappa_e: require_kappa_e(d); break;
    case Metric::lambda_2: require(d.n >= 2, "lambda-2 needs n >= 2"); break;
    case Metric::lambda_min: break;
  }
  if (r.kind == CurveKind::closed_form) {
    if (r.metric == Metric::kappa_d) require(d.alpha <= 1, "kappa-d closed form needs alpha <= 1");
    if (r.metric == Metric::kappa_e) require(d.alpha == 0, "kappa-e closed form needs alpha = 0");
    if (r.metric == Metric::lambda_2) require(d.alpha == 0, "lambda-2 closed form needs alpha = 0");
  }
}

std::function<double(double)> density_function(const CurveRequest& r, Precision* widest) {
  validate(r);
  if (is_asymptotic(r)) {
    const ScaledParams p = make_scaled(*r.alpha, *r.mu);
    const bool closed = r.kind == CurveKind::closed_form;
    if (r.metric == Metric::kappa_d) {
      const AsymKappaDMode mode = closed ? AsymKappaDMode::closed : AsymKappaDMode::automatic;
      return [p, mode](double v) { return pdf_v_kappa_d(v, p, mode); };
    }
    AsymKappaEOptions opt;
    opt.mode = closed ? AsymKappaEMode::closed : AsymKappaEMode::automatic;
    return [p, opt](double v) { return pdf_v_kappa_e(v, p, opt); };
  }
  const Dims d = *r.dims;
  const bool closed = r.kind == CurveKind::closed_form;
  const Precision prec = r.precision;
  const QuadratureOptions quad = r.quad;
  switch (r.metric) {
    case Metric::kappa_d: {
      KappaDOptions opt;
      opt.mode = closed ? KappaDMode::closed : KappaDMode::automatic;
      opt.precision = prec;
      return [d, opt, widest](double y) {
        EvalInfo info;
        const double v = pdf_kappa_d(y, d, opt, &info);
        widen(widest, info.used);
        return v;
      };
    }
    case Metric::kappa_e: {
      if (closed) {
        return [d, widest](double y) {
          if (!(y > d.n - 1)) return 0.0;
          double c = 1.0;
          const double v = pdf_kappa_e_closed<double>(y, d.n, &c);
          if (c <= kDoubleCancellationBudget) return v;
          widen(widest, Precision::extended);
          return static_cast<double>(pdf_kappa_e_closed<Extended>(Extended(y), d.n));
        };
      }
      KappaEOptions opt;
      opt.precision = prec;
      opt.quad = quad;
      return [d, opt, widest](double y) {
        EvalInfo info;
        const double v = pdf_kappa_e(y, d, opt, &info);
        widen(widest, info.used);
        return v;
      };
    }
    case Metric::lambda_min:
      return [d](double x) { return x > 0 ? pdf_lambda_min(x, d) : 0.0; };
    case Metric::lambda_2: {
      const Lambda2Mode mode = closed ? Lambda2Mode::closed : Lambda2Mode::automatic;
      return [d, mode, quad](double x) { return pdf_lambda2(x, d, mode, quad); };
    }
  }
  throw DomainError("unknown metric");
}

DensityCurve evaluate_curve(const CurveRequest& r, const std::vector<double>& grid) {
  require(!grid.empty(), "curve: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) require(grid[i] > grid[i - 1], "curve: grid must ascend");
  Precision widest = Precision::double_precision;
  if (r.precision == Precision::extended) widest = Precision::extended;
  const auto f = density_function(r, &widest);
  const double edge = support_lower(r);
  DensityCurve c;
  c.metric = r.metric;
  c.kind = r.kind;
  c.dims = r.dims;
  c.mu = r.mu;
  c.alpha = r.dims ? std::optional<int>(r.dims->alpha) : r.alpha;
  c.grid = grid;
  c.values.reserve(grid.size());
  for (double x : grid) {
    const double v = x <= edge ? 0.0 : f(x);
    if (!std::isfinite(v)) throw NumericalError("curve: density not finite at x = " + std::to_string(x));
    c.values.push_back(v);
  }
  c.meta.precision_used = widest;
  c.meta.quad_order = r.quad.order;
  c.meta.quad_rel_tol = r.quad.rel_tol;
  c.meta.timestamp = utc_timestamp();
  return c;
}

double support_lower(const CurveRequest& r) {
  if (is_asymptotic(r)) return 0.0;
  return support_edge(r.metric, *r.dims);
}

double natural_scale(const CurveRequest& r) {
  if (is_asymptotic(r)) return 1.0 / *r.mu;
  const Dims& d = *r.dims;
  const double n = d.n;
  switch (r.metric) {
    case Metric::kappa_d:
    case Metric::kappa_e: return n * n * n;
    case Metric::lambda_min: return (1.0 + d.alpha) * (1.0 + d.alpha) / n;
    case Metric::lambda_2: return (2.0 + d.alpha) * (2.0 + d.alpha) / n;
  }
  return 1.0;
}

CdfTable::CdfTable(const std::function<double(double)>& pdf, double lower, double scale, int panels, int order)
    : lower_(lower), scale_(scale), panels_(panels) {
  require(scale > 0, "cdf table: scale must be positive");
  require(panels >= 2, "cdf table: need at least 2 panels");
  const QuadratureRule ref = gauss_legendre(order, 0.0, 1.0);
  // dG/du = f(x(u)) x'(u), x = lower + scale u / (1 - u)
  auto dg = [&](double u) {
    const double om = 1.0 - u;
    ++evaluations_;
    const double v = pdf(lower_ + scale_ * u / om) * scale_ / (om * om);
    if (!std::isfinite(v)) throw NumericalError("cdf table: density not finite");
    return v;
  };
  const double h = 1.0 / panels;
  g_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
  slope_.assign(static_cast<std::size_t>(panels) + 1, 0.0);
  slope_[0] = dg(0.0);
  for (int k = 0; k < panels; ++k) {
    double acc = 0.0;
    for (std::size_t q = 0; q < ref.nodes.size(); ++q) acc += ref.weights[q] * dg((k + ref.nodes[q]) * h);
    g_[static_cast<std::size_t>(k) + 1] = g_[static_cast<std::size_t>(k)] + acc * h;
    if (k + 1 < panels) slope_[static_cast<std::size_t>(k) + 1] = dg((k + 1) * h);
  }
  const std::size_t last = static_cast<std::size_t>(panels);
  // the slope at u = 1 is a limit; take it just inside
  slope_[last] = dg(1.0 - 1e-4 * h);
}

double CdfTable::operator()(double x) const {
  if (!(x > lower_)) return 0.0;
  if (std::isinf(x)) return g_.back();
  const double u = (x - lower_) / (x - lower_ + scale_);
  const double pos = u * panels_;
  const int k = std::min(static_cast<int>(pos), panels_ - 1);
  const double t = pos - k;
  const double h = 1.0 / panels_;
  const std::size_t i = static_cast<std::size_t>(k);
  const double g0 = g_[i], g1 = g_[i + 1];
  const double t2 = t * t, t3 = t2 * t;
  const double v = (2 * t3 - 3 * t2 + 1) * g0 + (t3 - 2 * t2 + t) * h * slope_[i] + (-2 * t3 + 3 * t2) * g1 +
                   (t3 - t2) * h * slope_[i + 1];
  return std::clamp(v, std::min(g0, g1), std::max(g0, g1));
}

std::string utc_timestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  if (const char* fixed = std::getenv("SOURCE_DATE_EPOCH")) {
    char* end = nullptr;
    const long long v = std::strtoll(fixed, &end, 10);
    if (end != fixed && *end == '\0' && v >= 0) now = static_cast<std::time_t>(v);
  }
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace demmel
