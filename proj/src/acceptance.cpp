#include "demmel/acceptance.hpp"

#include "demmel/asymptotic.hpp"
#include "demmel/curve.hpp"
#include "demmel/determinant.hpp"
#include "demmel/exact.hpp"
#include "demmel/io.hpp"
#include "demmel/run.hpp"
#include "demmel/sampler.hpp"

#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

namespace demmel {

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::string sci(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

// Total mass over [lower, inf) through u = (x - lower) / (x - lower + scale).
double total_mass(const std::function<double(double)>& f, double lower, double scale) {
  return integrate_finite(
      [&](double u) {
        if (u <= 0 || u >= 1) return 0.0;
        const double om = 1.0 - u;
        return f(lower + scale * u / om) * scale / (om * om);
      },
      0.0, 1.0, {64, 1e-9, 0.0, 4000});
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome closed_form_crosscheck() {
  double worst = 0.0;
  int points = 0;
  for (int a = 0; a <= 1; ++a) {
    for (int n = 2; n <= 6; ++n) {
      const Dims d = make_dims(n, a);
      const double n3 = std::pow(n, 3);
      for (int k = 0; k < 100; ++k) {
        const double y = n + n3 * std::pow(10.0, -3.0 + 6.0 * k / 99);
        const double th = pdf_kappa_d(y, d, {KappaDMode::term_table});
        const double cl = pdf_kappa_d(y, d, {KappaDMode::closed});
        worst = std::max(worst, rel(th, cl));
        ++points;
      }
    }
  }
  return {worst <= 1e-10, "max relative error " + sci(worst) + " over " + std::to_string(points) + " points (tol 1e-10)"};
}

Outcome normalization_suite() {
  double worst = 0.0;
  std::string where;
  int count = 0;
  auto check = [&](const CurveRequest& r, const std::string& label) {
    const double m = total_mass(density_function(r), support_lower(r), natural_scale(r));
    ++count;
    if (std::abs(m - 1.0) > worst || !std::isfinite(m)) {
      worst = std::isfinite(m) ? std::abs(m - 1.0) : INFINITY;
      where = label;
    }
  };
  for (Metric m : {Metric::kappa_d, Metric::kappa_e, Metric::lambda_min, Metric::lambda_2}) {
    const int n_lo = (m == Metric::kappa_e || m == Metric::lambda_2) ? 3 : (m == Metric::lambda_min ? 1 : 2);
    for (int n = n_lo; n <= 5; ++n) {
      for (int a = 0; a <= 2; ++a) {
        CurveRequest r;
        r.metric = m;
        r.dims = make_dims(n, a);
        check(r, to_string(m) + " n=" + std::to_string(n) + " alpha=" + std::to_string(a));
      }
    }
  }
  for (Metric m : {Metric::kappa_d, Metric::kappa_e}) {
    for (int a = 0; a <= 2; ++a) {
      for (double mu : {0.25, 4.0}) {
        CurveRequest r;
        r.metric = m;
        r.kind = CurveKind::asymptotic;
        r.alpha = a;
        r.mu = mu;
        check(r, "asymptotic " + to_string(m) + " alpha=" + std::to_string(a) + " mu=" + sci(mu));
      }
    }
  }
  return {worst <= 1e-5, std::to_string(count) + " densities, max |mass - 1| " + sci(worst) + " at " + where +
                             " (tol 1e-5)"};
}

Outcome small_n_monte_carlo() {
  const std::int64_t samples = 100000;
  const double crit = ks_threshold(samples);
  double worst = 0.0;
  std::string where;
  for (int a = 0; a <= 2; ++a) {
    const Dims d = make_dims(4, a);
    for (Metric m : {Metric::kappa_d, Metric::kappa_e, Metric::lambda_2}) {
      CurveRequest r;
      r.metric = m;
      r.dims = d;
      const CdfTable t(density_function(r), support_lower(r), natural_scale(r));
      const double ks = ks_compare(mc_collect(m, d, samples, 1), [&](double x) { return t(x); });
      if (ks > worst) {
        worst = ks;
        where = to_string(m) + " alpha=" + std::to_string(a);
      }
    }
  }
  return {worst <= crit, "9 KS tests at n=4, max " + sci(worst) + " at " + where + " (critical " + sci(crit) + ")"};
}

Outcome figure_reproduction(const std::vector<std::string>& ids) {
  bool ok = true;
  std::string detail;
  for (const std::string& id : ids) {
    const FigureResult f = make_figure(id, 100000, 1);
    const bool pass = f.report.ks_statistic <= f.spec.ks_allowance;
    ok = ok && pass;
    if (!detail.empty()) detail += "; ";
    detail += "fig " + id + " (" + to_string(f.spec.metric) + " alpha=" + std::to_string(f.spec.alpha) +
              " n=" + std::to_string(f.spec.n) + ") KS " + sci(f.report.ks_statistic) + " <= " + sci(f.spec.ks_allowance);
  }
  return {ok, detail};
}

Outcome square_limit() {
  double ident = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double x = 0.4 + 0.2 * i;
    const double mu = i % 3 == 0 ? 0.25 : (i % 3 == 1 ? 1.0 : 4.0);
    ident = std::max(ident, std::abs(cdf_v_kappa_d_alpha0(x * x / (4 * mu), mu) - std::exp(-4 / (x * x))));
  }
  const int n = 30;
  CurveRequest r;
  r.metric = Metric::kappa_d;
  r.dims = make_dims(n, 0);
  const CdfTable t(density_function(r), support_lower(r), natural_scale(r));
  const double n3 = std::pow(n, 3);
  double gap = 0.0;
  for (int i = 0; i <= 900; ++i) {
    const double x = 1.0 + 0.01 * i;
    // P(2 kappa_D / n^1.5 <= x) = F(x^2 n^3 / 4)
    gap = std::max(gap, std::abs(t(x * x * n3 / 4) - std::exp(-4 / (x * x))));
  }
  return {ident <= 1e-12 && gap <= 0.03,
          "identity max error " + sci(ident) + " (tol 1e-12); n=30 sup distance " + sci(gap) + " (tol 0.03)"};
}

Outcome determinant_identities() {
  std::mt19937_64 rng(7);
  int c1 = 0, c2 = 0, bad = 0;
  for (int a = 1; a <= 5; ++a) {
    for (int n = 2; n <= 6; ++n) {
      const auto b = shifted_factorial_bounds(n, a);
      for (int t = 0; t < 200; ++t) {
        const IndexVector j = IndexVector::random(b, rng);
        if (shifted_factorial_lhs(j, n, a) != shifted_factorial_rhs(j)) ++bad;
        ++c1;
      }
    }
  }
  for (int a = 0; a <= 4; ++a) {
    for (int n = 2; n <= 6; ++n) {
      const auto b = mixed_power_bounds(n, a);
      for (int t = 0; t < 200; ++t) {
        const IndexVector l = IndexVector::random(b, rng);
        if (mixed_power_lhs(l, n, a) != mixed_power_rhs(l)) ++bad;
        ++c2;
      }
    }
  }
  return {bad == 0 && c1 >= 200 && c2 >= 200, "first identity " + std::to_string(c1) + " cases, second " +
                                                   std::to_string(c2) + " cases, mismatches " + std::to_string(bad)};
}

Outcome connection_identities() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-3.0, 4.0);
  double wd = 0.0, we = 0.0;
  int points = 0;
  for (int n = 3; n <= 5; ++n) {
    for (int a = 0; a <= 1; ++a) {
      const Dims d = make_dims(n, a);
      for (int i = 0; i < 50; ++i) {
        const double yd = n + std::exp(u(rng));
        wd = std::max(wd, rel(pdf_via_min_connection(yd, d), pdf_kappa_d(yd, d)));
        const double ye = n - 1 + std::exp(u(rng));
        we = std::max(we, rel(pdf_via_lambda2_connection(ye, d), pdf_kappa_e(ye, d)));
        ++points;
      }
    }
  }
  return {wd <= 1e-8 && we <= 1e-8, std::to_string(points) + " points per route; kappa-d max rel " + sci(wd) +
                                        ", kappa-e max rel " + sci(we) + " (tol 1e-8)"};
}

Outcome proof_integrals() {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-4.0, -0.5);
  double worst = 0.0;
  int cases = 0;
  for (int n = 1; n <= 3; ++n) {
    for (int a = 0; a <= 2; ++a) {
      for (int i = 0; i < 5; ++i) {
        const double z = u(rng);
        worst = std::max(worst, rel(q_closed_form(n, a, z), q_integral_oracle(n, a, z)));
        const double x = u(rng);
        const double y = u(rng) - 5.0;
        worst = std::max(worst, rel(r_closed_form(n, x, y, a), r_integral_oracle(n, x, y, a)));
        cases += 2;
      }
    }
  }
  return {worst <= 1e-6, std::to_string(cases) + " cases, max relative error " + sci(worst) + " (tol 1e-6)"};
}

Outcome hypergeometric_crosscheck() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> lv(std::log(0.01), std::log(20.0));
  const ScaledParams p = make_scaled(0, 4.0);
  AsymKappaEOptions integral, closed;
  integral.mode = AsymKappaEMode::integral;
  closed.mode = AsymKappaEMode::closed;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double v = std::exp(lv(rng));
    worst = std::max(worst, rel(pdf_v_kappa_e(v, p, integral), pdf_v_kappa_e(v, p, closed)));
  }
  return {worst <= 1e-7, "100 points, max relative error " + sci(worst) + " (tol 1e-7)"};
}

struct Entry {
  const char* title;
  double budget;
  Outcome (*fn)();
};

const Entry kEntries[kCriterionCount] = {
    {"closed-form cross-check", 10.0, closed_form_crosscheck},
    {"normalization suite", 120.0, normalization_suite},
    {"Monte Carlo agreement at n=4", 60.0, small_n_monte_carlo},
    {"figure 1 reproduction", 300.0, [] { return figure_reproduction({"1a", "1b"}); }},
    {"figure 2 reproduction", 300.0, [] { return figure_reproduction({"2a", "2b"}); }},
    {"square-case limit", 0.0, square_limit},
    {"determinant identities", 5.0, determinant_identities},
    {"connection identities", 0.0, connection_identities},
    {"proof-integral oracles", 0.0, proof_integrals},
    {"hypergeometric closed form", 0.0, hypergeometric_crosscheck},
};

}  // namespace

CriterionResult run_criterion(int id) {
  require(id >= 1 && id <= kCriterionCount, "criterion id must be 1.." + std::to_string(kCriterionCount));
  const Entry& e = kEntries[id - 1];
  CriterionResult r;
  r.id = id;
  r.title = e.title;
  r.budget_seconds = e.budget;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const Outcome o = e.fn();
    r.pass = o.pass;
    r.detail = o.detail;
  } catch (const std::exception& ex) {
    r.pass = false;
    r.detail = std::string("threw: ") + ex.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (r.budget_seconds > 0 && r.seconds > r.budget_seconds) {
    r.pass = false;
    r.detail += "; over the runtime budget";
  }
  return r;
}

std::string format_line(const CriterionResult& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << (r.pass ? "[PASS] " : "[FAIL] ") << r.id << " " << r.title << ": " << r.detail << " (" << r.seconds << " s";
  if (r.budget_seconds > 0) os << ", budget " << r.budget_seconds << " s";
  os << ")";
  return os.str();
}

std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids,
                                            const std::function<void(const CriterionResult&)>& report) {
  std::vector<int> which = ids;
  if (which.empty()) {
    for (int i = 1; i <= kCriterionCount; ++i) which.push_back(i);
  }
  std::vector<CriterionResult> out;
  for (int id : which) {
    out.push_back(run_criterion(id));
    if (report) report(out.back());
  }
  return out;
}

}  // namespace demmel
