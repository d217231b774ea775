#include "demmel/run.hpp"

#include "demmel/acceptance.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>

namespace demmel {

std::string to_string(Command c) {
  switch (c) {
    case Command::density: return "density";
    case Command::mgf: return "mgf";
    case Command::mc: return "mc";
    case Command::figure: return "figure";
    case Command::selftest: return "selftest";
  }
  return "?";
}

Command parse_command(const std::string& s) {
  for (Command c : {Command::density, Command::mgf, Command::mc, Command::figure, Command::selftest}) {
    if (to_string(c) == s) return c;
  }
  throw DomainError("unknown command '" + s + "' (expected density, mgf, mc, figure, selftest)");
}

std::string to_string(OutputFormat f) { return f == OutputFormat::csv ? "csv" : "json"; }

OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw DomainError("unknown format '" + s + "' (expected csv or json)");
}

Precision parse_precision(const std::string& s) {
  if (s == "auto") return Precision::automatic;
  if (s == "double") return Precision::double_precision;
  if (s == "extended") return Precision::extended;
  throw DomainError("unknown precision '" + s + "' (expected auto, double, extended)");
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["command"] = to_string(c.command);
  j["metric"] = to_string(c.metric);
  j["kind"] = to_string(c.kind);
  j["n"] = c.n ? nlohmann::json(*c.n) : nlohmann::json();
  j["alpha"] = c.alpha ? nlohmann::json(*c.alpha) : nlohmann::json();
  j["mu"] = c.mu ? nlohmann::json(*c.mu) : nlohmann::json();
  j["grid"] = c.grid ? nlohmann::json(to_string(*c.grid)) : nlohmann::json();
  j["s"] = c.s ? nlohmann::json(*c.s) : nlohmann::json();
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["bins"] = c.bins;
  j["precision"] = to_string(c.precision);
  j["output"] = c.output;
  j["format"] = to_string(c.format);
  j["figure_id"] = c.figure_id;
  return j;
}

RunConfig config_from_json(const nlohmann::json& j) {
  RunConfig c;
  c.command = parse_command(j.at("command").get<std::string>());
  c.metric = parse_metric(j.at("metric").get<std::string>());
  c.kind = parse_kind(j.at("kind").get<std::string>());
  if (!j.at("n").is_null()) c.n = j.at("n").get<int>();
  if (!j.at("alpha").is_null()) c.alpha = j.at("alpha").get<int>();
  if (!j.at("mu").is_null()) c.mu = j.at("mu").get<double>();
  if (!j.at("grid").is_null()) c.grid = parse_grid(j.at("grid").get<std::string>());
  if (!j.at("s").is_null()) c.s = j.at("s").get<double>();
  c.samples = j.at("samples").get<std::int64_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.bins = j.at("bins").get<int>();
  c.precision = parse_precision(j.at("precision").get<std::string>());
  c.output = j.at("output").get<std::string>();
  c.format = parse_format(j.at("format").get<std::string>());
  c.figure_id = j.at("figure_id").get<std::string>();
  return c;
}

namespace {

bool asymptotic_kind(const RunConfig& c) {
  return c.kind == CurveKind::asymptotic || (c.kind == CurveKind::closed_form && c.mu && !c.n);
}

CurveRequest curve_request(const RunConfig& c) {
  CurveRequest r;
  r.metric = c.metric;
  r.kind = c.kind;
  r.precision = c.precision;
  if (asymptotic_kind(c)) {
    r.mu = c.mu;
    r.alpha = c.alpha;
  } else {
    r.dims = make_dims(*c.n, *c.alpha);
  }
  return r;
}

Dims config_dims(const RunConfig& c) { return make_dims(*c.n, *c.alpha); }

// Smallest x with F(x) >= p, by bisection on the table.
double table_quantile(const CdfTable& t, double lower, double scale, double p) {
  double lo = lower, hi = lower + scale;
  while (t(hi) < p) hi = lower + 2 * (hi - lower);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (t(mid) < p) lo = mid; else hi = mid;
  }
  return hi;
}

McReport compare_draws(const std::vector<double>& draws, const CdfTable& table, double lower, double scale,
                       const Dims& dims, Metric metric, std::uint64_t seed, int bins) {
  McReport r;
  r.dims = dims;
  r.metric = metric;
  r.samples = static_cast<std::int64_t>(draws.size());
  r.seed = seed;
  r.bins = bins;
  const double hi = table_quantile(table, lower, scale, 0.95);
  r.histogram = make_histogram(draws, lower, hi, bins);
  r.ks_statistic = ks_compare(draws, [&](double x) { return table(x); });
  r.ks_threshold = ks_threshold(r.samples);
  r.pass = r.ks_statistic <= r.ks_threshold;
  return r;
}

std::string join(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void emit(const std::string& path, const std::string& content, std::ostream& out) {
  if (path.empty()) {
    out << content;
  } else {
    write_atomic(path, content);
  }
}

int run_density(const RunConfig& c, std::ostream& out) {
  const CurveRequest r = curve_request(c);
  const DensityCurve curve = evaluate_curve(r, grid_points(*c.grid));
  if (c.format == OutputFormat::csv) {
    emit(c.output, curve_csv(curve), out);
  } else {
    nlohmann::json j = {{"config", to_json(c)}, {"curve", to_json(curve)}};
    emit(c.output, j.dump(2) + "\n", out);
  }
  return kExitOk;
}

int run_mgf(const RunConfig& c, std::ostream& out) {
  const Dims d = config_dims(c);
  const double s = c.s.value_or(0.0);
  const double v = c.metric == Metric::kappa_d ? mgf_kappa_d(s, d) : mgf_kappa_e(s, d);
  if (c.output.empty() && c.format == OutputFormat::csv) {
    out << format_number(v) << "\n";
  } else if (c.format == OutputFormat::csv) {
    emit(c.output, "s,mgf\n" + format_number(s) + "," + format_number(v) + "\n", out);
  } else {
    nlohmann::json j = {{"config", to_json(c)}, {"mgf", v}};
    emit(c.output, j.dump(2) + "\n", out);
  }
  return kExitOk;
}

int run_mc(const RunConfig& c, std::ostream& out, std::ostream& err) {
  const Dims d = config_dims(c);
  std::vector<double> draws = mc_collect(c.metric, d, c.samples, c.seed);
  CurveRequest r;
  r.metric = c.metric;
  r.precision = c.precision;
  if (c.kind == CurveKind::asymptotic) {
    r.kind = CurveKind::asymptotic;
    r.mu = c.mu;
    r.alpha = d.alpha;
    const double scale = *c.mu * std::pow(d.n, 3);
    for (double& x : draws) x /= scale;
  } else {
    r.kind = c.kind;
    r.dims = d;
  }
  const CdfTable table(density_function(r), support_lower(r), natural_scale(r));
  const McReport rep = compare_draws(draws, table, support_lower(r), natural_scale(r), d, c.metric, c.seed, c.bins);
  if (c.format == OutputFormat::json) {
    nlohmann::json j = {{"config", to_json(c)}, {"report", to_json(rep)}, {"cdf_mass", table.total()}};
    emit(c.output, j.dump(2) + "\n", out);
  } else {
    emit(c.output, histogram_csv(rep.histogram), out);
    (c.output.empty() ? err : out) << "ks " << format_number(rep.ks_statistic) << " threshold "
                                   << format_number(rep.ks_threshold) << (rep.pass ? " pass" : " fail") << "\n";
  }
  return kExitOk;
}

int run_figure(const RunConfig& c, std::ostream& out) {
  const FigureResult f = make_figure(c.figure_id, c.samples, c.seed, c.bins);
  const std::string dir = c.output.empty() ? "figures" : c.output;
  const std::string stem = "fig" + f.spec.id;
  write_atomic(join(dir, stem + "_curve.csv"), curve_csv(f.curve));
  write_atomic(join(dir, stem + "_hist.csv"), histogram_csv(f.report.histogram));
  nlohmann::json j = {{"config", to_json(c)},
                      {"figure", f.spec.id},
                      {"mu", f.spec.mu},
                      {"curve_meta", to_json(f.curve)["meta"]},
                      {"report", to_json(f.report)},
                      {"ks_allowance", f.spec.ks_allowance},
                      {"pass_with_allowance", f.report.ks_statistic <= f.spec.ks_allowance},
                      {"cdf_mass", f.cdf_mass}};
  write_atomic(join(dir, stem + "_report.json"), j.dump(2) + "\n");
  out << stem << ": ks " << format_number(f.report.ks_statistic) << " (1% critical "
      << format_number(f.report.ks_threshold) << ", allowance " << format_number(f.spec.ks_allowance) << ")\n";
  return kExitOk;
}

int run_selftest(std::ostream& out) {
  bool ok = true;
  run_acceptance({}, [&](const CriterionResult& r) {
    out << format_line(r) << std::endl;
    ok = ok && r.pass;
  });
  return ok ? kExitOk : kExitAcceptance;
}

}  // namespace

void validate(const RunConfig& c) {
  require(c.bins >= 1, "--bins must be positive");
  switch (c.command) {
    case Command::density: {
      require(c.grid.has_value(), "density needs --grid start:stop:points");
      if (asymptotic_kind(c)) {
        require(!c.n, "asymptotic curves are indexed by alpha and mu; drop --n");
        require(c.mu.has_value(), "asymptotic curves need --mu");
        require(c.alpha.has_value(), "asymptotic curves need --alpha");
      } else {
        require(c.n.has_value() && c.alpha.has_value(), to_string(c.kind) + " curves need --n and --alpha");
        require(!c.mu, "--mu only applies to asymptotic curves");
      }
      validate(curve_request(c));
      break;
    }
    case Command::mgf:
      require(c.metric == Metric::kappa_d || c.metric == Metric::kappa_e, "mgf is defined for kappa-d and kappa-e");
      require(c.kind == CurveKind::exact, "mgf is available for the exact kind only");
      require(c.n.has_value() && c.alpha.has_value(), "mgf needs --n and --alpha");
      require(!c.mu, "--mu only applies to asymptotic curves");
      require(c.s.value_or(0.0) >= 0, "--s must be nonnegative");
      if (c.metric == Metric::kappa_d) require_kappa_d(config_dims(c));
      if (c.metric == Metric::kappa_e) require_kappa_e(config_dims(c));
      break;
    case Command::mc: {
      require(c.n.has_value() && c.alpha.has_value(), "mc needs --n and --alpha");
      require(c.samples >= 1, "--samples must be positive");
      if (c.kind == CurveKind::asymptotic) {
        require(c.mu.has_value(), "mc against the asymptotic curve needs --mu");
        require(c.metric == Metric::kappa_d || c.metric == Metric::kappa_e,
                "asymptotic curves exist for kappa-d and kappa-e only");
      } else {
        require(!c.mu, "--mu only applies to asymptotic curves");
        CurveRequest r;
        r.metric = c.metric;
        r.kind = c.kind;
        r.dims = config_dims(c);
        validate(r);
      }
      break;
    }
    case Command::figure:
      figure_spec(c.figure_id);
      require(c.samples >= 1, "--samples must be positive");
      break;
    case Command::selftest: break;
  }
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    validate(c);
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    switch (c.command) {
      case Command::density: return run_density(c, out);
      case Command::mgf: return run_mgf(c, out);
      case Command::mc: return run_mc(c, out, err);
      case Command::figure: return run_figure(c, out);
      case Command::selftest: return run_selftest(out);
    }
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}

FigureSpec figure_spec(const std::string& id) {
  if (id == "1a") return {id, Metric::kappa_d, 1, 50, 4.0, 0.02};
  if (id == "1b") return {id, Metric::kappa_d, 2, 50, 4.0, 0.02};
  if (id == "2a") return {id, Metric::kappa_e, 0, 10, 4.0, 0.03};
  if (id == "2b") return {id, Metric::kappa_e, 1, 50, 4.0, 0.02};
  throw DomainError("unknown figure id '" + id + "' (expected 1a, 1b, 2a, 2b)");
}

FigureResult make_figure(const std::string& id, std::int64_t samples, std::uint64_t seed, int bins,
                         int curve_points) {
  FigureResult f;
  f.spec = figure_spec(id);
  CurveRequest r;
  r.metric = f.spec.metric;
  r.kind = CurveKind::asymptotic;
  r.mu = f.spec.mu;
  r.alpha = f.spec.alpha;
  const double lower = support_lower(r);
  const double scale = natural_scale(r);
  const CdfTable table(density_function(r), lower, scale);
  f.cdf_mass = table.total();
  const Dims d = make_dims(f.spec.n, f.spec.alpha);
  std::vector<double> draws = mc_collect(f.spec.metric, d, samples, seed);
  const double norm = f.spec.mu * std::pow(f.spec.n, 3);
  for (double& x : draws) x /= norm;
  f.report = compare_draws(draws, table, lower, scale, d, f.spec.metric, seed, bins);
  const double hi = f.report.histogram.edges.back();
  GridSpec g{hi / curve_points, hi, curve_points};
  f.curve = evaluate_curve(r, grid_points(g));
  return f;
}

}  // namespace demmel
