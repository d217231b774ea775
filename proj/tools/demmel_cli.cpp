#include "demmel/run.hpp"

#include "CLI11.hpp"

#include <iostream>

using namespace demmel;

namespace {

struct Flags {
  std::string metric = "kappa-d";
  std::string kind = "exact";
  std::string precision = "auto";
  std::string format = "csv";
  std::string grid;
  std::optional<int> n, alpha;
  std::optional<double> mu, s;
};

void add_model(CLI::App* sub, Flags& f) {
  sub->add_option("--metric", f.metric, "kappa-d, kappa-e, lambda-min, lambda-2");
  sub->add_option("--n", f.n, "matrix order n");
  sub->add_option("--alpha", f.alpha, "m - n");
  sub->add_option("--precision", f.precision, "auto, double, extended");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Densities of Demmel-type condition numbers of complex Wishart matrices"};
  app.require_subcommand(1);
  Flags f;
  RunConfig c;

  auto* density = app.add_subcommand("density", "evaluate a density curve on a grid");
  add_model(density, f);
  density->add_option("--kind", f.kind, "exact, asymptotic, closed-form");
  density->add_option("--mu", f.mu, "scaling constant of the asymptotic variable");
  density->add_option("--grid", f.grid, "start:stop:points")->required();
  density->add_option("--format", f.format, "csv or json");
  density->add_option("--output", c.output, "output file (stdout when omitted)");

  auto* mgf = app.add_subcommand("mgf", "moment generating function E[exp(-s kappa^2)]");
  add_model(mgf, f);
  mgf->add_option("--s", f.s, "argument s >= 0");
  mgf->add_option("--format", f.format, "csv or json");
  mgf->add_option("--output", c.output, "output file");

  auto* mc = app.add_subcommand("mc", "Monte Carlo histogram and KS test against the density");
  add_model(mc, f);
  mc->add_option("--kind", f.kind, "exact or asymptotic");
  mc->add_option("--mu", f.mu, "scaling for the asymptotic comparison");
  mc->add_option("--samples", c.samples, "number of matrices");
  mc->add_option("--seed", c.seed, "Philox key");
  mc->add_option("--bins", c.bins, "histogram bins");
  mc->add_option("--format", f.format, "csv or json");
  mc->add_option("--output", c.output, "output file");

  auto* figure = app.add_subcommand("figure", "regenerate a figure's curve, histogram and report");
  figure->add_option("--id", c.figure_id, "1a, 1b, 2a, 2b")->required();
  figure->add_option("--samples", c.samples, "number of matrices");
  figure->add_option("--seed", c.seed, "Philox key");
  figure->add_option("--bins", c.bins, "histogram bins");
  figure->add_option("--output", c.output, "output directory (default figures)");

  app.add_subcommand("selftest", "run the acceptance criteria");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    c.command = parse_command(app.get_subcommands().front()->get_name());
    c.metric = parse_metric(f.metric);
    c.kind = parse_kind(f.kind);
    c.precision = parse_precision(f.precision);
    c.format = parse_format(f.format);
    c.n = f.n;
    c.alpha = f.alpha;
    c.mu = f.mu;
    c.s = f.s;
    if (!f.grid.empty()) c.grid = parse_grid(f.grid);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return run(c, std::cout, std::cerr);
}
