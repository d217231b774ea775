#pragma once

#include "demmel/curve.hpp"
#include "demmel/io.hpp"
#include "demmel/sampler.hpp"

#include "json.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace demmel {

enum class Command { density, mgf, mc, figure, selftest };
enum class OutputFormat { csv, json };

std::string to_string(Command c);
Command parse_command(const std::string& s);
std::string to_string(OutputFormat f);
OutputFormat parse_format(const std::string& s);
Precision parse_precision(const std::string& s);

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;
inline constexpr int kExitAcceptance = 3;

struct RunConfig {
  Command command = Command::density;
  Metric metric = Metric::kappa_d;
  CurveKind kind = CurveKind::exact;
  std::optional<int> n;
  std::optional<int> alpha;
  std::optional<double> mu;
  std::optional<GridSpec> grid;
  std::optional<double> s;
  std::int64_t samples = 100000;
  std::uint64_t seed = 1;
  int bins = 60;
  Precision precision = Precision::automatic;
  std::string output;
  OutputFormat format = OutputFormat::csv;
  std::string figure_id;
};

nlohmann::json to_json(const RunConfig& c);
RunConfig config_from_json(const nlohmann::json& j);

// Rejects flag combinations that make no sense for the command; throws
// DomainError with the reason.
void validate(const RunConfig& c);

// Executes the command. Results go to `out` (or files), diagnostics to
// `err`. Returns one of the kExit* codes.
int run(const RunConfig& c, std::ostream& out, std::ostream& err);

// Figure presets: 1a, 1b (kappa-d, alpha 1 and 2, n 50), 2a (kappa-e,
// alpha 0, n 10), 2b (kappa-e, alpha 1, n 50); all at mu = 4.
struct FigureSpec {
  std::string id;
  Metric metric;
  int alpha;
  int n;
  double mu;
  double ks_allowance;  // finite-n bias allowance for the KS check
};

FigureSpec figure_spec(const std::string& id);

struct FigureResult {
  FigureSpec spec;
  DensityCurve curve;     // asymptotic density of v = kappa^2 / (mu n^3)
  McReport report;        // histogram and KS of the scaled draws
  double cdf_mass = 0.0;  // total of the analytic distribution table
};

FigureResult make_figure(const std::string& id, std::int64_t samples, std::uint64_t seed, int bins = 60,
                         int curve_points = 200);

}  // namespace demmel
