#include "demmel/run.hpp"

#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace demmel;

namespace {

std::vector<std::vector<double>> read_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

RunConfig density_config(const std::string& grid) {
  RunConfig c;
  c.command = Command::density;
  c.metric = Metric::kappa_d;
  c.n = 2;
  c.alpha = 0;
  c.grid = parse_grid(grid);
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("demmel_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_SUITE("run") {

TEST_CASE("config json round trip") {
  RunConfig c = density_config("2.01:20:200");
  c.kind = CurveKind::closed_form;
  c.mu = 0.25;
  c.s = 1.5;
  c.seed = 0xfedcba9876543210ull;
  c.precision = Precision::extended;
  c.format = OutputFormat::json;
  c.output = "out.json";
  const RunConfig d = config_from_json(nlohmann::json::parse(to_json(c).dump()));
  CHECK(to_json(d) == to_json(c));
  CHECK(d.seed == c.seed);
  CHECK(*d.mu == 0.25);
  CHECK(d.grid->points == 200);
  RunConfig e;
  e.command = Command::selftest;
  CHECK(to_json(config_from_json(to_json(e))) == to_json(e));
}

TEST_CASE("numbers print with 17 significant digits") {
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_number(M_PI)) == M_PI);
  CHECK(format_number(0.09375) == "0.09375");
}

TEST_CASE("atomic write") {
  const auto dir = scratch("atomic");
  const auto path = (dir / "sub" / "a.txt").string();
  write_atomic(path, "one\n");
  write_atomic(path, "two\n");
  CHECK(slurp(path) == "two\n");
  int files = 0;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) files += e.is_regular_file();
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("density command") {
  std::ostringstream out, err;
  REQUIRE(run(density_config("2.01:20:200"), out, err) == kExitOk);
  const auto rows = read_csv(out.str());
  REQUIRE(rows.size() == 200);
  for (const auto& r : rows) {
    const double y = r[0];
    CHECK(r[1] == doctest::Approx(6 * (y - 2) * (y - 2) / std::pow(y, 4)).epsilon(1e-10));
  }
  std::ostringstream at4;
  REQUIRE(run(density_config("4:8:2"), at4, err) == kExitOk);
  CHECK(std::abs(read_csv(at4.str())[0][1] - 0.09375) < 1e-10);

  RunConfig j = density_config("4:8:2");
  j.format = OutputFormat::json;
  std::ostringstream js;
  REQUIRE(run(j, js, err) == kExitOk);
  const auto doc = nlohmann::json::parse(js.str());
  CHECK(doc["curve"]["metric"] == "kappa-d");
  CHECK(doc["curve"]["dims"]["n"] == 2);
  CHECK(doc["curve"]["meta"]["timestamp"].get<std::string>().size() == 20);
}

TEST_CASE("mgf at zero") {
  RunConfig c;
  c.command = Command::mgf;
  c.n = 3;
  c.alpha = 1;
  c.s = 0.0;
  std::ostringstream out, err;
  REQUIRE(run(c, out, err) == kExitOk);
  CHECK(std::stod(out.str()) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("usage errors exit 1") {
  std::ostringstream out, err;
  RunConfig a = density_config("2.01:20:10");
  a.kind = CurveKind::asymptotic;
  a.mu = 4;
  CHECK(run(a, out, err) == kExitUsage);
  RunConfig b = density_config("2.01:20:10");
  b.n.reset();
  CHECK(run(b, out, err) == kExitUsage);
  RunConfig m;
  m.command = Command::mc;
  m.kind = CurveKind::asymptotic;
  m.n = 5;
  m.alpha = 0;
  CHECK(run(m, out, err) == kExitUsage);
  RunConfig f;
  f.command = Command::figure;
  f.figure_id = "3c";
  CHECK(run(f, out, err) == kExitUsage);
  RunConfig e = density_config("2.01:20:10");
  e.metric = Metric::kappa_e;
  CHECK(run(e, out, err) == kExitUsage);
  RunConfig g;
  g.command = Command::mgf;
  g.metric = Metric::lambda_min;
  g.n = 3;
  g.alpha = 0;
  CHECK(run(g, out, err) == kExitUsage);
  CHECK(err.str().find("error:") != std::string::npos);
}

TEST_CASE("mc command") {
  RunConfig c;
  c.command = Command::mc;
  c.metric = Metric::lambda_min;
  c.n = 3;
  c.alpha = 1;
  c.samples = 20000;
  c.seed = 5;
  c.bins = 30;
  c.format = OutputFormat::json;
  std::ostringstream out, err;
  REQUIRE(run(c, out, err) == kExitOk);
  const auto doc = nlohmann::json::parse(out.str());
  const auto& rep = doc["report"];
  double total = 0;
  for (double m : rep["histogram"]["masses"]) total += m;
  CHECK(std::abs(total - 1.0) < 1e-12);
  CHECK(rep["ks_statistic"].get<double>() < rep["ks_threshold"].get<double>());
  CHECK(doc["cdf_mass"].get<double>() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("figure outputs are reproducible") {
  ::setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  const auto d1 = scratch("fig");
  RunConfig c;
  c.command = Command::figure;
  c.figure_id = "2a";
  c.samples = 4000;
  c.seed = 3;
  c.output = d1.string();
  std::ostringstream out, err;
  const char* names[] = {"fig2a_curve.csv", "fig2a_hist.csv", "fig2a_report.json"};
  REQUIRE(run(c, out, err) == kExitOk);
  std::vector<std::string> first;
  for (const char* f : names) first.push_back(slurp(d1 / f));
  REQUIRE(run(c, out, err) == kExitOk);
  for (int i = 0; i < 3; ++i) CHECK(slurp(d1 / names[i]) == first[i]);
  const auto hist = read_csv(slurp(d1 / "fig2a_hist.csv"));
  double total = 0;
  for (const auto& r : hist) total += r[2];
  CHECK(std::abs(total - 1.0) < 1e-12);
  const auto curve = read_csv(slurp(d1 / "fig2a_curve.csv"));
  CHECK(curve.size() == 200);
  CHECK(curve.back()[0] == doctest::Approx(hist.back()[1]));
  const auto rep = nlohmann::json::parse(slurp(d1 / "fig2a_report.json"));
  CHECK(rep["curve_meta"]["timestamp"] == "2023-11-14T22:13:20Z");
  ::unsetenv("SOURCE_DATE_EPOCH");
  std::filesystem::remove_all(d1);
}

}
