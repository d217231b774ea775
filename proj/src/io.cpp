#include "demmel/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

namespace demmel {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) {
      out.close();
      fs::remove(tmp);
      throw std::runtime_error("write to " + tmp.string() + " failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path + ": " + ec.message());
  }
}

std::string curve_csv(const DensityCurve& c) {
  std::string s = "x,pdf\n";
  for (std::size_t i = 0; i < c.grid.size(); ++i) {
    s += format_number(c.grid[i]);
    s += ',';
    s += format_number(c.values[i]);
    s += '\n';
  }
  return s;
}

std::string histogram_csv(const Histogram& h) {
  std::string s = "bin_lo,bin_hi,mass\n";
  for (std::size_t i = 0; i < h.masses.size(); ++i) {
    s += format_number(h.edges[i]);
    s += ',';
    s += format_number(h.edges[i + 1]);
    s += ',';
    s += format_number(h.masses[i]);
    s += '\n';
  }
  return s;
}

nlohmann::json to_json(const Dims& d) { return {{"n", d.n}, {"alpha", d.alpha}, {"m", d.m()}}; }

nlohmann::json to_json(const DensityCurve& c) {
  nlohmann::json j;
  j["metric"] = to_string(c.metric);
  j["kind"] = to_string(c.kind);
  if (c.dims) j["dims"] = to_json(*c.dims);
  if (c.mu) j["mu"] = *c.mu;
  if (c.alpha) j["alpha"] = *c.alpha;
  j["grid"] = c.grid;
  j["values"] = c.values;
  j["meta"] = {{"precision", to_string(c.meta.precision_used)},
               {"quad_order", c.meta.quad_order},
               {"quad_rel_tol", c.meta.quad_rel_tol},
               {"timestamp", c.meta.timestamp}};
  return j;
}

nlohmann::json to_json(const McReport& r) {
  return {{"dims", to_json(r.dims)},
          {"metric", to_string(r.metric)},
          {"samples", r.samples},
          {"seed", r.seed},
          {"bins", r.bins},
          {"histogram", {{"edges", r.histogram.edges}, {"masses", r.histogram.masses}, {"in_range", r.histogram.in_range}}},
          {"ks_statistic", r.ks_statistic},
          {"ks_threshold", r.ks_threshold},
          {"pass", r.pass}};
}

}  // namespace demmel
