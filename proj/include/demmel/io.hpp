#pragma once

#include "demmel/curve.hpp"
#include "demmel/sampler.hpp"

#include "json.hpp"

#include <string>

namespace demmel {

// %.17g: lossless for doubles.
std::string format_number(double x);

// Writes to a sibling temporary and renames over path, so readers never see
// a partial file. Throws std::runtime_error on I/O failure.
void write_atomic(const std::string& path, const std::string& content);

std::string curve_csv(const DensityCurve& c);      // x,pdf
std::string histogram_csv(const Histogram& h);     // bin_lo,bin_hi,mass

nlohmann::json to_json(const DensityCurve& c);
nlohmann::json to_json(const McReport& r);
nlohmann::json to_json(const Dims& d);

}  // namespace demmel
