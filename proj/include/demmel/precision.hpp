#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <limits>
#include <string>

namespace demmel {

// 50 significant decimal digits, software floating point.
using Extended = boost::multiprecision::number<
    boost::multiprecision::cpp_bin_float<50>, boost::multiprecision::et_off>;

enum class Precision { automatic, double_precision, extended };

// Diagnostics reported by the cancellation-prone evaluators.
struct EvalInfo {
  Precision used = Precision::double_precision;
  // sum |terms| / |sum|, the amplification factor of rounding errors.
  double cancellation = 1.0;
};

// Largest cancellation factor tolerated in double before escalating (auto)
// or failing (forced double). eps * 1e6 leaves ~10 good digits.
inline constexpr double kDoubleCancellationBudget = 1e6;

// Above this n the automatic policy always uses extended precision.
inline constexpr int kDoublePrecisionMaxN = 12;

template <class Real>
inline Real epsilon_of() {
  return std::numeric_limits<Real>::epsilon();
}

inline std::string to_string(Precision p) {
  switch (p) {
    case Precision::automatic: return "auto";
    case Precision::double_precision: return "double";
    case Precision::extended: return "extended";
  }
  return "?";
}

}  // namespace demmel
