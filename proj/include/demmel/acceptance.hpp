#pragma once

#include <functional>
#include <string>
#include <vector>

namespace demmel {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;  // 0: no runtime limit
};

inline constexpr int kCriterionCount = 10;

// Runs one criterion (1..10). Exceptions thrown while evaluating become a
// failed result carrying the message.
CriterionResult run_criterion(int id);

// "[PASS] 3 title: detail (12.3 s, budget 60 s)"
std::string format_line(const CriterionResult& r);

// Runs the listed criteria (all when empty), calling `report` after each.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& report = {});

}  // namespace demmel
