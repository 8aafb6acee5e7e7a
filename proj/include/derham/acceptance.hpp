#pragma once

#include <string>
#include <vector>

namespace derham::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values behind the verdict
  double seconds = 0.0;
  double time_limit = 0.0;
};

inline constexpr int kCriterionCount = 10;

CriterionResult run_criterion(int id);
std::vector<CriterionResult> run_all();

/// One "PASS|FAIL  #id name (t s): detail" line.
std::string format_line(const CriterionResult& r);

}  // namespace derham::acceptance
