// Acceptance gate. Without arguments every criterion runs; with
// "--criterion k" only criterion k does. Exit status is non-zero if any
// executed criterion fails.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "derham/acceptance.hpp"

int main(int argc, char** argv) {
  using namespace derham::acceptance;
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) {
    if (std::string(argv[i]) == "--criterion" && i + 1 < argc) ids.push_back(std::atoi(argv[++i]));
  }
  if (ids.empty()) {
    for (int id = 1; id <= kCriterionCount; ++id) ids.push_back(id);
  }
  bool ok = true;
  for (int id : ids) {
    const auto r = run_criterion(id);
    std::cout << format_line(r) << std::endl;
    ok = ok && r.pass;
  }
  return ok ? 0 : 1;
}
