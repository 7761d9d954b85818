#pragma once

#include <string>
#include <vector>

namespace facetflow {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

// Acceptance benchmarks. which = 0 runs all six, otherwise just that one.
std::vector<CriterionResult> run_acceptance(int which = 0);

std::string format_criterion(const CriterionResult& r);

}  // namespace facetflow
