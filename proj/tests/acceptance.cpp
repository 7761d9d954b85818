// Acceptance benchmark driver: one pass/fail line per criterion.
// Usage: facetflow_acceptance [criterion]

#include <cstdlib>
#include <iostream>

#include "facetflow/bench.hpp"

int main(int argc, char** argv) {
  int which = 0;
  if (argc > 1) which = std::atoi(argv[1]);
  int failures = 0;
  try {
    for (const auto& r : facetflow::run_acceptance(which)) {
      std::cout << facetflow::format_criterion(r) << std::endl;
      failures += r.passed ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "acceptance run error: " << e.what() << std::endl;
    return 99;
  }
  return failures;
}
