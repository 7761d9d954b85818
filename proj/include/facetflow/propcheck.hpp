#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace facetflow {

struct SuiteSpec {
  std::string id;
  long samples = 100000;
  std::uint64_t seed = 7;
  double tol = 1e-9;  // relative slack on asserted inequalities

  // Sampling ranges; radii are log-uniform, directions uniform.
  double radius_lo = 1e-6, radius_hi = 1e3;
  double b_lo = 0.1, b_hi = 10.0;
  double p_lo = 1.1, p_hi = 4.0;
};

struct SuiteReport {
  std::string id;
  bool asserting = false;
  long samples = 0;
  long violations = 0;
  double worst_excess = 0.0;   // most violated margin (asserting suites)
  std::string worst_witness;   // minimal witness of the worst violation
  bool fitted = false;
  double fitted_constant = 0.0;
  double refit_constant = 0.0;  // same fit at doubled samples
  bool fitted_stable = true;    // within +-20% under doubling
  double elapsed_s = 0.0;

  bool passed() const {
    if (asserting && violations > 0) return false;
    if (fitted && (!std::isfinite(fitted_constant) || !fitted_stable)) return false;
    return true;
  }
};

// Suite ids, in battery order.
const std::vector<std::string>& suite_ids();

SuiteReport run_suite(const SuiteSpec& spec);

// All suites with per-suite derived seeds; suites run in parallel, reports in
// battery order.
std::vector<SuiteReport> run_battery(std::uint64_t seed, long samples);

std::string format_report(const SuiteReport& r);

}  // namespace facetflow
