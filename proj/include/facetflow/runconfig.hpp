#pragma once

#include <optional>
#include <string>
#include <vector>

#include "facetflow/diagnostics.hpp"
#include "facetflow/io.hpp"
#include "facetflow/problems.hpp"

namespace facetflow {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parsed run description: builtin problem name or a custom inline problem,
// plus schedule/solver/diagnostics/output settings. File values come from a
// JSON config; CLI flags override them afterwards.
struct RunConfig {
  std::string problem = "plug1d";

  // custom problem (problem == "custom")
  struct Custom {
    int dim = 2;
    Eigen::Vector2d lo{-1.0, -1.0}, hi{1.0, 1.0};
    double b = 1.0, p = 2.0;
    double q = std::numeric_limits<double>::infinity();
    std::string f = "0";
    std::string g = "0";
  };
  std::optional<Custom> custom;

  std::optional<double> b_override, p_override;
  int res_x = 0, res_y = 0;  // 0 = problem default

  std::optional<double> delta;
  std::optional<double> eps0;
  std::optional<double> eps_factor;
  std::optional<int> eps_steps;
  std::optional<std::vector<double>> eps_list;

  SolverConfig solver;
  DiagnosticsParams diagnostics;
  bool diagnostics_delta_set = false;

  std::string out_dir;
  std::vector<std::string> formats = {"csv"};
  std::uint64_t seed = 7;
  long samples = 100000;

  ProblemSpec build_problem() const;
  ContinuationSchedule build_schedule() const;
  DiagnosticsParams build_diagnostics(const ContinuationSchedule& sched) const;
};

RunConfig load_config_file(const std::string& path);

// Orchestration used by the CLI `solve` subcommand: continuation solve,
// convergence table, diagnostics report, and all exports. Returns the report.
DiagnosticsReport run_solve(const RunConfig& cfg, std::string* report_out = nullptr);

}  // namespace facetflow
