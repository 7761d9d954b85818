// facetflow: solve/verify/diagnose/export/bench front end for the regularized
// 1-Laplacian + p-Laplacian solver library.

#include <CLI11.hpp>
#include <iostream>

#include "facetflow/bench.hpp"
#include "facetflow/propcheck.hpp"
#include "facetflow/runconfig.hpp"

namespace ff = facetflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNonConvergence = 3;
constexpr int kExitVerification = 4;

struct CommonFlags {
  std::string problem;
  std::string config;
  std::string out;
  std::string grid;
  std::string format;
  std::uint64_t seed = 0;
  bool seed_set = false;
  long samples = 0;
  double eps0 = 0.0, eps_factor = 0.0, delta = 0.0;
  int eps_steps = 0;
  bool eps0_set = false, factor_set = false, steps_set = false, delta_set = false;
};

void parse_grid_flag(const std::string& text, ff::RunConfig& cfg) {
  auto x = text.find('x');
  try {
    if (x == std::string::npos) {
      cfg.res_x = std::stoi(text);
    } else {
      cfg.res_x = std::stoi(text.substr(0, x));
      cfg.res_y = std::stoi(text.substr(x + 1));
    }
  } catch (const std::exception&) {
    throw ff::ConfigError("bad --grid value '" + text + "' (expected N or NXxNY)");
  }
  if (cfg.res_x < 2 || (x != std::string::npos && cfg.res_y < 2))
    throw ff::ConfigError("--grid resolutions must be at least 2");
}

ff::RunConfig assemble_config(const CommonFlags& flags) {
  ff::RunConfig cfg;
  if (!flags.config.empty()) cfg = ff::load_config_file(flags.config);
  if (!flags.problem.empty()) {
    cfg.problem = flags.problem;
    if (flags.problem != "custom") cfg.custom.reset();
  }
  if (!flags.out.empty()) cfg.out_dir = flags.out;
  if (!flags.grid.empty()) parse_grid_flag(flags.grid, cfg);
  if (flags.seed_set) cfg.seed = flags.seed;
  if (flags.samples > 0) cfg.samples = flags.samples;
  if (flags.eps0_set) cfg.eps0 = flags.eps0;
  if (flags.factor_set) cfg.eps_factor = flags.eps_factor;
  if (flags.steps_set) cfg.eps_steps = flags.eps_steps;
  if (flags.delta_set) cfg.delta = flags.delta;
  if (!flags.format.empty()) {
    cfg.formats.clear();
    std::stringstream ss(flags.format);
    std::string tok;
    while (std::getline(ss, tok, ',')) cfg.formats.push_back(tok);
    for (const auto& f : cfg.formats)
      if (f != "csv" && f != "vtk") throw ff::ConfigError("unknown output format '" + f + "'");
  }
  return cfg;
}

int cmd_solve(const CommonFlags& flags) {
  ff::RunConfig cfg = assemble_config(flags);
  std::string report;
  ff::run_solve(cfg, &report);
  std::cout << "wrote " << cfg.out_dir << "/{u.csv,cells.csv,convergence.csv,meta.json,report.txt}"
            << std::endl;
  std::cout << report;  // last line: plug_value
  return kExitOk;
}

int cmd_verify(const CommonFlags& flags) {
  std::uint64_t seed = flags.seed_set ? flags.seed : 7;
  long samples = flags.samples > 0 ? flags.samples : 100000;
  auto reports = ff::run_battery(seed, samples);
  bool asserting_ok = true;
  for (const auto& r : reports) {
    std::cout << ff::format_report(r) << '\n';
    if (r.asserting && r.violations > 0) asserting_ok = false;
  }
  std::cout << (asserting_ok ? "verification passed" : "verification FAILED") << std::endl;
  return asserting_ok ? kExitOk : kExitVerification;
}

int cmd_diagnose(const CommonFlags& flags) {
  if (flags.out.empty()) throw ff::ConfigError("diagnose requires --in/--out run directory");
  ff::RunMeta meta = ff::read_meta(flags.out + "/meta.json");
  ff::Solution sol = ff::read_solution(flags.out, meta);
  ff::ProblemSpec spec;
  spec.name = meta.problem;
  spec.grid = sol.u.grid;
  spec.density = ff::DensityParams::model(meta.b, meta.p);
  spec.q = meta.q;
  spec.source = Eigen::VectorXd::Zero(spec.grid.node_count());
  spec.dirichlet = Eigen::VectorXd::Zero(spec.grid.node_count());
  ff::DiagnosticsParams diag = meta.diagnostics;
  if (flags.delta_set) diag.delta = flags.delta;
  if (flags.seed_set) diag.seed = flags.seed;
  ff::DiagnosticsReport rep = ff::compute_report(spec, sol, diag);
  ff::write_report(flags.out, rep);
  std::cout << ff::report_text(rep);
  return kExitOk;
}

int cmd_export(const CommonFlags& flags) {
  if (flags.out.empty()) throw ff::ConfigError("export requires --in/--out run directory");
  ff::RunMeta meta = ff::read_meta(flags.out + "/meta.json");
  ff::Solution sol = ff::read_solution(flags.out, meta);
  std::string fmt = flags.format.empty() ? "vtk" : flags.format;
  if (fmt == "vtk") {
    ff::write_vtk(flags.out + "/u.vtk", sol, meta.delta);
    std::cout << "wrote " << flags.out << "/u.vtk" << std::endl;
  } else if (fmt == "csv") {
    ff::write_solution_csv(flags.out + "/u.csv", sol, meta.delta);
    ff::write_cells_csv(flags.out + "/cells.csv", sol.grad);
    std::cout << "wrote " << flags.out << "/{u.csv,cells.csv}" << std::endl;
  } else {
    throw ff::ConfigError("unknown output format '" + fmt + "'");
  }
  return kExitOk;
}

int cmd_bench(int which) {
  auto results = ff::run_acceptance(which);
  int failures = 0;
  for (const auto& r : results) {
    std::cout << ff::format_criterion(r) << '\n';
    failures += r.passed ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? kExitOk : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"facetflow: regularized 1+p-Laplacian solver, diagnostics and verification"};
  app.require_subcommand(1);

  CommonFlags flags;
  int bench_which = 0;

  auto add_common = [&](CLI::App* sub, bool solve_like) {
    if (solve_like) {
      sub->add_option("--problem", flags.problem, "builtin problem (plug1d, pipe2d, spohn2d)");
      sub->add_option("--config", flags.config, "JSON config file");
      sub->add_option("--grid", flags.grid, "resolution override: N or NXxNY");
      sub->add_option("--eps0", flags.eps0, "first continuation eps")->each([&](const std::string&) {
        flags.eps0_set = true;
      });
      sub->add_option("--eps-factor", flags.eps_factor, "geometric eps factor")
          ->each([&](const std::string&) { flags.factor_set = true; });
      sub->add_option("--eps-steps", flags.eps_steps, "number of eps steps")
          ->each([&](const std::string&) { flags.steps_set = true; });
      sub->add_option("--format", flags.format, "output formats, comma separated (csv,vtk)");
    }
    sub->add_option("--delta", flags.delta, "truncation parameter delta")
        ->each([&](const std::string&) { flags.delta_set = true; });
    sub->add_option("--out", flags.out, "run directory");
    sub->add_option("--in", flags.out, "run directory (alias of --out)");
    sub->add_option("--seed", flags.seed, "RNG seed")->each([&](const std::string&) {
      flags.seed_set = true;
    });
    sub->add_option("--samples", flags.samples, "sample count for verification");
  };

  CLI::App* solve = app.add_subcommand("solve", "run the eps-continuation and export fields");
  add_common(solve, true);
  CLI::App* verify = app.add_subcommand("verify", "run the randomized verification battery");
  add_common(verify, false);
  CLI::App* diagnose = app.add_subcommand("diagnose", "recompute diagnostics from a saved run");
  add_common(diagnose, false);
  CLI::App* exp = app.add_subcommand("export", "re-export a saved run (csv or vtk)");
  add_common(exp, false);
  exp->add_option("--format", flags.format, "export format (csv or vtk)");
  CLI::App* bench = app.add_subcommand("bench", "run the acceptance benchmarks");
  bench->add_option("--criterion", bench_which, "criterion number (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (solve->parsed()) return cmd_solve(flags);
    if (verify->parsed()) return cmd_verify(flags);
    if (diagnose->parsed()) return cmd_diagnose(flags);
    if (exp->parsed()) return cmd_export(flags);
    if (bench->parsed()) return cmd_bench(bench_which);
  } catch (const ff::NonConvergenceError& e) {
    std::cerr << "solver error: " << e.what() << std::endl;
    return kExitNonConvergence;
  } catch (const ff::LinearSolveError& e) {
    std::cerr << "solver error: " << e.what() << std::endl;
    return kExitNonConvergence;
  } catch (const ff::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitConfig;
  }
  return kExitOk;
}
