#include "facetflow/runconfig.hpp"

#include <fstream>

#include "facetflow/expr.hpp"
#include <json.hpp>

namespace facetflow {

using nlohmann::json;

ProblemSpec RunConfig::build_problem() const {
  ProblemSpec spec;
  if (custom) {
    const Custom& c = *custom;
    spec.name = "custom";
    if (c.dim == 1)
      spec.grid = Grid::interval(c.lo.x(), c.hi.x(), res_x > 0 ? res_x : 257);
    else
      spec.grid = Grid::rectangle(c.lo, c.hi, res_x > 0 ? res_x : 65,
                                  res_y > 0 ? res_y : (res_x > 0 ? res_x : 65));
    spec.density = DensityParams::model(b_override.value_or(c.b), p_override.value_or(c.p));
    spec.q = c.q;
    Expr fe = Expr::parse(c.f);
    Expr ge = Expr::parse(c.g);
    spec.source = Eigen::VectorXd::Zero(spec.grid.node_count());
    spec.dirichlet = Eigen::VectorXd::Zero(spec.grid.node_count());
    for (int i = 0; i < spec.grid.node_count(); ++i) {
      Eigen::Vector2d x = spec.grid.node(i);
      spec.source[i] = fe.eval(x.x(), x.y());
      if (spec.grid.is_boundary(i)) spec.dirichlet[i] = ge.eval(x.x(), x.y());
    }
    spec.validate();
    return spec;
  }
  spec = builtin_problem(problem, res_x);
  if (b_override || p_override) {
    spec.density = DensityParams::model(b_override.value_or(spec.density.b),
                                        p_override.value_or(spec.density.p));
    spec.validate();
  }
  return spec;
}

ContinuationSchedule RunConfig::build_schedule() const {
  ContinuationSchedule sched =
      custom ? ContinuationSchedule::halving_to(0.05, 0.1, 5e-3) : default_schedule(problem);
  if (delta) sched.delta = *delta;
  if (eps_list) {
    sched.eps_list = *eps_list;
  } else if (eps0 || eps_factor || eps_steps) {
    double e0 = eps0.value_or(0.1);
    double fac = eps_factor.value_or(0.5);
    int steps = eps_steps.value_or(8);
    if (!(fac > 0.0 && fac < 1.0)) throw ConfigError("eps factor must lie in (0,1)");
    sched = ContinuationSchedule::geometric(sched.delta, e0, fac, steps);
  }
  sched.validate();
  return sched;
}

DiagnosticsParams RunConfig::build_diagnostics(const ContinuationSchedule& sched) const {
  DiagnosticsParams d = diagnostics;
  if (!diagnostics_delta_set) d.delta = sched.delta;
  d.seed = seed;
  return d;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    f >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("problem")) cfg.problem = j["problem"].get<std::string>();
    if (j.contains("custom")) {
      RunConfig::Custom c;
      const json& jc = j["custom"];
      c.dim = jc.value("dim", 2);
      if (c.dim != 1 && c.dim != 2) throw ConfigError("custom.dim must be 1 or 2");
      if (jc.contains("bounds")) {
        auto b = jc["bounds"];
        c.lo.x() = b[0][0].get<double>();
        c.hi.x() = b[0][1].get<double>();
        if (c.dim == 2) {
          c.lo.y() = b[1][0].get<double>();
          c.hi.y() = b[1][1].get<double>();
        }
      }
      c.b = jc.value("b", 1.0);
      c.p = jc.value("p", 2.0);
      if (jc.contains("q") && !jc["q"].is_null()) c.q = jc["q"].get<double>();
      c.f = jc.value("f", "0");
      c.g = jc.value("g", "0");
      cfg.custom = c;
      cfg.problem = "custom";
    }
    if (j.contains("grid") && j["grid"].contains("resolution")) {
      auto r = j["grid"]["resolution"];
      cfg.res_x = r[0].get<int>();
      if (r.size() > 1) cfg.res_y = r[1].get<int>();
    }
    if (j.contains("density")) {
      if (j["density"].contains("b")) cfg.b_override = j["density"]["b"].get<double>();
      if (j["density"].contains("p")) cfg.p_override = j["density"]["p"].get<double>();
    }
    if (j.contains("schedule")) {
      const json& s = j["schedule"];
      if (s.contains("delta")) cfg.delta = s["delta"].get<double>();
      if (s.contains("eps_list"))
        cfg.eps_list = s["eps_list"].get<std::vector<double>>();
      if (s.contains("eps0")) cfg.eps0 = s["eps0"].get<double>();
      if (s.contains("factor")) cfg.eps_factor = s["factor"].get<double>();
      if (s.contains("steps")) cfg.eps_steps = s["steps"].get<int>();
    }
    if (j.contains("solver")) {
      const json& s = j["solver"];
      cfg.solver.tol_residual_abs = s.value("tol_abs", cfg.solver.tol_residual_abs);
      cfg.solver.tol_residual_rel = s.value("tol_rel", cfg.solver.tol_residual_rel);
      cfg.solver.max_newton = s.value("max_newton", cfg.solver.max_newton);
      if (s.contains("armijo")) {
        cfg.solver.armijo.c1 = s["armijo"].value("c1", cfg.solver.armijo.c1);
        cfg.solver.armijo.backtrack =
            s["armijo"].value("backtrack", cfg.solver.armijo.backtrack);
        cfg.solver.armijo.max_backtracks =
            s["armijo"].value("max_backtracks", cfg.solver.armijo.max_backtracks);
      }
      if (s.contains("cg")) {
        cfg.solver.cg.tol = s["cg"].value("tol", cfg.solver.cg.tol);
        cfg.solver.cg.max_iterations =
            s["cg"].value("max_iterations", cfg.solver.cg.max_iterations);
      }
    }
    if (j.contains("diagnostics")) {
      const json& d = j["diagnostics"];
      if (d.contains("delta")) {
        cfg.diagnostics.delta = d["delta"].get<double>();
        cfg.diagnostics_delta_set = true;
      }
      cfg.diagnostics.beta_hat0 = d.value("beta_hat0", cfg.diagnostics.beta_hat0);
      cfg.diagnostics.facet_tol = d.value("facet_tol", cfg.diagnostics.facet_tol);
      if (d.contains("excess_radii"))
        cfg.diagnostics.excess_radii = d["excess_radii"].get<std::vector<double>>();
      cfg.diagnostics.holder_pair_budget =
          d.value("pair_budget", cfg.diagnostics.holder_pair_budget);
    }
    if (j.contains("output")) {
      cfg.out_dir = j["output"].value("dir", cfg.out_dir);
      if (j["output"].contains("formats"))
        cfg.formats = j["output"]["formats"].get<std::vector<std::string>>();
    }
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("samples")) cfg.samples = j["samples"].get<long>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  for (const auto& fmt : cfg.formats)
    if (fmt != "csv" && fmt != "vtk") throw ConfigError("unknown output format '" + fmt + "'");
  return cfg;
}

DiagnosticsReport run_solve(const RunConfig& cfg, std::string* report_out) {
  if (cfg.out_dir.empty()) throw ConfigError("solve requires an output directory");
  ProblemSpec spec = cfg.build_problem();
  ContinuationSchedule sched = cfg.build_schedule();
  DiagnosticsParams diag = cfg.build_diagnostics(sched);
  diag.q = spec.q;
  cfg.solver.validate();
  if (!(sched.eps_list.back() < diag.delta / 8.0))
    throw ConfigError("schedule final eps " + std::to_string(sched.eps_list.back()) +
                      " must satisfy eps < delta/8 = " + std::to_string(diag.delta / 8.0) +
                      " for the diagnostics pass");

  SolutionSequence seq = continuation_solve(spec, sched, cfg.solver);
  const Solution& final_sol = seq.steps.back();

  ensure_directory(cfg.out_dir);
  DiagnosticsReport rep = compute_report(spec, final_sol, diag);

  RunMeta meta;
  meta.problem = spec.name;
  meta.dim = spec.grid.dim;
  meta.lo = spec.grid.lo;
  meta.hi = spec.grid.hi;
  meta.nx = spec.grid.nx;
  meta.ny = spec.grid.ny;
  meta.b = spec.density.b;
  meta.p = spec.density.p;
  meta.q = spec.q;
  meta.delta = sched.delta;
  meta.eps_list = sched.eps_list;
  meta.final_eps = final_sol.eps;
  meta.diagnostics = diag;

  bool want_vtk = false;
  for (const auto& fmt : cfg.formats) want_vtk |= fmt == "vtk";
  // u.csv and cells.csv always go out; diagnose and export reload from them.
  write_solution_csv(cfg.out_dir + "/u.csv", final_sol, sched.delta);
  write_cells_csv(cfg.out_dir + "/cells.csv", final_sol.grad);
  if (want_vtk) write_vtk(cfg.out_dir + "/u.vtk", final_sol, sched.delta);
  if (seq.steps.size() >= 2) {
    ConvergenceTable table = convergence_report(seq, spec.density.p, sched.delta);
    write_convergence_csv(cfg.out_dir + "/convergence.csv", table, seq.steps);
  }
  write_meta(cfg.out_dir + "/meta.json", meta);
  write_report(cfg.out_dir, rep);
  if (report_out) *report_out = report_text(rep);
  return rep;
}

}  // namespace facetflow
