#include "facetflow/solver.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <cmath>

namespace facetflow {

ContinuationSchedule ContinuationSchedule::geometric(double delta, double eps0, double factor,
                                                     int steps) {
  ContinuationSchedule s;
  s.delta = delta;
  double e = eps0;
  for (int k = 0; k < steps; ++k) {
    s.eps_list.push_back(e);
    e *= factor;
  }
  s.validate();
  return s;
}

ContinuationSchedule ContinuationSchedule::halving_to(double delta, double eps0, double eps_min) {
  ContinuationSchedule s;
  s.delta = delta;
  double e = eps0;
  while (e > eps_min * (1.0 + 1e-12)) {
    s.eps_list.push_back(e);
    e *= 0.5;
  }
  if (s.eps_list.empty() || s.eps_list.back() > eps_min * (1.0 + 1e-12))
    s.eps_list.push_back(eps_min);
  else
    s.eps_list.back() = eps_min;
  s.validate();
  return s;
}

void ContinuationSchedule::validate() const {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("ContinuationSchedule: delta must lie in (0,1)");
  if (eps_list.empty()) throw std::invalid_argument("ContinuationSchedule: empty schedule");
  for (size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0 && eps_list[k] < 1.0))
      throw std::invalid_argument("ContinuationSchedule: eps values must lie in (0,1)");
    if (k > 0 && !(eps_list[k] < eps_list[k - 1]))
      throw std::invalid_argument("ContinuationSchedule: eps values must strictly decrease");
  }
}

Eigen::VectorXd linear_solve_spd(const Eigen::SparseMatrix<double>& A,
                                 const Eigen::VectorXd& rhs, const SolverConfig::Cg& cg) {
  if (A.rows() != A.cols() || A.rows() != rhs.size())
    throw std::invalid_argument("linear_solve_spd: shape mismatch");
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      solver;
  solver.setTolerance(cg.tol);
  solver.setMaxIterations(cg.max_iterations);
  solver.compute(A);
  Eigen::VectorXd x = solver.solve(rhs);
  if (solver.info() != Eigen::Success)
    throw LinearSolveError("linear_solve_spd: conjugate gradients did not converge (error " +
                           std::to_string(solver.error()) + ")");
  return x;
}

double grad_diff_lp_norm(const VectorField& a, const VectorField& b, double p) {
  if (!a.grid.same_layout(b.grid))
    throw std::invalid_argument("grad_diff_lp_norm: fields on different grids");
  double acc = 0.0;
  for (int c = 0; c < a.grid.cell_count(); ++c)
    acc += a.grid.cell_area(c) * std::pow((a.values.col(c) - b.values.col(c)).norm(), p);
  return std::pow(acc, 1.0 / p);
}

Solution solve_fixed_eps(const ProblemSpec& spec, double eps, const ScalarField& init,
                         const SolverConfig& config) {
  spec.validate();
  config.validate();
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("solve_fixed_eps: eps not in (0,1)");
  if (!spec.grid.same_layout(init.grid))
    throw std::invalid_argument("solve_fixed_eps: init on the wrong grid");
  for (int i = 0; i < spec.grid.node_count(); ++i)
    if (spec.grid.is_boundary(i) && init.values[i] != spec.dirichlet[i])
      throw std::invalid_argument("solve_fixed_eps: init violates the Dirichlet data");

  const double fsup = spec.source.size() ? spec.source.cwiseAbs().maxCoeff() : 0.0;
  const double tol = config.tol_residual_abs + config.tol_residual_rel * fsup;

  ScalarField u = init;
  double energy = assemble_energy(spec, eps, u);
  Solution sol;
  sol.eps = eps;
  sol.energy_history.push_back(energy);

  int iter = 0;
  for (;; ++iter) {
    ScalarField r = assemble_residual(spec, eps, u);
    double rnorm = r.values.cwiseAbs().maxCoeff();
    if (rnorm <= tol) {
      sol.u = u;
      sol.grad = gradient_field(spec.grid, u);
      sol.newton_iters = iter;
      sol.residual_norm = rnorm;
      sol.energy = energy;
      return sol;
    }
    if (iter >= config.max_newton) {
      sol.u = u;
      sol.grad = gradient_field(spec.grid, u);
      sol.newton_iters = iter;
      sol.residual_norm = rnorm;
      sol.energy = energy;
      throw NonConvergenceError("solve_fixed_eps: max Newton iterations at eps " +
                                    std::to_string(eps) + " (residual " + std::to_string(rnorm) +
                                    ")",
                                sol);
    }

    Eigen::SparseMatrix<double> H = assemble_hessian(spec, eps, u);
    Eigen::VectorXd d = linear_solve_spd(H, -r.values, config.cg);
    double slope = r.values.dot(d);  // negative for an SPD system

    double t = 1.0;
    bool accepted = false;
    // Assembled energies carry ~1e-16 relative rounding noise; without this
    // slack the sufficient-decrease test thrashes once the true decrease
    // drops below it.
    const double slack = 1e-14 * (std::abs(energy) + 1.0);
    for (int bt = 0; bt < config.armijo.max_backtracks; ++bt) {
      ScalarField trial{spec.grid, u.values + t * d};
      double etrial = assemble_energy(spec, eps, trial);
      if (etrial <= energy + config.armijo.c1 * t * slope + slack) {
        u = std::move(trial);
        energy = etrial;
        sol.energy_history.push_back(energy);
        accepted = true;
        break;
      }
      t *= config.armijo.backtrack;
    }
    if (!accepted) {
      sol.u = u;
      sol.grad = gradient_field(spec.grid, u);
      sol.newton_iters = iter;
      sol.residual_norm = rnorm;
      sol.energy = energy;
      throw NonConvergenceError("solve_fixed_eps: line search failed at eps " +
                                    std::to_string(eps),
                                sol);
    }
  }
}

ScalarField harmonic_extension(const ProblemSpec& spec, const SolverConfig& config) {
  ProblemSpec laplace = spec;
  laplace.density = DensityParams::model(0.0, 2.0);
  laplace.mode = RelaxMode::closed_form;
  laplace.source.setZero();
  ScalarField init = ScalarField::zeros(spec.grid);
  for (int i = 0; i < spec.grid.node_count(); ++i)
    if (spec.grid.is_boundary(i)) init.values[i] = spec.dirichlet[i];
  // Quadratic energy: one Newton step is exact.
  return solve_fixed_eps(laplace, 0.5, init, config).u;
}

SolutionSequence continuation_solve(const ProblemSpec& spec, const ContinuationSchedule& schedule,
                                    const SolverConfig& config) {
  schedule.validate();
  SolutionSequence seq;
  seq.p = spec.density.p;
  seq.delta = schedule.delta;

  ScalarField current = harmonic_extension(spec, config);
  for (double eps : schedule.eps_list) {
    Solution sol;
    try {
      sol = solve_fixed_eps(spec, eps, current, config);
    } catch (NonConvergenceError& e) {
      throw NonConvergenceError(std::string(e.what()) + " [continuation eps " +
                                    std::to_string(eps) + "]",
                                e.last_iterate);
    }
    current = sol.u;
    if (!seq.steps.empty())
      seq.grad_diff_lp.push_back(grad_diff_lp_norm(sol.grad, seq.steps.back().grad, seq.p));
    seq.steps.push_back(std::move(sol));
  }
  return seq;
}

}  // namespace facetflow
