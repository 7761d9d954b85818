#pragma once

#include <Eigen/SparseCore>
#include <stdexcept>
#include <vector>

#include "facetflow/assembly.hpp"

namespace facetflow {

struct SolverConfig {
  // The reachable residual floor scales like (1/eps) * cg.tol at small eps;
  // 1e-9 clears it for the desk-scale eps range while staying far below
  // discretization error.
  double tol_residual_abs = 1e-9;
  double tol_residual_rel = 1e-12;
  int max_newton = 100;
  struct Armijo {
    double c1 = 1e-4;        // slope fraction, < 1/2
    double backtrack = 0.5;  // step shrink factor
    int max_backtracks = 60;
  } armijo;
  struct Cg {
    double tol = 1e-10;  // relative residual
    int max_iterations = 200000;
  } cg;

  void validate() const {
    if (!(tol_residual_abs > 0.0 && tol_residual_rel >= 0.0))
      throw std::invalid_argument("SolverConfig: tolerances must be positive");
    if (!(armijo.c1 > 0.0 && armijo.c1 < 0.5))
      throw std::invalid_argument("SolverConfig: armijo slope must lie in (0, 1/2)");
    if (!(armijo.backtrack > 0.0 && armijo.backtrack < 1.0))
      throw std::invalid_argument("SolverConfig: backtrack factor must lie in (0,1)");
    if (max_newton < 1 || armijo.max_backtracks < 1 || cg.max_iterations < 1)
      throw std::invalid_argument("SolverConfig: counts must be positive");
    if (!(cg.tol > 0.0)) throw std::invalid_argument("SolverConfig: cg tolerance must be positive");
  }
};

struct ContinuationSchedule {
  double delta = 0.05;
  std::vector<double> eps_list;

  // eps0, eps0*factor, ... (steps values), optionally clamped so the last
  // entry is eps_min exactly.
  static ContinuationSchedule geometric(double delta, double eps0, double factor, int steps);
  static ContinuationSchedule halving_to(double delta, double eps0, double eps_min);

  void validate() const;

  // Relaxed truncations with this delta are meaningful only for eps < delta/8.
  bool diagnostic_eligible(double eps) const { return eps < delta / 8.0; }
};

struct Solution {
  ScalarField u;
  VectorField grad;
  double eps = 0.0;
  int newton_iters = 0;
  double residual_norm = 0.0;
  double energy = 0.0;
  std::vector<double> energy_history;  // energy at start plus each accepted step
};

struct SolutionSequence {
  std::vector<Solution> steps;
  std::vector<double> grad_diff_lp;  // ||grad_{k+1} - grad_k||_{L^p}, size steps-1
  double p = 2.0;
  double delta = 0.05;
};

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, Solution last)
      : std::runtime_error(what), last_iterate(std::move(last)) {}
  Solution last_iterate;
};

class LinearSolveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Jacobi-preconditioned conjugate gradients for SPD systems.
Eigen::VectorXd linear_solve_spd(const Eigen::SparseMatrix<double>& A,
                                 const Eigen::VectorXd& rhs, const SolverConfig::Cg& cg);

// Damped Newton minimization of the discrete regularized energy at fixed eps.
// init must satisfy the Dirichlet data exactly.
Solution solve_fixed_eps(const ProblemSpec& spec, double eps, const ScalarField& init,
                         const SolverConfig& config);

// Warm-started sweep over the schedule; the first solve starts from the P1
// harmonic extension of the boundary data.
SolutionSequence continuation_solve(const ProblemSpec& spec, const ContinuationSchedule& schedule,
                                    const SolverConfig& config);

ScalarField harmonic_extension(const ProblemSpec& spec, const SolverConfig& config);

// (sum_c |cell| |a_c - b_c|^p)^{1/p} over cells.
double grad_diff_lp_norm(const VectorField& a, const VectorField& b, double p);

}  // namespace facetflow
