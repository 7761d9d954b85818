#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "facetflow/problems.hpp"
#include "facetflow/solver.hpp"

using namespace facetflow;
using Eigen::Vector2d;

namespace {
double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
}

TEST_SUITE_BEGIN("solver");

TEST_CASE("cg solves the identity") {
  Eigen::SparseMatrix<double> I(5, 5);
  I.setIdentity();
  Eigen::VectorXd rhs(5);
  rhs << 1, -2, 3, 0.5, -0.1;
  SolverConfig::Cg cg;
  CHECK((linear_solve_spd(I, rhs, cg) - rhs).norm() < 1e-14);
}

TEST_CASE("cg matches a dense solve on the 1D Laplacian") {
  // h = 1/4, three unknowns
  Eigen::SparseMatrix<double> A(3, 3);
  std::vector<Eigen::Triplet<double>> t = {{0, 0, 8.0}, {1, 1, 8.0}, {2, 2, 8.0},
                                           {0, 1, -4.0}, {1, 0, -4.0}, {1, 2, -4.0},
                                           {2, 1, -4.0}};
  A.setFromTriplets(t.begin(), t.end());
  Eigen::VectorXd rhs = Eigen::VectorXd::Ones(3);
  SolverConfig::Cg cg;
  Eigen::VectorXd x = linear_solve_spd(A, rhs, cg);
  Eigen::VectorXd xd = Eigen::MatrixXd(A).ldlt().solve(rhs);
  CHECK((x - xd).norm() < 1e-10);
}

TEST_CASE("cg reaches the requested relative residual on random SPD systems") {
  std::mt19937_64 rng(3);
  Eigen::MatrixXd M(20, 20);
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) M(i, j) = 2.0 * u01(rng) - 1.0;
  Eigen::MatrixXd Ad = M.transpose() * M + Eigen::MatrixXd::Identity(20, 20);
  Eigen::SparseMatrix<double> A = Ad.sparseView();
  Eigen::VectorXd rhs(20);
  for (int i = 0; i < 20; ++i) rhs[i] = 2.0 * u01(rng) - 1.0;
  SolverConfig::Cg cg;
  Eigen::VectorXd x = linear_solve_spd(A, rhs, cg);
  CHECK((Ad * x - rhs).norm() / rhs.norm() <= cg.tol * 10.0);
  SolverConfig::Cg tight;
  tight.max_iterations = 1;
  CHECK_THROWS_AS(linear_solve_spd(A, rhs, tight), LinearSolveError);
}

TEST_CASE("zero data solves to zero immediately") {
  ProblemSpec spec = builtin_problem("plug1d", 65);
  spec.source.setZero();
  SolverConfig cfg;
  Solution s = solve_fixed_eps(spec, 0.1, ScalarField::zeros(spec.grid), cfg);
  CHECK(s.newton_iters <= 1);
  CHECK(s.u.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("linear boundary data is reproduced exactly") {
  ProblemSpec spec;
  spec.grid = Grid::rectangle({-1.0, -1.0}, {1.0, 1.0}, 17, 17);
  spec.density = DensityParams::model(1.0, 2.0);
  spec.source = Eigen::VectorXd::Zero(spec.grid.node_count());
  spec.dirichlet = Eigen::VectorXd::Zero(spec.grid.node_count());
  auto ell = [](const Vector2d& x) { return 0.3 * x.x() - 0.2 * x.y() + 0.1; };
  ScalarField init = ScalarField::zeros(spec.grid);
  for (int i = 0; i < spec.grid.node_count(); ++i) {
    double v = ell(spec.grid.node(i));
    spec.dirichlet[i] = v;
    if (spec.grid.is_boundary(i)) init.values[i] = v;
  }
  SolverConfig cfg;
  Solution s = solve_fixed_eps(spec, 0.2, harmonic_extension(spec, cfg), cfg);
  double worst = 0.0;
  for (int i = 0; i < spec.grid.node_count(); ++i)
    worst = std::max(worst, std::abs(s.u.values[i] - ell(spec.grid.node(i))));
  CHECK(worst < 1e-9);
}

TEST_CASE("energy decreases across accepted Newton steps") {
  ProblemSpec spec = builtin_problem("plug1d", 129);
  SolverConfig cfg;
  Solution s = solve_fixed_eps(spec, 0.05, ScalarField::zeros(spec.grid), cfg);
  REQUIRE(s.energy_history.size() >= 2);
  for (size_t k = 0; k + 1 < s.energy_history.size(); ++k)
    CHECK(s.energy_history[k + 1] <=
          s.energy_history[k] + 1e-13 * (1.0 + std::abs(s.energy_history[k])));
}

TEST_CASE("solution is independent of the starting point") {
  ProblemSpec spec = builtin_problem("plug1d", 129);
  SolverConfig cfg;
  Solution a = solve_fixed_eps(spec, 0.03, ScalarField::zeros(spec.grid), cfg);
  ScalarField init = ScalarField::zeros(spec.grid);
  std::mt19937_64 rng(7);
  for (int i = 0; i < spec.grid.node_count(); ++i)
    if (!spec.grid.is_boundary(i)) init.values[i] = 0.5 * (2.0 * u01(rng) - 1.0);
  Solution b = solve_fixed_eps(spec, 0.03, init, cfg);
  CHECK((a.u.values - b.u.values).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("init violating the Dirichlet data is rejected") {
  ProblemSpec spec = builtin_problem("plug1d", 17);
  ScalarField bad = ScalarField::zeros(spec.grid);
  bad.values[0] = 0.5;
  SolverConfig cfg;
  CHECK_THROWS_AS(solve_fixed_eps(spec, 0.1, bad, cfg), std::invalid_argument);
}

TEST_CASE("non-convergence carries the last iterate") {
  ProblemSpec spec = builtin_problem("plug1d", 257);
  SolverConfig cfg;
  cfg.max_newton = 1;
  try {
    solve_fixed_eps(spec, 0.01, ScalarField::zeros(spec.grid), cfg);
    FAIL("expected NonConvergenceError");
  } catch (const NonConvergenceError& e) {
    CHECK(e.last_iterate.u.values.size() == spec.grid.node_count());
    CHECK(e.last_iterate.residual_norm > 0.0);
  }
}

TEST_CASE("1D benchmark converges to the oracle") {
  ProblemSpec spec = builtin_problem("plug1d", 129);  // cheap version
  SolverConfig cfg;
  ContinuationSchedule sched = ContinuationSchedule::halving_to(1e-2, 0.1, 1e-3);
  SolutionSequence seq = continuation_solve(spec, sched, cfg);
  OracleSolution1D oracle = oracle_1d(1.0, 2.0, [](double) { return 2.0; }, -1.0, 1.0, 0.0, 0.0);
  double worst = 0.0;
  for (int i = 0; i < spec.grid.node_count(); ++i)
    worst = std::max(worst,
                     std::abs(seq.steps.back().u.values[i] - oracle.u(spec.grid.node(i).x())));
  CHECK(worst < 5e-3);
  CHECK(seq.steps.back().residual_norm <= cfg.tol_residual_abs + 2.0 * cfg.tol_residual_rel);
}

TEST_CASE("single-entry schedule equals a fixed-eps solve") {
  ProblemSpec spec = builtin_problem("plug1d", 65);
  SolverConfig cfg;
  ContinuationSchedule sched;
  sched.delta = 0.05;
  sched.eps_list = {0.05};
  SolutionSequence seq = continuation_solve(spec, sched, cfg);
  Solution direct = solve_fixed_eps(spec, 0.05, harmonic_extension(spec, cfg), cfg);
  CHECK((seq.steps[0].u.values - direct.u.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("continuation diffs shrink along the schedule") {
  ProblemSpec spec = builtin_problem("plug1d", 129);
  SolverConfig cfg;
  ContinuationSchedule sched = ContinuationSchedule::geometric(0.05, 0.1, 0.5, 4);
  SolutionSequence seq = continuation_solve(spec, sched, cfg);
  REQUIRE(seq.grad_diff_lp.size() == 3);
  CHECK(seq.grad_diff_lp[2] < seq.grad_diff_lp[1]);
  CHECK(seq.grad_diff_lp[1] < seq.grad_diff_lp[0]);
}

TEST_CASE("plateau value is stable at the end of the halving schedule") {
  ProblemSpec spec = builtin_problem("plug1d");
  SolverConfig cfg;
  ContinuationSchedule sched;
  sched.delta = 0.05;
  for (int k = 0; k <= 7; ++k) sched.eps_list.push_back(0.1 * std::pow(2.0, -k));
  SolutionSequence seq = continuation_solve(spec, sched, cfg);
  double center = seq.steps.back().u.values[(spec.grid.nx - 1) / 2];
  CHECK(std::abs(center - 0.25) <= 5e-3);
}

TEST_CASE("interior gradient bound stays within the recorded baseline") {
  // monitor, regression-tested: central 80% of plug1d stays below 0.65
  ProblemSpec spec = builtin_problem("plug1d", 257);
  SolverConfig cfg;
  ContinuationSchedule sched = ContinuationSchedule::halving_to(1e-2, 0.1, 2e-3);
  SolutionSequence seq = continuation_solve(spec, sched, cfg);
  for (const Solution& s : seq.steps) {
    double worst = 0.0;
    for (int c = 0; c < spec.grid.cell_count(); ++c)
      if (std::abs(spec.grid.cell_centroid(c).x()) <= 0.8)
        worst = std::max(worst, s.grad.values.col(c).norm());
    CHECK(worst <= 0.65);
  }
}

TEST_CASE("manufactured Poisson solution converges at second order on anisotropic grids") {
  // b = 0, p = 2: the relaxed flux is exactly the gradient, so the solve is a
  // plain P1 Poisson solve. u* = sin(pi x) sin(2 pi y), f = 5 pi^2 u*.
  auto exact = [](const Vector2d& x) {
    return std::sin(M_PI * x.x()) * std::sin(2.0 * M_PI * x.y());
  };
  auto solve_once = [&](int nx, int ny) {
    ProblemSpec spec;
    spec.grid = Grid::rectangle({0.0, 0.0}, {1.0, 1.0}, nx, ny);
    spec.density = DensityParams::model(0.0, 2.0);
    spec.source = Eigen::VectorXd::Zero(spec.grid.node_count());
    spec.dirichlet = Eigen::VectorXd::Zero(spec.grid.node_count());
    for (int i = 0; i < spec.grid.node_count(); ++i)
      spec.source[i] = 5.0 * M_PI * M_PI * exact(spec.grid.node(i));
    SolverConfig cfg;
    Solution s = solve_fixed_eps(spec, 0.5, ScalarField::zeros(spec.grid), cfg);
    double worst = 0.0;
    for (int i = 0; i < spec.grid.node_count(); ++i)
      worst = std::max(worst, std::abs(s.u.values[i] - exact(spec.grid.node(i))));
    return worst;
  };
  double coarse = solve_once(33, 17);
  double fine = solve_once(65, 33);
  CHECK(coarse < 0.05);
  CHECK(fine < 0.35 * coarse);
}

TEST_CASE("mollified mode solves and stays near the closed-form relaxation") {
  ProblemSpec spec = builtin_problem("plug1d", 17);
  SolverConfig cfg;
  Solution closed = solve_fixed_eps(spec, 0.05, ScalarField::zeros(spec.grid), cfg);
  spec.mode = RelaxMode::mollified;
  Solution moll = solve_fixed_eps(spec, 0.05, ScalarField::zeros(spec.grid), cfg);
  CHECK(moll.residual_norm <= cfg.tol_residual_abs + 2.0 * cfg.tol_residual_rel);
  // the two relaxations of the same density differ by O(eps)
  CHECK((moll.u.values - closed.u.values).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("schedule validation") {
  ContinuationSchedule bad;
  bad.delta = 0.05;
  bad.eps_list = {0.1, 0.1};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad.eps_list = {};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  SolverConfig cfg;
  cfg.armijo.c1 = 0.7;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_SUITE_END();
