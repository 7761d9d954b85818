#include <doctest.h>

#include <random>

#include "facetflow/diagnostics.hpp"
#include "facetflow/problems.hpp"
#include "facetflow/truncation.hpp"

using namespace facetflow;
using Eigen::Vector2d;

namespace {

double u01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

VectorField constant_field(const Grid& g, const Vector2d& v) {
  VectorField f{g, Eigen::Matrix2Xd::Zero(2, g.cell_count())};
  f.values.colwise() = v;
  return f;
}

}  // namespace

TEST_SUITE_BEGIN("diagnostics");

TEST_CASE("facet extraction on a Poisson solve keeps only the critical cells") {
  ProblemSpec spec = builtin_problem("plug1d", 129);
  spec.density = DensityParams::model(0.0, 2.0);  // pure Poisson
  SolverConfig cfg;
  Solution s = solve_fixed_eps(spec, 0.01, ScalarField::zeros(spec.grid), cfg);
  FacetResult f = facet_extract(s.grad, 0.02);
  CHECK(f.cells <= 2);  // u' = -2x crosses 0.02 only within one cell of x = 0
  CHECK_THROWS_AS(facet_extract(s.grad, 0.0), std::invalid_argument);
}

TEST_CASE("facet length of the solved plug benchmark at a loose tolerance") {
  ProblemSpec spec = builtin_problem("plug1d");
  SolverConfig cfg;
  SolutionSequence seq =
      continuation_solve(spec, ContinuationSchedule::halving_to(1e-3, 0.1, 1e-4), cfg);
  FacetResult f = facet_extract(seq.steps.back().grad, 1e-2);
  CHECK(std::abs(f.measure - 1.0) <= 0.04);
}

TEST_CASE("campanato excess of a constant field is zero") {
  Grid g = Grid::rectangle({-1.0, -1.0}, {1.0, 1.0}, 33, 33);
  VectorField f = constant_field(g, {0.3, -0.7});
  for (double phi : campanato_excess(f, Vector2d::Zero(), {0.5, 0.3, 0.1}))
    CHECK(phi <= 1e-20);
}

TEST_CASE("campanato excess of the linear 1D field matches the uniform variance") {
  Grid g = Grid::interval(-1.0, 1.0, 513);
  ScalarField u = ScalarField::zeros(g);
  for (int i = 0; i < g.node_count(); ++i) {
    double x = g.node(i).x();
    u.values[i] = 0.5 * x * x;  // du = x
  }
  VectorField f = gradient_field(g, u);
  for (double r : {0.5, 0.3, 0.2}) {
    double phi = campanato_excess(f, Vector2d::Zero(), {r})[0];
    CHECK(phi == doctest::Approx(r * r / 3.0).epsilon(0.02));
  }
  CHECK_THROWS_AS(campanato_excess(f, Vector2d(0.9, 0.0), {0.5}), std::domain_error);
}

TEST_CASE("ball means minimize the L2 oscillation") {
  Grid g = Grid::rectangle({-1.0, -1.0}, {1.0, 1.0}, 33, 33);
  std::mt19937_64 rng(3);
  VectorField f{g, Eigen::Matrix2Xd::Zero(2, g.cell_count())};
  for (int c = 0; c < g.cell_count(); ++c)
    f.values.col(c) = Vector2d(u01(rng), u01(rng));
  const double r = 0.4;
  double phi = campanato_excess(f, Vector2d::Zero(), {r})[0];
  auto cells = g.ball_cells(Vector2d::Zero(), r);
  for (int trial = 0; trial < 20; ++trial) {
    Vector2d zeta(2.0 * u01(rng) - 1.0, 2.0 * u01(rng) - 1.0);
    double acc = 0.0, area = 0.0;
    for (int c : cells) {
      acc += g.cell_area(c) * (f.values.col(c) - zeta).squaredNorm();
      area += g.cell_area(c);
    }
    CHECK(phi <= acc / area + 1e-12);
  }
}

TEST_CASE("superlevel ratios: extremes and monotonicity") {
  Grid g = Grid::rectangle({-1.0, -1.0}, {1.0, 1.0}, 33, 33);
  const double delta = 0.05;
  CellField veps{g, Eigen::VectorXd::Zero(g.cell_count())};
  std::mt19937_64 rng(5);
  for (int c = 0; c < g.cell_count(); ++c) veps.values[c] = u01(rng);

  CHECK(superlevel_measure(veps, delta, 1e9, 0.5, Vector2d::Zero(), 0.5) == 0.0);

  CellField flat{g, Eigen::VectorXd::Constant(g.cell_count(), delta + 0.3)};
  for (double nu : {0.05, 0.3, 0.9})
    CHECK(superlevel_measure(flat, delta, 0.3, nu, Vector2d::Zero(), 0.5) == 1.0);

  double prev = 1.0;
  for (double mu : {0.1, 0.2, 0.4, 0.8}) {
    double ratio = superlevel_measure(veps, delta, mu, 0.3, Vector2d::Zero(), 0.5);
    CHECK(ratio <= prev);
    prev = ratio;
  }
  prev = 0.0;
  for (double nu : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    double ratio = superlevel_measure(veps, delta, 0.5, nu, Vector2d::Zero(), 0.5);
    CHECK(ratio >= prev);
    prev = ratio;
  }
  CHECK_THROWS_AS(superlevel_measure(veps, delta, 0.0, 0.5, Vector2d::Zero(), 0.5),
                  std::invalid_argument);
}

TEST_CASE("superlevel ratio vanishes inside the plug") {
  ProblemSpec spec = builtin_problem("plug1d", 257);
  SolverConfig cfg;
  ContinuationSchedule sched = ContinuationSchedule::halving_to(0.05, 0.1, 2e-3);
  SolutionSequence seq = continuation_solve(spec, sched, cfg);
  CellField veps = veps_field(seq.steps.back().grad, seq.steps.back().eps);
  CHECK(superlevel_measure(veps, 0.05, 0.5, 0.1, Vector2d::Zero(), 0.2) == 0.0);
}

TEST_CASE("empirical Hoelder fit: markers and smooth fields") {
  Grid g = Grid::rectangle({-1.0, -1.0}, {1.0, 1.0}, 65, 65);
  Box region{{-0.5, -0.5}, {0.5, 0.5}};
  std::vector<double> radii = {0.3, 0.25, 0.2, 0.15, 0.1};

  HolderFit flat = empirical_holder(constant_field(g, {1.0, 2.0}), region, radii, 500, 7);
  CHECK(flat.locally_constant);
  CHECK(std::isinf(flat.alpha_hat));

  VectorField lin{g, Eigen::Matrix2Xd::Zero(2, g.cell_count())};
  for (int c = 0; c < g.cell_count(); ++c) {
    Vector2d x = g.cell_centroid(c);
    lin.values.col(c) = Vector2d(x.x(), 0.5 * x.y() - x.x());
  }
  HolderFit s = empirical_holder(lin, region, radii, 500, 7);
  CHECK_FALSE(s.locally_constant);
  CHECK(s.alpha_hat >= 0.95);
  CHECK_THROWS_AS(empirical_holder(lin, region, {0.3, 0.2}, 500, 7), std::invalid_argument);
}

TEST_CASE("empirical Hoelder fit on the solved plug benchmark") {
  ProblemSpec spec = builtin_problem("plug1d");
  SolverConfig cfg;
  const double delta = 0.05;
  ContinuationSchedule sched = ContinuationSchedule::halving_to(delta, 0.1, delta / 10.0);
  SolutionSequence seq = continuation_solve(spec, sched, cfg);
  const Solution& sol = seq.steps.back();
  VectorField g2d{spec.grid, Eigen::Matrix2Xd::Zero(2, spec.grid.cell_count())};
  for (int c = 0; c < spec.grid.cell_count(); ++c)
    g2d.values.col(c) =
        truncate_relaxed(sol.grad.values.col(c).eval(), 2.0 * delta, sol.eps);
  Box region{{-0.6, 0.0}, {0.6, 0.0}};
  HolderFit fit = empirical_holder(g2d, region, {0.3, 0.25, 0.2, 0.15, 0.1}, 2000, 7);
  CHECK(fit.alpha_hat >= 0.5);
}

TEST_CASE("ellipticity ratio field") {
  Grid g = Grid::interval(-1.0, 1.0, 65);
  std::mt19937_64 rng(11);
  VectorField f{g, Eigen::Matrix2Xd::Zero(2, g.cell_count())};
  for (int c = 0; c < g.cell_count(); ++c) f.values(0, c) = 4.0 * u01(rng) - 2.0;

  DensityParams poisson = DensityParams::model(0.0, 2.0);
  CellField ratio0 = ellipticity_ratio_field(f, 0.1, poisson);
  CHECK(ratio0.values.maxCoeff() <= poisson.Lambda / poisson.lambda + 1e-12);

  DensityParams model = DensityParams::model(1.0, 2.0);
  VectorField facet = constant_field(g, Vector2d::Zero());
  CellField near_singular = ellipticity_ratio_field(facet, 1e-4, model);
  CHECK(near_singular.values.maxCoeff() == doctest::Approx(1.0 + 1.0 / 1e-4).epsilon(1e-6));

  // away from the dead zone the ratio is eps-independent within 5%
  const double delta = 0.05;
  for (int c = 0; c < g.cell_count(); ++c)
    f.values(0, c) = 2.0 * delta + 2.0 * u01(rng);
  CellField r1 = ellipticity_ratio_field(f, delta / 10.0, model);
  CellField r2 = ellipticity_ratio_field(f, delta / 40.0, model);
  for (int c = 0; c < g.cell_count(); ++c)
    CHECK(std::abs(r1.values[c] - r2.values[c]) <= 0.05 * r2.values[c]);
}

TEST_CASE("convergence report on identical solutions is zero") {
  ProblemSpec spec = builtin_problem("plug1d", 65);
  SolverConfig cfg;
  Solution s = solve_fixed_eps(spec, 0.05, ScalarField::zeros(spec.grid), cfg);
  SolutionSequence seq;
  seq.p = 2.0;
  seq.delta = 0.5;
  Solution s2 = s;
  s2.eps = 0.049;  // pretend a second step with the same field
  seq.steps = {s, s2};
  ConvergenceTable t = convergence_report(seq, 2.0, 0.5);
  CHECK(t.grad_diff_lp[0] == 0.0);
  CHECK(t.g2d_sup_diff[0] == 0.0);
}

TEST_CASE("U field equals the squared relaxed truncation cellwise") {
  ProblemSpec spec = builtin_problem("plug1d", 257);
  SolverConfig cfg;
  Solution s = solve_fixed_eps(spec, 0.004, ScalarField::zeros(spec.grid), cfg);
  const double delta = 0.05;
  for (int c = 0; c < spec.grid.cell_count(); ++c) {
    Vector2d g = s.grad.values.col(c);
    double u = u_delta_eps(g, delta, s.eps);
    double g2 = truncate_relaxed(g, delta, s.eps).squaredNorm();
    CHECK(std::abs(u - g2) <= 1e-14 * (1.0 + u));
  }
}

TEST_CASE("full report validates the eps/delta gate") {
  ProblemSpec spec = builtin_problem("plug1d", 65);
  SolverConfig cfg;
  Solution s = solve_fixed_eps(spec, 0.05, ScalarField::zeros(spec.grid), cfg);
  DiagnosticsParams params;
  params.delta = 0.05;  // eps = 0.05 is not < delta/8
  CHECK_THROWS_AS(compute_report(spec, s, params), std::invalid_argument);
}

TEST_SUITE_END();
