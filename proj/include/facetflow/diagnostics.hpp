#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "facetflow/solver.hpp"

namespace facetflow {

struct DiagnosticsParams {
  double delta = 0.05;
  double q = std::numeric_limits<double>::infinity();
  double beta_hat0 = 0.9;   // Hoelder target exponent used when q = inf
  double facet_tol = -1.0;  // < 0 means "use delta"
  std::vector<double> excess_radii;  // decreasing; defaulted from the grid if empty
  int holder_pair_budget = 4000;
  uint64_t seed = 7;

  double beta(int dim) const {
    return std::isinf(q) ? beta_hat0 : 1.0 - static_cast<double>(dim) / q;
  }
  double effective_facet_tol() const { return facet_tol < 0.0 ? delta : facet_tol; }
  void validate(double eps) const {
    if (!(delta > 0.0 && delta < 1.0))
      throw std::invalid_argument("DiagnosticsParams: delta must lie in (0,1)");
    if (!(beta_hat0 > 0.0 && beta_hat0 < 1.0))
      throw std::invalid_argument("DiagnosticsParams: beta_hat0 must lie in (0,1)");
    if (!(eps < delta / 8.0))
      throw std::invalid_argument("DiagnosticsParams: diagnosed eps must satisfy eps < delta/8");
  }
};

struct FacetResult {
  std::vector<std::uint8_t> mask;  // per cell
  double measure = 0.0;
  int cells = 0;
};

// Cells where the discrete gradient modulus does not exceed facet_tol.
FacetResult facet_extract(const VectorField& grad, double facet_tol);

// L2-mean oscillation of a per-cell vector field over centroid-membership
// balls; one value per radius. Balls must stay inside the domain.
std::vector<double> campanato_excess(const VectorField& field, const Eigen::Vector2d& x0,
                                     const std::vector<double>& radii);

// Area fraction of the ball where V_eps - delta > (1-nu) mu.
double superlevel_measure(const CellField& veps, double delta, double mu, double nu,
                          const Eigen::Vector2d& x0, double rho);

struct HolderFit {
  double alpha_hat = 0.0;
  double fit_residual = 0.0;   // rms residual of the log-log fit
  double sup_quotient = 0.0;   // sup |G(x)-G(y)| / |x-y|^alpha_hat over sampled pairs
  bool locally_constant = false;
  int points_used = 0;
};

struct Box {
  Eigen::Vector2d lo, hi;
};

// Pooled least-squares slope of log Phi(x0, r) against log r over lattice
// centers in `region`, divided by two.
HolderFit empirical_holder(const VectorField& field, const Box& region,
                           const std::vector<double>& radii, int pair_budget, uint64_t seed);

// Per-cell ratio of the upper to the lower ellipticity bound at the cell
// gradient.
CellField ellipticity_ratio_field(const VectorField& grad, double eps, const DensityParams& d);

struct ConvergenceTable {
  std::vector<double> eps;           // size m
  std::vector<double> grad_diff_lp;  // size m-1
  std::vector<double> g2d_sup_diff;  // size m-1; NaN where eps >= delta/8
};

// Successive L^p gradient differences plus sup-norm differences of the
// 2*delta relaxed truncations (only where both eps values are eligible).
ConvergenceTable convergence_report(const SolutionSequence& seq, double p, double delta);

struct ExcessRow {
  Eigen::Vector2d center;
  double radius = 0.0;
  double phi = 0.0;
};

struct SuperlevelRow {
  double mu = 0.0, nu = 0.0, ratio = 0.0;
};

struct DiagnosticsReport {
  double delta = 0.0, eps = 0.0, beta = 0.0, facet_tol = 0.0;
  FacetResult facet;
  std::vector<ExcessRow> excess;
  std::vector<SuperlevelRow> superlevel;
  HolderFit holder;
  double ellipticity_ratio_min = 0.0, ellipticity_ratio_max = 0.0;
  double plug_value = 0.0;  // nodal value at the domain center
};

// Full post-solve report for one solution.
DiagnosticsReport compute_report(const ProblemSpec& spec, const Solution& sol,
                                 const DiagnosticsParams& params);

}  // namespace facetflow
