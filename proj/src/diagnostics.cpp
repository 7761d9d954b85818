#include "facetflow/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "facetflow/truncation.hpp"

namespace facetflow {
namespace {

bool ball_inside(const Grid& g, const Eigen::Vector2d& x0, double r) {
  if (x0.x() - r < g.lo.x() - 1e-12 || x0.x() + r > g.hi.x() + 1e-12) return false;
  if (g.dim == 2 && (x0.y() - r < g.lo.y() - 1e-12 || x0.y() + r > g.hi.y() + 1e-12))
    return false;
  return true;
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

FacetResult facet_extract(const VectorField& grad, double facet_tol) {
  if (!(facet_tol > 0.0)) throw std::invalid_argument("facet_extract: tolerance must be positive");
  FacetResult out;
  out.mask.assign(grad.grid.cell_count(), 0);
  for (int c = 0; c < grad.grid.cell_count(); ++c) {
    if (grad.values.col(c).norm() <= facet_tol) {
      out.mask[c] = 1;
      out.measure += grad.grid.cell_area(c);
      ++out.cells;
    }
  }
  return out;
}

std::vector<double> campanato_excess(const VectorField& field, const Eigen::Vector2d& x0,
                                     const std::vector<double>& radii) {
  std::vector<double> out;
  out.reserve(radii.size());
  for (double r : radii) {
    if (!ball_inside(field.grid, x0, r))
      throw std::domain_error("campanato_excess: ball exits the domain");
    std::vector<int> cells = field.grid.ball_cells(x0, r);
    if (cells.empty()) {
      out.push_back(0.0);
      continue;
    }
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    double area = 0.0;
    for (int c : cells) {
      mean += field.grid.cell_area(c) * field.values.col(c);
      area += field.grid.cell_area(c);
    }
    mean /= area;
    double acc = 0.0;
    for (int c : cells)
      acc += field.grid.cell_area(c) * (field.values.col(c) - mean).squaredNorm();
    out.push_back(acc / area);
  }
  return out;
}

double superlevel_measure(const CellField& veps, double delta, double mu, double nu,
                          const Eigen::Vector2d& x0, double rho) {
  if (!(mu > 0.0)) throw std::invalid_argument("superlevel_measure: mu must be positive");
  if (!(nu > 0.0 && nu < 1.0))
    throw std::invalid_argument("superlevel_measure: nu must lie in (0,1)");
  std::vector<int> cells = veps.grid.ball_cells(x0, rho);
  double total = 0.0, above = 0.0;
  double threshold = delta + (1.0 - nu) * mu;
  for (int c : cells) {
    double a = veps.grid.cell_area(c);
    total += a;
    if (veps.values[c] > threshold) above += a;
  }
  return total > 0.0 ? above / total : 0.0;
}

HolderFit empirical_holder(const VectorField& field, const Box& region,
                           const std::vector<double>& radii, int pair_budget, uint64_t seed) {
  if (radii.size() < 3)
    throw std::invalid_argument("empirical_holder: need at least three radii");
  const Grid& grid = field.grid;
  double rmax = *std::max_element(radii.begin(), radii.end());

  // Lattice of candidate centers across the region.
  std::vector<Eigen::Vector2d> centers;
  const int per_axis = grid.dim == 1 ? 15 : 7;
  for (int i = 0; i < per_axis; ++i) {
    double tx = (i + 0.5) / per_axis;
    double cx = region.lo.x() + tx * (region.hi.x() - region.lo.x());
    if (grid.dim == 1) {
      Eigen::Vector2d x0(cx, 0.0);
      if (ball_inside(grid, x0, rmax)) centers.push_back(x0);
      continue;
    }
    for (int j = 0; j < per_axis; ++j) {
      double ty = (j + 0.5) / per_axis;
      Eigen::Vector2d x0(cx, region.lo.y() + ty * (region.hi.y() - region.lo.y()));
      if (ball_inside(grid, x0, rmax)) centers.push_back(x0);
    }
  }
  if (centers.empty()) throw std::domain_error("empirical_holder: region admits no centers");

  HolderFit fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& x0 : centers) {
    std::vector<double> phi = campanato_excess(field, x0, radii);
    for (size_t k = 0; k < radii.size(); ++k) {
      if (phi[k] <= 1e-300) continue;  // locally constant ball
      double lx = std::log(radii[k]), ly = std::log(phi[k]);
      pts.emplace_back(lx, ly);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
  }
  fit.points_used = static_cast<int>(pts.size());
  if (pts.size() < 3) {
    fit.locally_constant = true;
    fit.alpha_hat = std::numeric_limits<double>::infinity();
    return fit;
  }
  double n = static_cast<double>(pts.size());
  double denom = n * sxx - sx * sx;
  double slope = (n * sxy - sx * sy) / denom;
  double intercept = (sy - slope * sx) / n;
  fit.alpha_hat = 0.5 * slope;
  double rss = 0.0;
  for (auto& [lx, ly] : pts) {
    double e = ly - (slope * lx + intercept);
    rss += e * e;
  }
  fit.fit_residual = std::sqrt(rss / n);

  // Pairwise sup quotient over sampled in-region cell pairs.
  std::vector<int> pool;
  for (int c = 0; c < grid.cell_count(); ++c) {
    Eigen::Vector2d p = grid.cell_centroid(c);
    if (p.x() < region.lo.x() || p.x() > region.hi.x()) continue;
    if (grid.dim == 2 && (p.y() < region.lo.y() || p.y() > region.hi.y())) continue;
    pool.push_back(c);
  }
  std::mt19937_64 rng(seed);
  double supq = 0.0;
  for (int k = 0; k < pair_budget && pool.size() >= 2; ++k) {
    int a = pool[static_cast<size_t>(uniform01(rng) * pool.size())];
    int b = pool[static_cast<size_t>(uniform01(rng) * pool.size())];
    if (a == b) continue;
    double dist = (grid.cell_centroid(a) - grid.cell_centroid(b)).norm();
    if (dist <= 0.0) continue;
    double dv = (field.values.col(a) - field.values.col(b)).norm();
    supq = std::max(supq, dv / std::pow(dist, fit.alpha_hat));
  }
  fit.sup_quotient = supq;
  return fit;
}

CellField ellipticity_ratio_field(const VectorField& grad, double eps, const DensityParams& d) {
  CellField out{grad.grid, Eigen::VectorXd::Zero(grad.grid.cell_count())};
  for (int c = 0; c < grad.grid.cell_count(); ++c) {
    EllipticityBounds eb = ellipticity_bounds(d, eps, grad.values.col(c));
    out.values[c] = eb.upper / eb.lower;
  }
  return out;
}

ConvergenceTable convergence_report(const SolutionSequence& seq, double p, double delta) {
  if (seq.steps.size() < 2)
    throw std::invalid_argument("convergence_report: need at least two solutions");
  ConvergenceTable t;
  for (const auto& s : seq.steps) t.eps.push_back(s.eps);
  for (size_t k = 0; k + 1 < seq.steps.size(); ++k) {
    const Solution& a = seq.steps[k];
    const Solution& b = seq.steps[k + 1];
    t.grad_diff_lp.push_back(grad_diff_lp_norm(a.grad, b.grad, p));
    double sup = std::numeric_limits<double>::quiet_NaN();
    if (a.eps < delta / 8.0 && b.eps < delta / 8.0) {
      sup = 0.0;
      for (int c = 0; c < a.grad.grid.cell_count(); ++c) {
        Eigen::Vector2d ga = truncate_relaxed(a.grad.values.col(c).eval(), 2.0 * delta, a.eps);
        Eigen::Vector2d gb = truncate_relaxed(b.grad.values.col(c).eval(), 2.0 * delta, b.eps);
        sup = std::max(sup, (ga - gb).norm());
      }
    }
    t.g2d_sup_diff.push_back(sup);
  }
  return t;
}

DiagnosticsReport compute_report(const ProblemSpec& spec, const Solution& sol,
                                 const DiagnosticsParams& params) {
  params.validate(sol.eps);
  const Grid& grid = spec.grid;
  DiagnosticsReport rep;
  rep.delta = params.delta;
  rep.eps = sol.eps;
  rep.beta = params.beta(grid.dim);
  rep.facet_tol = params.effective_facet_tol();
  rep.facet = facet_extract(sol.grad, rep.facet_tol);

  // Relaxed truncation field at 2*delta.
  VectorField g2d{grid, Eigen::Matrix2Xd::Zero(2, grid.cell_count())};
  for (int c = 0; c < grid.cell_count(); ++c)
    g2d.values.col(c) =
        truncate_relaxed(sol.grad.values.col(c).eval(), 2.0 * params.delta, sol.eps);

  Eigen::Vector2d mid = 0.5 * (grid.lo + grid.hi);
  if (grid.dim == 1) mid.y() = 0.0;
  double half = grid.dim == 1 ? 0.5 * (grid.hi.x() - grid.lo.x())
                              : 0.5 * std::min(grid.hi.x() - grid.lo.x(),
                                               grid.hi.y() - grid.lo.y());
  std::vector<double> radii = params.excess_radii;
  if (radii.empty())
    radii = {0.30 * half, 0.25 * half, 0.20 * half, 0.15 * half, 0.10 * half};

  for (double r : radii) {
    ExcessRow row;
    row.center = mid;
    row.radius = r;
    row.phi = campanato_excess(sol.grad, mid, {r})[0];
    rep.excess.push_back(row);
  }

  CellField veps = veps_field(sol.grad, sol.eps);
  double vmax = veps.values.maxCoeff();
  double mu_top = std::max(vmax - params.delta, 8.0 * params.delta);
  for (double frac : {0.125, 0.25, 0.5, 1.0}) {
    SuperlevelRow row;
    row.mu = frac * mu_top;
    row.nu = 0.1;
    row.ratio = superlevel_measure(veps, params.delta, row.mu, row.nu, mid, radii.front());
    rep.superlevel.push_back(row);
  }

  Box region;
  region.lo = mid - Eigen::Vector2d::Constant(0.6 * half);
  region.hi = mid + Eigen::Vector2d::Constant(0.6 * half);
  if (grid.dim == 1) {
    region.lo.y() = 0.0;
    region.hi.y() = 0.0;
  }
  std::vector<double> hradii;
  for (double r : radii) hradii.push_back(std::min(r, 0.4 * half));
  rep.holder = empirical_holder(g2d, region, hradii, params.holder_pair_budget, params.seed);

  CellField ratio = ellipticity_ratio_field(sol.grad, sol.eps, spec.density);
  rep.ellipticity_ratio_min = ratio.values.minCoeff();
  rep.ellipticity_ratio_max = ratio.values.maxCoeff();

  // Nodal value at the domain-center node.
  int ci = (grid.nx - 1) / 2;
  int cj = grid.dim == 2 ? (grid.ny - 1) / 2 : 0;
  rep.plug_value = sol.u.values[ci + grid.nx * cj];
  return rep;
}

}  // namespace facetflow
