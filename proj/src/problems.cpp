#include "facetflow/problems.hpp"

#include <cmath>

namespace facetflow {
namespace {

// 5-point Gauss-Legendre on [-1,1].
constexpr int kQ = 5;
const double kQx[kQ] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                        0.9061798459386640};
const double kQw[kQ] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                        0.4786286704993665, 0.2369268850561891};

constexpr int kPanels = 4096;
constexpr double kFluxTol = 1e-12;

}  // namespace

double OracleSolution1D::psi(double t) const {
  if (t == 0.0) return 0.0;
  double s = t > 0 ? 1.0 : -1.0;
  return b_ * s + s * std::pow(std::abs(t), p_ - 1.0);
}

double OracleSolution1D::psi_inv(double s) const {
  if (std::abs(s) <= b_) return 0.0;
  double sign = s > 0 ? 1.0 : -1.0;
  return sign * std::pow(std::abs(s) - b_, 1.0 / (p_ - 1.0));
}

double OracleSolution1D::antiderivative(double x) const {
  if (x <= x_lo_) return 0.0;
  double t = (x - x_lo_) / h_;
  int panel = std::min(static_cast<int>(t), panels_ - 1);
  double a = x_lo_ + panel * h_;
  double half = 0.5 * (x - a);
  double mid = 0.5 * (a + x);
  double acc = f_prefix_[panel];
  for (int q = 0; q < kQ; ++q) acc += half * kQw[q] * f_(mid + half * kQx[q]);
  return acc;
}

double OracleSolution1D::sigma(double x) const { return c_ - antiderivative(x); }

double OracleSolution1D::du(double x) const { return psi_inv(sigma(x)); }

double OracleSolution1D::u(double x) const {
  if (x <= x_lo_) return u_lo_;
  double t = (x - x_lo_) / h_;
  int panel = std::min(static_cast<int>(t), panels_ - 1);
  double a = x_lo_ + panel * h_;
  double half = 0.5 * (x - a);
  double mid = 0.5 * (a + x);
  double acc = u_lo_ + u_prefix_[panel];
  for (int q = 0; q < kQ; ++q) acc += half * kQw[q] * psi_inv(sigma(mid + half * kQx[q]));
  return acc;
}

OracleSolution1D::OracleSolution1D(double b, double p, std::function<double(double)> f,
                                   double x_lo, double x_hi, double u_lo, double u_hi)
    : b_(b), p_(p), x_lo_(x_lo), x_hi_(x_hi), u_lo_(u_lo), f_(std::move(f)), panels_(kPanels) {
  if (!(b >= 0.0)) throw OracleError("oracle_1d: b must be nonnegative");
  if (!(p > 1.0)) throw OracleError("oracle_1d: p must exceed 1");
  if (!(x_hi > x_lo)) throw OracleError("oracle_1d: empty interval");
  h_ = (x_hi - x_lo) / panels_;

  // Antiderivative of f at panel boundaries and quadrature nodes.
  f_prefix_.assign(panels_ + 1, 0.0);
  f_nodes_.assign(panels_ * kQ, 0.0);
  for (int k = 0; k < panels_; ++k) {
    double a = x_lo_ + k * h_;
    double half = 0.5 * h_;
    double mid = a + half;
    double acc = 0.0;
    // running prefix within the panel, node by node (nodes are sorted)
    double from = a;
    double inner = 0.0;
    for (int q = 0; q < kQ; ++q) {
      double node = mid + half * kQx[q];
      double hh = 0.5 * (node - from);
      double mm = 0.5 * (node + from);
      for (int r = 0; r < kQ; ++r) inner += hh * kQw[r] * f_(mm + hh * kQx[r]);
      f_nodes_[k * kQ + q] = f_prefix_[k] + inner;
      from = node;
    }
    for (int q = 0; q < kQ; ++q) acc += half * kQw[q] * f_(mid + half * kQx[q]);
    f_prefix_[k + 1] = f_prefix_[k] + acc;
  }

  // Displacement produced by a given flux constant.
  auto displacement = [&](double c) {
    double acc = 0.0;
    for (int k = 0; k < panels_; ++k)
      for (int q = 0; q < kQ; ++q)
        acc += 0.5 * h_ * kQw[q] * psi_inv(c - f_nodes_[k * kQ + q]);
    return acc;
  };

  const double target = u_hi - u_lo;
  double span = 1.0 + b_;
  for (int k = 0; k <= panels_; ++k) span = std::max(span, std::abs(f_prefix_[k]));
  double grow = std::pow(std::abs(target) / (x_hi - x_lo) + 1.0, p_ - 1.0);
  double lo = -(span + b_ + grow), hi = span + b_ + grow;
  int guard = 0;
  while (displacement(lo) > target) {
    lo *= 2.0;
    if (++guard > 60) throw OracleError("oracle_1d: bisection bracket failure (low side)");
  }
  guard = 0;
  while (displacement(hi) < target) {
    hi *= 2.0;
    if (++guard > 60) throw OracleError("oracle_1d: bisection bracket failure (high side)");
  }
  while (hi - lo > kFluxTol) {
    double mid = 0.5 * (lo + hi);
    if (displacement(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  c_ = 0.5 * (lo + hi);

  // Prefix integrals of u' for the evaluator.
  u_prefix_.assign(panels_ + 1, 0.0);
  for (int k = 0; k < panels_; ++k) {
    double acc = 0.0;
    for (int q = 0; q < kQ; ++q)
      acc += 0.5 * h_ * kQw[q] * psi_inv(c_ - f_nodes_[k * kQ + q]);
    u_prefix_[k + 1] = u_prefix_[k] + acc;
  }

  // Facet: the set {|sigma| <= b}, required to be a single interval. The scan
  // tolerance absorbs the bisection error in c (the flat displacement case
  // parks c at an endpoint of its admissible interval).
  if (b_ > 0.0) {
    auto inside = [&](double x) { return std::abs(sigma(x)) <= b_ + 1e-10; };
    int first = -1, last = -1;
    bool gap_after_block = false;
    for (int k = 0; k <= panels_; ++k) {
      double x = x_lo_ + k * h_;
      if (inside(x)) {
        if (first < 0) first = k;
        if (last >= 0 && gap_after_block)
          throw OracleError("oracle_1d: facet set is not an interval");
        last = k;
      } else if (first >= 0) {
        gap_after_block = true;
      }
    }
    if (first >= 0) {
      has_facet_ = true;
      double a = x_lo_ + first * h_;
      if (first > 0) {
        double left = a - h_, right = a;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (left + right);
          (inside(mid) ? right : left) = mid;
        }
        a = 0.5 * (left + right);
      } else {
        a = x_lo_;
      }
      double bnd = x_lo_ + last * h_;
      if (last < panels_) {
        double left = bnd, right = bnd + h_;
        for (int it = 0; it < 80; ++it) {
          double mid = 0.5 * (left + right);
          (inside(mid) ? left : right) = mid;
        }
        bnd = 0.5 * (left + right);
      } else {
        bnd = x_hi_;
      }
      facet_lo_ = a;
      facet_hi_ = bnd;
    }
  }
}

OracleSolution1D oracle_1d(double b, double p, const std::function<double(double)>& f,
                           double x_lo, double x_hi, double u_lo, double u_hi) {
  return OracleSolution1D(b, p, f, x_lo, x_hi, u_lo, u_hi);
}

OracleRadial oracle_bingham_pipe(double R_eff, double G, double gamma, double mu) {
  if (!(R_eff > 0.0 && G > 0.0 && mu > 0.0 && gamma >= 0.0))
    throw OracleError("oracle_bingham_pipe: bad parameters");
  OracleRadial o;
  o.R_eff = R_eff;
  o.G = G;
  o.gamma = gamma;
  o.mu = mu;
  o.r0 = 2.0 * gamma / G;
  if (o.r0 >= R_eff)
    throw OracleError("oracle_bingham_pipe: fully rigid configuration (r0 >= R_eff)");
  return o;
}

ProblemSpec builtin_problem(const std::string& name, int resolution) {
  ProblemSpec spec;
  spec.name = name;
  if (name == "plug1d") {
    int n = resolution > 0 ? resolution : 513;
    spec.grid = Grid::interval(-1.0, 1.0, n);
    spec.density = DensityParams::model(1.0, 2.0);
    spec.dirichlet = Eigen::VectorXd::Zero(spec.grid.node_count());
    spec.source = Eigen::VectorXd::Constant(spec.grid.node_count(), 2.0);
  } else if (name == "pipe2d") {
    int n = resolution > 0 ? resolution : 129;
    spec.grid = Grid::rectangle({-1.0, -1.0}, {1.0, 1.0}, n, n);
    spec.density = DensityParams::model(1.0, 2.0);
    spec.source = Eigen::VectorXd::Constant(spec.grid.node_count(), 4.0);
    spec.dirichlet = Eigen::VectorXd::Zero(spec.grid.node_count());
    OracleRadial pipe = oracle_bingham_pipe(std::sqrt(2.0), 4.0, 1.0, 1.0);
    for (int i = 0; i < spec.grid.node_count(); ++i)
      if (spec.grid.is_boundary(i)) spec.dirichlet[i] = pipe.value(spec.grid.node(i).norm());
  } else if (name == "spohn2d") {
    int n = resolution > 0 ? resolution : 65;
    spec.grid = Grid::rectangle({-1.0, -1.0}, {1.0, 1.0}, n, n);
    spec.density = DensityParams::model(1.0 / 3.0, 3.0);
    spec.dirichlet = Eigen::VectorXd::Zero(spec.grid.node_count());
    spec.source = Eigen::VectorXd::Zero(spec.grid.node_count());
    for (int i = 0; i < spec.grid.node_count(); ++i) {
      double s = spec.grid.node(i).squaredNorm() / (0.8 * 0.8);
      spec.source[i] = s < 1.0 ? 5.0 * std::exp(-1.0 / (1.0 - s)) : 0.0;
    }
  } else {
    throw std::invalid_argument("unknown builtin problem '" + name + "'");
  }
  spec.validate();
  return spec;
}

ContinuationSchedule default_schedule(const std::string& name) {
  if (name == "plug1d") return ContinuationSchedule::halving_to(1e-3, 0.1, 1e-4);
  if (name == "pipe2d") return ContinuationSchedule::halving_to(0.05, 0.1, 1e-3);
  if (name == "spohn2d") return ContinuationSchedule::halving_to(0.05, 0.1, 5e-3);
  throw std::invalid_argument("unknown builtin problem '" + name + "'");
}

}  // namespace facetflow
