#pragma once

#include <functional>
#include <memory>
#include <string>

#include "facetflow/problem.hpp"
#include "facetflow/solver.hpp"

namespace facetflow {

class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Weak solution of -(b sgn(u') + |u'|^{p-2}u')' = f on an interval with
// Dirichlet ends, built by monotone flux inversion: u' = PsiInv(sigma) with
// sigma(x) = c - int_a^x f, and c fixed by the boundary increment.
class OracleSolution1D {
 public:
  OracleSolution1D(double b, double p, std::function<double(double)> f, double x_lo,
                   double x_hi, double u_lo, double u_hi);

  double flux_constant() const { return c_; }
  bool has_facet() const { return has_facet_; }
  double facet_lo() const { return facet_lo_; }
  double facet_hi() const { return facet_hi_; }

  double sigma(double x) const;  // flux field c - int f
  double du(double x) const;     // exact weak derivative
  double u(double x) const;

  // Scalar flux map t -> b sgn(t) + |t|^{p-2} t and its inverse.
  double psi(double t) const;
  double psi_inv(double s) const;

 private:
  double antiderivative(double x) const;  // int_{x_lo}^x f
  double b_, p_, x_lo_, x_hi_, u_lo_;
  double c_ = 0.0;
  bool has_facet_ = false;
  double facet_lo_ = 0.0, facet_hi_ = 0.0;
  std::function<double(double)> f_;
  int panels_;
  double h_;
  std::vector<double> f_prefix_;   // antiderivative at panel boundaries
  std::vector<double> f_nodes_;    // antiderivative at panel quadrature nodes
  std::vector<double> u_prefix_;   // u increment at panel boundaries
};

OracleSolution1D oracle_1d(double b, double p, const std::function<double(double)>& f,
                           double x_lo, double x_hi, double u_lo, double u_hi);

// Laminar yield-stress pipe profile: rigid core of radius r0 = 2*gamma/G,
// parabolic-minus-linear flow outside it, no-slip at R_eff.
struct OracleRadial {
  double R_eff = 1.0, G = 4.0, gamma = 1.0, mu = 1.0;
  double r0 = 0.5;

  double value(double r) const {
    double rc = std::max(r, r0);
    return (G / (4.0 * mu)) * (R_eff * R_eff - rc * rc) - (gamma / mu) * (R_eff - rc);
  }
  double dvalue(double r) const {
    if (r <= r0) return 0.0;
    return -(G * r / 2.0 - gamma) / mu;
  }
  double plug_value() const { return value(0.0); }
};

OracleRadial oracle_bingham_pipe(double R_eff, double G, double gamma, double mu);

// Stable CLI problem identifiers: plug1d, pipe2d, spohn2d.
ProblemSpec builtin_problem(const std::string& name, int resolution = 0);
ContinuationSchedule default_schedule(const std::string& name);

}  // namespace facetflow
