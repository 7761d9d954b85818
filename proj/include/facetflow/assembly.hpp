#pragma once

#include <Eigen/SparseCore>

#include "facetflow/problem.hpp"

namespace facetflow {

// Discrete regularized energy: sum over cells of |cell| E_eps(grad u) minus
// the lumped source pairing.
double assemble_energy(const ProblemSpec& spec, double eps, const ScalarField& u);

// Nodal gradient of the discrete energy, zeroed on Dirichlet nodes.
ScalarField assemble_residual(const ProblemSpec& spec, double eps, const ScalarField& u);

// Second derivative of the discrete energy; Dirichlet rows and columns are
// eliminated symmetrically (unit diagonal).
Eigen::SparseMatrix<double> assemble_hessian(const ProblemSpec& spec, double eps,
                                             const ScalarField& u);

}  // namespace facetflow
