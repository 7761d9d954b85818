#pragma once

#include <Eigen/Core>
#include <limits>
#include <string>

#include "facetflow/density.hpp"
#include "facetflow/grid.hpp"

namespace facetflow {

struct ProblemSpec {
  Grid grid;
  DensityParams density;
  RelaxMode mode = RelaxMode::closed_form;
  KernelShape kernel_shape = KernelShape::quartic_bump;
  Eigen::VectorXd dirichlet;  // nodal; read at boundary nodes only
  Eigen::VectorXd source;     // nodal f
  double q = std::numeric_limits<double>::infinity();
  std::string name;

  void validate() const {
    density.validate();
    if (dirichlet.size() != grid.node_count() || source.size() != grid.node_count())
      throw std::invalid_argument("ProblemSpec: nodal data does not match the grid");
    if (!(q > grid.dim)) throw std::invalid_argument("ProblemSpec: q must exceed the dimension");
    if (!source.allFinite() || !dirichlet.allFinite())
      throw std::invalid_argument("ProblemSpec: non-finite nodal data");
  }

  RelaxedDensity relaxed(double eps) const {
    return mode == RelaxMode::closed_form
               ? RelaxedDensity::closed_form(density, eps)
               : RelaxedDensity::mollified(density, eps, kernel_shape);
  }
};

}  // namespace facetflow
