#pragma once

#include <Eigen/Core>
#include <array>
#include <stdexcept>
#include <vector>

namespace facetflow {

// Uniform interval (dim 1) or structured rectangle (dim 2). In 2D every grid
// square splits into two triangles along the diagonal from its lower-left to
// its upper-right corner. Node id = i + nx*j (row-major); square s = i+(nx-1)*j
// carries triangles 2s (lower) and 2s+1 (upper).
struct Grid {
  int dim = 1;
  Eigen::Vector2d lo = Eigen::Vector2d::Zero();
  Eigen::Vector2d hi = Eigen::Vector2d::Ones();
  int nx = 2;
  int ny = 1;
  double hx = 1.0;
  double hy = 1.0;

  static Grid interval(double a, double b, int nodes);
  static Grid rectangle(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, int nx, int ny);

  int node_count() const { return nx * ny; }
  int cell_count() const { return dim == 1 ? nx - 1 : 2 * (nx - 1) * (ny - 1); }
  int nodes_per_cell() const { return dim + 1; }

  Eigen::Vector2d node(int id) const {
    int i = id % nx, j = id / nx;
    return {lo.x() + hx * i, dim == 1 ? 0.0 : lo.y() + hy * j};
  }

  bool is_boundary(int id) const {
    int i = id % nx, j = id / nx;
    if (dim == 1) return i == 0 || i == nx - 1;
    return i == 0 || i == nx - 1 || j == 0 || j == ny - 1;
  }

  // Vertex ids of cell c; the unused slot is -1 in 1D.
  std::array<int, 3> cell_nodes(int c) const;
  Eigen::Vector2d cell_centroid(int c) const;
  double cell_area(int /*c*/) const { return dim == 1 ? hx : 0.5 * hx * hy; }

  // Per-vertex P1 shape-function gradients of cell c, matching cell_nodes.
  std::array<Eigen::Vector2d, 3> cell_shape_gradients(int c) const;

  // Cells whose centroid lies within distance r of x0 (Euclidean; the y
  // coordinate is ignored in 1D by construction).
  std::vector<int> ball_cells(const Eigen::Vector2d& x0, double r) const;

  bool same_layout(const Grid& other) const {
    return dim == other.dim && nx == other.nx && ny == other.ny &&
           lo == other.lo && hi == other.hi;
  }
};

struct ScalarField {
  Grid grid;
  Eigen::VectorXd values;  // one per node

  static ScalarField zeros(const Grid& g) { return {g, Eigen::VectorXd::Zero(g.node_count())}; }
};

// Piecewise-constant per-cell gradients of a P1 field.
struct VectorField {
  Grid grid;
  Eigen::Matrix2Xd values;  // one column per cell
};

struct CellField {
  Grid grid;
  Eigen::VectorXd values;  // one per cell
};

VectorField gradient_field(const Grid& grid, const ScalarField& u);

// Diagonal (lumped) node masses: each cell spreads its area evenly over its
// vertices.
Eigen::VectorXd lumped_mass(const Grid& grid);

// Area-weighted average of incident cell vectors at each node (export only;
// per-cell data stays authoritative).
Eigen::Matrix2Xd node_averaged(const VectorField& field);

CellField veps_field(const VectorField& grad, double eps);

}  // namespace facetflow
