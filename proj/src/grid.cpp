#include "facetflow/grid.hpp"

#include "facetflow/truncation.hpp"

namespace facetflow {

Grid Grid::interval(double a, double b, int nodes) {
  if (!(b > a) || nodes < 2) throw std::invalid_argument("Grid::interval: bad extent");
  Grid g;
  g.dim = 1;
  g.lo = {a, 0.0};
  g.hi = {b, 0.0};
  g.nx = nodes;
  g.ny = 1;
  g.hx = (b - a) / (nodes - 1);
  g.hy = 1.0;
  return g;
}

Grid Grid::rectangle(const Eigen::Vector2d& lo, const Eigen::Vector2d& hi, int nx, int ny) {
  if (!(hi.x() > lo.x() && hi.y() > lo.y()) || nx < 2 || ny < 2)
    throw std::invalid_argument("Grid::rectangle: bad extent");
  Grid g;
  g.dim = 2;
  g.lo = lo;
  g.hi = hi;
  g.nx = nx;
  g.ny = ny;
  g.hx = (hi.x() - lo.x()) / (nx - 1);
  g.hy = (hi.y() - lo.y()) / (ny - 1);
  return g;
}

std::array<int, 3> Grid::cell_nodes(int c) const {
  if (dim == 1) return {c, c + 1, -1};
  int s = c / 2, t = c % 2;
  int i = s % (nx - 1), j = s / (nx - 1);
  int n00 = i + nx * j;
  int n10 = n00 + 1;
  int n01 = n00 + nx;
  int n11 = n01 + 1;
  if (t == 0) return {n00, n10, n11};  // lower triangle
  return {n00, n11, n01};              // upper triangle
}

Eigen::Vector2d Grid::cell_centroid(int c) const {
  auto nodes = cell_nodes(c);
  Eigen::Vector2d acc = Eigen::Vector2d::Zero();
  int count = nodes_per_cell();
  for (int k = 0; k < count; ++k) acc += node(nodes[k]);
  return acc / count;
}

std::array<Eigen::Vector2d, 3> Grid::cell_shape_gradients(int c) const {
  if (dim == 1) return {Eigen::Vector2d(-1.0 / hx, 0.0), Eigen::Vector2d(1.0 / hx, 0.0),
                        Eigen::Vector2d::Zero()};
  if (c % 2 == 0) {
    // lower: (n00, n10, n11); gx = (u10-u00)/hx, gy = (u11-u10)/hy
    return {Eigen::Vector2d(-1.0 / hx, 0.0), Eigen::Vector2d(1.0 / hx, -1.0 / hy),
            Eigen::Vector2d(0.0, 1.0 / hy)};
  }
  // upper: (n00, n11, n01); gx = (u11-u01)/hx, gy = (u01-u00)/hy
  return {Eigen::Vector2d(0.0, -1.0 / hy), Eigen::Vector2d(1.0 / hx, 0.0),
          Eigen::Vector2d(-1.0 / hx, 1.0 / hy)};
}

std::vector<int> Grid::ball_cells(const Eigen::Vector2d& x0, double r) const {
  std::vector<int> out;
  const double r2 = r * r;
  for (int c = 0; c < cell_count(); ++c)
    if ((cell_centroid(c) - x0).squaredNorm() <= r2) out.push_back(c);
  return out;
}

VectorField gradient_field(const Grid& grid, const ScalarField& u) {
  if (!grid.same_layout(u.grid) || u.values.size() != grid.node_count())
    throw std::invalid_argument("gradient_field: field does not live on this grid");
  VectorField g{grid, Eigen::Matrix2Xd::Zero(2, grid.cell_count())};
  for (int c = 0; c < grid.cell_count(); ++c) {
    auto nodes = grid.cell_nodes(c);
    auto shapes = grid.cell_shape_gradients(c);
    Eigen::Vector2d acc = Eigen::Vector2d::Zero();
    for (int k = 0; k < grid.nodes_per_cell(); ++k) acc += u.values[nodes[k]] * shapes[k];
    g.values.col(c) = acc;
  }
  return g;
}

Eigen::VectorXd lumped_mass(const Grid& grid) {
  Eigen::VectorXd m = Eigen::VectorXd::Zero(grid.node_count());
  for (int c = 0; c < grid.cell_count(); ++c) {
    auto nodes = grid.cell_nodes(c);
    double share = grid.cell_area(c) / grid.nodes_per_cell();
    for (int k = 0; k < grid.nodes_per_cell(); ++k) m[nodes[k]] += share;
  }
  return m;
}

Eigen::Matrix2Xd node_averaged(const VectorField& field) {
  const Grid& grid = field.grid;
  Eigen::Matrix2Xd acc = Eigen::Matrix2Xd::Zero(2, grid.node_count());
  Eigen::VectorXd wsum = Eigen::VectorXd::Zero(grid.node_count());
  for (int c = 0; c < grid.cell_count(); ++c) {
    auto nodes = grid.cell_nodes(c);
    double a = grid.cell_area(c);
    for (int k = 0; k < grid.nodes_per_cell(); ++k) {
      acc.col(nodes[k]) += a * field.values.col(c);
      wsum[nodes[k]] += a;
    }
  }
  for (int i = 0; i < grid.node_count(); ++i) acc.col(i) /= wsum[i];
  return acc;
}

CellField veps_field(const VectorField& grad, double eps) {
  CellField f{grad.grid, Eigen::VectorXd::Zero(grad.grid.cell_count())};
  for (int c = 0; c < f.grid.cell_count(); ++c)
    f.values[c] = v_eps(grad.values.col(c), eps);
  return f;
}

}  // namespace facetflow
