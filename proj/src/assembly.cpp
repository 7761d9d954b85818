#include "facetflow/assembly.hpp"

#include <vector>

#include "facetflow/parallel.hpp"

namespace facetflow {
namespace {

void check_field(const ProblemSpec& spec, const ScalarField& u, const char* where) {
  if (!spec.grid.same_layout(u.grid) || u.values.size() != spec.grid.node_count())
    throw std::invalid_argument(std::string(where) + ": field does not live on the problem grid");
}

}  // namespace

double assemble_energy(const ProblemSpec& spec, double eps, const ScalarField& u) {
  check_field(spec, u, "assemble_energy");
  const Grid& grid = spec.grid;
  const RelaxedDensity density = spec.relaxed(eps);
  const int n_cells = grid.cell_count();
  const int chunks = default_chunks(n_cells);

  std::vector<double> partial(chunks, 0.0);
  parallel_chunks(n_cells, chunks, [&](int chunk, std::ptrdiff_t lo, std::ptrdiff_t hi) {
    double acc = 0.0;
    for (std::ptrdiff_t c = lo; c < hi; ++c) {
      auto nodes = grid.cell_nodes(static_cast<int>(c));
      auto shapes = grid.cell_shape_gradients(static_cast<int>(c));
      Eigen::Vector2d g = Eigen::Vector2d::Zero();
      for (int k = 0; k < grid.nodes_per_cell(); ++k) g += u.values[nodes[k]] * shapes[k];
      acc += grid.cell_area(static_cast<int>(c)) * value(density, g);
    }
    partial[chunk] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;  // fixed chunk order
  total -= lumped_mass(grid).cwiseProduct(spec.source).dot(u.values);
  return total;
}

ScalarField assemble_residual(const ProblemSpec& spec, double eps, const ScalarField& u) {
  check_field(spec, u, "assemble_residual");
  const Grid& grid = spec.grid;
  const RelaxedDensity density = spec.relaxed(eps);
  const int n_cells = grid.cell_count();
  const int chunks = default_chunks(n_cells);

  std::vector<Eigen::VectorXd> partial(chunks);
  parallel_chunks(n_cells, chunks, [&](int chunk, std::ptrdiff_t lo, std::ptrdiff_t hi) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(grid.node_count());
    for (std::ptrdiff_t c = lo; c < hi; ++c) {
      auto nodes = grid.cell_nodes(static_cast<int>(c));
      auto shapes = grid.cell_shape_gradients(static_cast<int>(c));
      Eigen::Vector2d g = Eigen::Vector2d::Zero();
      for (int k = 0; k < grid.nodes_per_cell(); ++k) g += u.values[nodes[k]] * shapes[k];
      Eigen::Vector2d flux = gradient(density, g);
      double a = grid.cell_area(static_cast<int>(c));
      for (int k = 0; k < grid.nodes_per_cell(); ++k)
        acc[nodes[k]] += a * flux.dot(shapes[k]);
    }
    partial[chunk] = std::move(acc);
  });
  ScalarField r = ScalarField::zeros(grid);
  for (const auto& acc : partial) r.values += acc;
  r.values -= lumped_mass(grid).cwiseProduct(spec.source);
  for (int i = 0; i < grid.node_count(); ++i)
    if (grid.is_boundary(i)) r.values[i] = 0.0;
  return r;
}

Eigen::SparseMatrix<double> assemble_hessian(const ProblemSpec& spec, double eps,
                                             const ScalarField& u) {
  check_field(spec, u, "assemble_hessian");
  const Grid& grid = spec.grid;
  const RelaxedDensity density = spec.relaxed(eps);
  const int n_cells = grid.cell_count();
  const int n_nodes = grid.node_count();
  const int chunks = default_chunks(n_cells);

  using Trip = Eigen::Triplet<double>;
  std::vector<std::vector<Trip>> partial(chunks);
  parallel_chunks(n_cells, chunks, [&](int chunk, std::ptrdiff_t lo, std::ptrdiff_t hi) {
    std::vector<Trip>& trips = partial[chunk];
    trips.reserve(static_cast<size_t>(hi - lo) * 9);
    for (std::ptrdiff_t c = lo; c < hi; ++c) {
      auto nodes = grid.cell_nodes(static_cast<int>(c));
      auto shapes = grid.cell_shape_gradients(static_cast<int>(c));
      Eigen::Vector2d g = Eigen::Vector2d::Zero();
      const int npc = grid.nodes_per_cell();
      for (int k = 0; k < npc; ++k) g += u.values[nodes[k]] * shapes[k];
      Eigen::Matrix2d H = hessian(density, g);
      double a = grid.cell_area(static_cast<int>(c));
      for (int k = 0; k < npc; ++k) {
        if (grid.is_boundary(nodes[k])) continue;
        for (int l = 0; l < npc; ++l) {
          if (grid.is_boundary(nodes[l])) continue;
          trips.emplace_back(nodes[k], nodes[l], a * shapes[k].dot(H * shapes[l]));
        }
      }
    }
  });

  std::vector<Trip> all;
  size_t total = n_nodes;
  for (const auto& t : partial) total += t.size();
  all.reserve(total);
  for (const auto& t : partial) all.insert(all.end(), t.begin(), t.end());
  for (int i = 0; i < n_nodes; ++i)
    if (grid.is_boundary(i)) all.emplace_back(i, i, 1.0);

  Eigen::SparseMatrix<double> A(n_nodes, n_nodes);
  A.setFromTriplets(all.begin(), all.end());
  return A;
}

}  // namespace facetflow
