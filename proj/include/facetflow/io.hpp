#pragma once

#include <string>

#include "facetflow/diagnostics.hpp"
#include "facetflow/problem.hpp"
#include "facetflow/solver.hpp"

namespace facetflow {

// Saved-run layout under a directory:
//   u.csv            nodal table (1D: x,u,du,Veps,Gdelta; 2D: x,y,u,ux,uy,
//                    veps,g2d_x,g2d_y), gradients cell-averaged to nodes
//   cells.csv        per-cell centroids and gradients (solver-authoritative)
//   convergence.csv  continuation record
//   meta.json        grid, density, schedule and diagnostics parameters
//   report.txt       key: value diagnostics report (plug_value last)
//   excess.csv, superlevel.csv   report tables
//   u.vtk            optional legacy structured-points export

struct RunMeta {
  std::string problem;
  int dim = 1;
  Eigen::Vector2d lo, hi;
  int nx = 0, ny = 1;
  double b = 1.0, p = 2.0, q = std::numeric_limits<double>::infinity();
  double delta = 0.05;
  std::vector<double> eps_list;
  double final_eps = 0.0;
  DiagnosticsParams diagnostics;
};

void ensure_directory(const std::string& dir);

void write_solution_csv(const std::string& path, const Solution& sol, double delta);
void write_cells_csv(const std::string& path, const VectorField& grad);
void write_vtk(const std::string& path, const Solution& sol, double delta);
void write_convergence_csv(const std::string& path, const ConvergenceTable& table,
                           const std::vector<Solution>& steps);
void write_meta(const std::string& path, const RunMeta& meta);
void write_report(const std::string& dir, const DiagnosticsReport& rep);

RunMeta read_meta(const std::string& path);
// Rebuilds the final solution from u.csv + cells.csv (bit-identical parse).
Solution read_solution(const std::string& dir, const RunMeta& meta);

std::string report_text(const DiagnosticsReport& rep);

}  // namespace facetflow
