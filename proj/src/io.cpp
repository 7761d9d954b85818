#include "facetflow/io.hpp"

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "facetflow/truncation.hpp"
#include <json.hpp>

namespace facetflow {
namespace {

std::string g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string tok;
  while (std::getline(ss, tok, sep)) out.push_back(tok);
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

}  // namespace

void ensure_directory(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir + ": " + ec.message());
}

void write_solution_csv(const std::string& path, const Solution& sol, double delta) {
  const Grid& grid = sol.u.grid;
  Eigen::Matrix2Xd g = node_averaged(sol.grad);
  std::ofstream f = open_out(path);
  if (grid.dim == 1) {
    f << "x,u,du,Veps,Gdelta\n";
    for (int i = 0; i < grid.node_count(); ++i) {
      double du = g(0, i);
      double veps = std::sqrt(sol.eps * sol.eps + du * du);
      double gd = std::max(std::abs(du) - delta, 0.0) * (du > 0 ? 1.0 : du < 0 ? -1.0 : 0.0);
      f << g17(grid.node(i).x()) << ',' << g17(sol.u.values[i]) << ',' << g17(du) << ','
        << g17(veps) << ',' << g17(gd) << '\n';
    }
    return;
  }
  f << "x,y,u,ux,uy,veps,g2d_x,g2d_y\n";
  for (int i = 0; i < grid.node_count(); ++i) {
    Eigen::Vector2d x = grid.node(i);
    Eigen::Vector2d gi = g.col(i);
    Eigen::Vector2d g2 = truncate_relaxed(gi, 2.0 * delta, sol.eps);
    f << g17(x.x()) << ',' << g17(x.y()) << ',' << g17(sol.u.values[i]) << ',' << g17(gi.x())
      << ',' << g17(gi.y()) << ',' << g17(v_eps(gi, sol.eps)) << ',' << g17(g2.x()) << ','
      << g17(g2.y()) << '\n';
  }
}

void write_cells_csv(const std::string& path, const VectorField& grad) {
  std::ofstream f = open_out(path);
  f << "cell,cx,cy,gx,gy\n";
  for (int c = 0; c < grad.grid.cell_count(); ++c) {
    Eigen::Vector2d x = grad.grid.cell_centroid(c);
    f << c << ',' << g17(x.x()) << ',' << g17(x.y()) << ',' << g17(grad.values(0, c)) << ','
      << g17(grad.values(1, c)) << '\n';
  }
}

void write_vtk(const std::string& path, const Solution& sol, double delta) {
  const Grid& grid = sol.u.grid;
  Eigen::Matrix2Xd g = node_averaged(sol.grad);
  std::ofstream f = open_out(path);
  f << "# vtk DataFile Version 3.0\n";
  f << "facetflow solution\n";
  f << "ASCII\n";
  f << "DATASET STRUCTURED_POINTS\n";
  f << "DIMENSIONS " << grid.nx << ' ' << (grid.dim == 2 ? grid.ny : 1) << " 1\n";
  f << "ORIGIN " << g17(grid.lo.x()) << ' ' << g17(grid.dim == 2 ? grid.lo.y() : 0.0) << " 0\n";
  f << "SPACING " << g17(grid.hx) << ' ' << g17(grid.dim == 2 ? grid.hy : 1.0) << " 1\n";
  f << "POINT_DATA " << grid.node_count() << '\n';
  f << "SCALARS u double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < grid.node_count(); ++i) f << g17(sol.u.values[i]) << '\n';
  f << "SCALARS G2d_magnitude double 1\nLOOKUP_TABLE default\n";
  for (int i = 0; i < grid.node_count(); ++i) {
    Eigen::Vector2d gi = g.col(i);
    f << g17(truncate_relaxed(gi, 2.0 * delta, sol.eps).norm()) << '\n';
  }
}

void write_convergence_csv(const std::string& path, const ConvergenceTable& table,
                           const std::vector<Solution>& steps) {
  std::ofstream f = open_out(path);
  f << "k,eps,newton_iters,residual,energy,grad_diff_lp,g2d_sup_diff\n";
  for (size_t k = 0; k < steps.size(); ++k) {
    f << k << ',' << g17(steps[k].eps) << ',' << steps[k].newton_iters << ','
      << g17(steps[k].residual_norm) << ',' << g17(steps[k].energy) << ',';
    if (k > 0) f << g17(table.grad_diff_lp[k - 1]);
    f << ',';
    if (k > 0 && !std::isnan(table.g2d_sup_diff[k - 1])) f << g17(table.g2d_sup_diff[k - 1]);
    f << '\n';
  }
}

void write_meta(const std::string& path, const RunMeta& meta) {
  nlohmann::json j;
  j["problem"] = meta.problem;
  j["grid"] = {{"dim", meta.dim},
               {"lo", {meta.lo.x(), meta.lo.y()}},
               {"hi", {meta.hi.x(), meta.hi.y()}},
               {"nx", meta.nx},
               {"ny", meta.ny}};
  j["density"] = {{"b", meta.b}, {"p", meta.p}};
  j["q"] = std::isinf(meta.q) ? nlohmann::json() : nlohmann::json(meta.q);
  j["schedule"] = {{"delta", meta.delta}, {"eps_list", meta.eps_list}};
  j["final_eps"] = meta.final_eps;
  j["diagnostics"] = {{"delta", meta.diagnostics.delta},
                      {"beta_hat0", meta.diagnostics.beta_hat0},
                      {"facet_tol", meta.diagnostics.facet_tol},
                      {"excess_radii", meta.diagnostics.excess_radii},
                      {"holder_pair_budget", meta.diagnostics.holder_pair_budget},
                      {"seed", meta.diagnostics.seed}};
  std::ofstream f = open_out(path);
  f << j.dump(2) << '\n';
}

RunMeta read_meta(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  f >> j;
  RunMeta meta;
  meta.problem = j.at("problem").get<std::string>();
  meta.dim = j.at("grid").at("dim").get<int>();
  auto lo = j.at("grid").at("lo");
  auto hi = j.at("grid").at("hi");
  meta.lo = {lo[0].get<double>(), lo[1].get<double>()};
  meta.hi = {hi[0].get<double>(), hi[1].get<double>()};
  meta.nx = j.at("grid").at("nx").get<int>();
  meta.ny = j.at("grid").at("ny").get<int>();
  meta.b = j.at("density").at("b").get<double>();
  meta.p = j.at("density").at("p").get<double>();
  meta.q = j.at("q").is_null() ? std::numeric_limits<double>::infinity()
                               : j.at("q").get<double>();
  meta.delta = j.at("schedule").at("delta").get<double>();
  meta.eps_list = j.at("schedule").at("eps_list").get<std::vector<double>>();
  meta.final_eps = j.at("final_eps").get<double>();
  const auto& d = j.at("diagnostics");
  meta.diagnostics.delta = d.at("delta").get<double>();
  meta.diagnostics.beta_hat0 = d.at("beta_hat0").get<double>();
  meta.diagnostics.facet_tol = d.at("facet_tol").get<double>();
  meta.diagnostics.excess_radii = d.at("excess_radii").get<std::vector<double>>();
  meta.diagnostics.holder_pair_budget = d.at("holder_pair_budget").get<int>();
  meta.diagnostics.seed = d.at("seed").get<std::uint64_t>();
  meta.diagnostics.q = meta.q;
  return meta;
}

Solution read_solution(const std::string& dir, const RunMeta& meta) {
  Grid grid = meta.dim == 1 ? Grid::interval(meta.lo.x(), meta.hi.x(), meta.nx)
                            : Grid::rectangle(meta.lo, meta.hi, meta.nx, meta.ny);
  Solution sol;
  sol.eps = meta.final_eps;
  sol.u = ScalarField::zeros(grid);

  std::ifstream fu(dir + "/u.csv");
  if (!fu) throw std::runtime_error("cannot read " + dir + "/u.csv");
  std::string line;
  std::getline(fu, line);  // header
  int ucol = meta.dim == 1 ? 1 : 2;
  for (int i = 0; i < grid.node_count(); ++i) {
    if (!std::getline(fu, line)) throw std::runtime_error("u.csv: truncated");
    auto cols = split(line, ',');
    sol.u.values[i] = std::strtod(cols.at(ucol).c_str(), nullptr);
  }

  sol.grad = VectorField{grid, Eigen::Matrix2Xd::Zero(2, grid.cell_count())};
  std::ifstream fc(dir + "/cells.csv");
  if (!fc) throw std::runtime_error("cannot read " + dir + "/cells.csv");
  std::getline(fc, line);
  for (int c = 0; c < grid.cell_count(); ++c) {
    if (!std::getline(fc, line)) throw std::runtime_error("cells.csv: truncated");
    auto cols = split(line, ',');
    sol.grad.values(0, c) = std::strtod(cols.at(3).c_str(), nullptr);
    sol.grad.values(1, c) = std::strtod(cols.at(4).c_str(), nullptr);
  }
  return sol;
}

std::string report_text(const DiagnosticsReport& rep) {
  std::ostringstream os;
  os << "delta: " << g17(rep.delta) << '\n';
  os << "eps: " << g17(rep.eps) << '\n';
  os << "beta: " << g17(rep.beta) << '\n';
  os << "facet_tol: " << g17(rep.facet_tol) << '\n';
  os << "facet_measure: " << g17(rep.facet.measure) << '\n';
  os << "facet_cells: " << rep.facet.cells << '\n';
  os << "alpha_hat: " << g17(rep.holder.alpha_hat) << '\n';
  os << "alpha_fit_residual: " << g17(rep.holder.fit_residual) << '\n';
  os << "holder_sup_quotient: " << g17(rep.holder.sup_quotient) << '\n';
  os << "holder_points_used: " << rep.holder.points_used << '\n';
  os << "ellipticity_ratio_min: " << g17(rep.ellipticity_ratio_min) << '\n';
  os << "ellipticity_ratio_max: " << g17(rep.ellipticity_ratio_max) << '\n';
  os << "plug_value: " << g17(rep.plug_value) << '\n';
  return os.str();
}

void write_report(const std::string& dir, const DiagnosticsReport& rep) {
  {
    std::ofstream f = open_out(dir + "/report.txt");
    f << report_text(rep);
  }
  {
    std::ofstream f = open_out(dir + "/excess.csv");
    f << "center_x,center_y,r,phi\n";
    for (const auto& row : rep.excess)
      f << g17(row.center.x()) << ',' << g17(row.center.y()) << ',' << g17(row.radius) << ','
        << g17(row.phi) << '\n';
  }
  {
    std::ofstream f = open_out(dir + "/superlevel.csv");
    f << "mu,nu,ratio\n";
    for (const auto& row : rep.superlevel)
      f << g17(row.mu) << ',' << g17(row.nu) << ',' << g17(row.ratio) << '\n';
  }
}

}  // namespace facetflow
