#include <cstdint>
#include <cstring>
#include <fstream>

#include "lphom/cell_solver.hpp"

namespace lphom {
namespace {

constexpr char kMagic[8] = {'L', 'P', 'H', 'C', 'E', 'L', 'L', '1'};

void put_i32(std::ostream& os, std::int32_t v) { os.write(reinterpret_cast<const char*>(&v), sizeof v); }

std::int32_t get_i32(std::istream& is) {
  std::int32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw ConfigError("cell table: truncated header");
  return v;
}

// Row-major dump of a column-major Eigen matrix.
void put_matrix(std::ostream& os, const Eigen::MatrixXd& m) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r = m;
  os.write(reinterpret_cast<const char*>(r.data()), static_cast<std::streamsize>(r.size() * sizeof(double)));
}

Eigen::MatrixXd get_matrix(std::istream& is, Index rows, Index cols) {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> r(rows, cols);
  is.read(reinterpret_cast<char*>(r.data()), static_cast<std::streamsize>(r.size() * sizeof(double)));
  if (!is) throw ConfigError("cell table: truncated data");
  return r;
}

}  // namespace

void save_cell_table(const CellSolutions& cells, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write cell table '" + path + "'");
  os.write(kMagic, sizeof kMagic);
  put_i32(os, cells.dim);
  put_i32(os, cells.slow.n);
  put_i32(os, cells.cell.n);
  put_i32(os, cells.scheme == CellScheme::Spectral ? 1 : 2);
  put_i32(os, cells.rule == QuadRule::Midpoint ? 0 : 1);
  put_i32(os, cells.slow_derivative == SlowDerivative::Central ? 0 : 1);
  const Index points = cells.samples.empty() ? 0 : cells.samples[0].gradN.cols();
  put_i32(os, static_cast<std::int32_t>(points));
  double diag[4] = {cells.max_residual, cells.max_mean, cells.max_gradient_norm, cells.lipschitz_quotient};
  os.write(reinterpret_cast<const char*>(diag), sizeof diag);
  for (const CellSample& s : cells.samples) {
    put_matrix(os, s.N);
    put_matrix(os, s.Nt);
    put_matrix(os, s.gradN);
    put_matrix(os, s.gradNt);
    put_matrix(os, s.dxN);
    put_matrix(os, s.dxNt);
    os.write(reinterpret_cast<const char*>(&s.residual), sizeof s.residual);
  }
  if (!os) throw Error("failed writing cell table '" + path + "'");
}

CellSolutions load_cell_table(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open cell table '" + path + "'");
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw ConfigError("'" + path + "' is not a cell table");
  CellSolutions cells;
  cells.dim = get_i32(is);
  int n_x = get_i32(is);
  int n_y = get_i32(is);
  int scheme = get_i32(is);
  int rule = get_i32(is);
  int deriv = get_i32(is);
  Index points = get_i32(is);
  if (cells.dim < 1 || cells.dim > 2 || (scheme != 1 && scheme != 2)) throw ConfigError("cell table: bad header");
  cells.slow = TorusGrid(cells.dim, n_x);
  cells.cell = TorusGrid(cells.dim, n_y);
  cells.scheme = scheme == 1 ? CellScheme::Spectral : CellScheme::Element;
  cells.rule = rule == 0 ? QuadRule::Midpoint : QuadRule::Gauss2;
  cells.slow_derivative = deriv == 0 ? SlowDerivative::Central : SlowDerivative::Spectral;
  double diag[4];
  is.read(reinterpret_cast<char*>(diag), sizeof diag);
  cells.max_residual = diag[0];
  cells.max_mean = diag[1];
  cells.max_gradient_norm = diag[2];
  cells.lipschitz_quotient = diag[3];
  const int d = cells.dim;
  const Index nodes = cells.cell.size();
  cells.samples.resize(static_cast<std::size_t>(cells.slow.size()));
  for (CellSample& s : cells.samples) {
    s.N = get_matrix(is, nodes, d);
    s.Nt = get_matrix(is, nodes, d);
    s.gradN = get_matrix(is, d * d, points);
    s.gradNt = get_matrix(is, d * d, points);
    s.dxN = get_matrix(is, nodes, d * d);
    s.dxNt = get_matrix(is, nodes, d * d);
    is.read(reinterpret_cast<char*>(&s.residual), sizeof s.residual);
    if (!is) throw ConfigError("cell table: truncated data");
  }
  return cells;
}

}  // namespace lphom
