#include "lphom/fine_assembly.hpp"

#include <Eigen/SparseLU>
#include <sstream>

#include "lphom/slow_grid.hpp"

namespace lphom {

TorusGrid fine_grid(int dim, int eps_denominator, int n_f) {
  if (eps_denominator < 2) throw ConfigError("fine_grid: eps must be 1/k with k >= 2");
  if (n_f < 8) throw ConfigError("fine_grid: need at least 8 points per eps-cell");
  return TorusGrid(dim, eps_denominator * n_f);
}

int points_per_cell(const TorusGrid& grid, int eps_denominator) {
  if (eps_denominator < 2 || grid.n % eps_denominator != 0) {
    std::ostringstream os;
    os << "grid with " << grid.n << " points is not commensurate with eps = 1/" << eps_denominator;
    throw ConfigError(os.str());
  }
  int n_f = grid.n / eps_denominator;
  if (n_f < 8) throw ConfigError("grid does not resolve eps: fewer than 8 points per eps-cell");
  return n_f;
}

std::vector<Vec> fast_quad_points(const TorusGrid& grid, int n_f, const ElementQuadrature& quad) {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(grid.size() * quad.n_points()));
  for (Index e = 0; e < grid.size(); ++e) {
    auto c = grid.coords(e);
    for (int q = 0; q < quad.n_points(); ++q) {
      Vec y(grid.dim);
      for (int a = 0; a < grid.dim; ++a) y[a] = ((c[a] % n_f) + quad.points[q][a]) / n_f;
      out.push_back(y);
    }
  }
  return out;
}

SpMat assemble_fine(const CoefficientField& field, int eps_denominator, const TorusGrid& grid, bool transpose) {
  if (grid.dim != field.dim) throw ConfigError("assemble_fine: grid dimension does not match the field");
  const int n_f = points_per_cell(grid, eps_denominator);
  ElementQuadrature quad = make_quadrature(grid.dim, default_rule(grid.dim));
  auto xs = quad_points(grid, quad);
  auto ys = fast_quad_points(grid, n_f, quad);
  std::vector<Mat> coef(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    coef[i] = field.eval(xs[i], ys[i]);
    if (transpose) coef[i].transposeInPlace();
  }
  return assemble_diffusion(grid, quad, coef, 1.0);
}

SpMat assemble_homogenized(const HomogenizedField& hom, const TorusGrid& grid) {
  if (grid.dim != hom.dim) throw ConfigError("assemble_homogenized: grid dimension does not match");
  ElementQuadrature quad = make_quadrature(grid.dim, default_rule(grid.dim));
  auto tensor = hom.on_tensor(quad_coordinates(grid, quad));
  auto order = quad_tensor_order(grid, quad);
  std::vector<Mat> coef(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) coef[i] = tensor[static_cast<std::size_t>(order[i])];
  return assemble_diffusion(grid, quad, coef, 1.0);
}

struct Resolvent::Impl {
  Eigen::SparseLU<SpMat> lu;
};

Resolvent::Resolvent(const SpMat& a_plus_one, std::string name)
    : impl_(std::make_shared<Impl>()), matrix_(std::make_shared<const SpMat>(a_plus_one)), name_(std::move(name)) {
  impl_->lu.compute(*matrix_);
  if (impl_->lu.info() != Eigen::Success) throw SolverError("Resolvent " + name_ + ": factorization failed");
}

Eigen::VectorXd Resolvent::solve(const Eigen::VectorXd& rhs) const { return impl_->lu.solve(rhs); }

Eigen::VectorXd Resolvent::solve_transpose(const Eigen::VectorXd& rhs) const {
  return impl_->lu.transpose().solve(rhs);
}

DiscreteOperator Resolvent::op() const {
  Resolvent self = *this;
  return DiscreteOperator(
      matrix_->rows(), matrix_->cols(), [self](const Eigen::VectorXd& x) { return self.solve(x); },
      [self](const Eigen::VectorXd& y) { return self.solve_transpose(y); }, name_);
}

SolveResult solve(const SpMat& op, const GridFunction& rhs, double tol) {
  if (op.rows() != rhs.grid.size()) throw ConfigError("solve: operator and right-hand side sizes differ");
  SolveResult r;
  double fnorm = rhs.values.norm();
  if (fnorm == 0.0) {
    r.u = GridFunction::zeros(rhs.grid);
    return r;
  }
  Eigen::SparseLU<SpMat> lu;
  lu.compute(op);
  if (lu.info() != Eigen::Success) throw SolverError("solve: factorization failed");
  Eigen::VectorXd u = lu.solve(rhs.values);
  // One step of iterative refinement keeps the residual near machine level.
  u += lu.solve(Eigen::VectorXd(rhs.values - op * u));
  r.relative_residual = (rhs.values - op * u).norm() / fnorm;
  r.u = GridFunction(rhs.grid, u);
  r.energy_ratio = norms(r.u).h1 / l2_norm(rhs.grid, rhs.values);
  if (!(r.relative_residual <= tol)) {
    std::ostringstream os;
    os << "solve: relative residual " << r.relative_residual << " exceeds " << tol;
    throw SolverError(os.str());
  }
  return r;
}

}  // namespace lphom
