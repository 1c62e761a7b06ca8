#include "lphom/grid_function.hpp"

#include <cmath>

namespace lphom {

GridFunction::GridFunction(const TorusGrid& g, Eigen::VectorXd v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw ConfigError("GridFunction: value count does not match the grid");
}

GridFunction GridFunction::zeros(const TorusGrid& g) { return GridFunction(g, Eigen::VectorXd::Zero(g.size())); }

GridFunction GridFunction::sample(const TorusGrid& g, const std::function<double(const Vec&)>& f) {
  Eigen::VectorXd v(g.size());
  for (Index k = 0; k < g.size(); ++k) v[k] = f(g.node(k));
  return GridFunction(g, std::move(v));
}

double l2_inner(const TorusGrid& g, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return g.cell_volume() * u.dot(v);
}

double l2_norm(const TorusGrid& g, const Eigen::VectorXd& u) { return std::sqrt(l2_inner(g, u, u)); }

SpMat h1_gram(const TorusGrid& g) {
  ElementQuadrature quad = make_quadrature(g.dim, default_rule(g.dim));
  std::vector<Mat> id(static_cast<std::size_t>(g.size() * quad.n_points()), Mat::Identity(g.dim, g.dim));
  return assemble_diffusion(g, quad, id, 1.0);
}

Norms norms(const GridFunction& u) {
  Norms n;
  n.l2 = l2_norm(u.grid, u.values);
  SpMat H = h1_gram(u.grid);
  double e = u.grid.cell_volume() * u.values.dot(H * u.values);
  n.h1 = std::sqrt(std::max(e, 0.0));
  return n;
}

}  // namespace lphom
