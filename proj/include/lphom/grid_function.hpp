#pragma once

#include <functional>

#include "lphom/torus_grid.hpp"

namespace lphom {

// Scalar field on a fine torus grid (node values).
struct GridFunction {
  TorusGrid grid;
  Eigen::VectorXd values;

  GridFunction() = default;
  GridFunction(const TorusGrid& g, Eigen::VectorXd v);
  static GridFunction zeros(const TorusGrid& g);
  static GridFunction sample(const TorusGrid& g, const std::function<double(const Vec&)>& f);
};

struct Norms {
  double l2 = 0.0;
  double h1 = 0.0;
};

// Discrete L2 inner product h^d sum u v (trapezoid rule on the torus).
double l2_inner(const TorusGrid& g, const Eigen::VectorXd& u, const Eigen::VectorXd& v);
double l2_norm(const TorusGrid& g, const Eigen::VectorXd& u);

// H1 Gram operator I + (strong-form multilinear Laplacian): h^d u^T H u is
// |u|_L2^2 + |grad u|_L2^2 with element gradients.
SpMat h1_gram(const TorusGrid& g);

Norms norms(const GridFunction& u);

}  // namespace lphom
