#pragma once

#include <vector>

#include "lphom/config.hpp"
#include "lphom/torus_grid.hpp"

namespace lphom {

// Periodic 1D interpolation from n samples at i/n to arbitrary points:
// rows = targets, cols = samples. Trig uses the band-limited (Dirichlet) kernel.
Eigen::MatrixXd periodic_interp_matrix(int n, const std::vector<double>& targets, SlowInterp method);

// Periodic first derivative on n samples of a unit-period function.
Eigen::MatrixXd periodic_derivative_matrix(int n, SlowDerivative method);

// Interpolates fields sampled on a slow TorusGrid to the tensor product of a
// 1D target list (same list on every axis). Target tensor index t0 + m*t1.
class SlowInterpolator {
 public:
  SlowInterpolator(const TorusGrid& slow, const std::vector<double>& targets, SlowInterp method);
  // values: rows = slow nodes, one column per field.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& values) const;
  Index target_size() const;
  int targets_per_axis() const { return static_cast<int>(T_.rows()); }

 private:
  TorusGrid slow_;
  Eigen::MatrixXd T_;
};

// Slow derivative along `axis` of fields stored with rows = slow nodes.
Eigen::MatrixXd slow_derivative(const TorusGrid& slow, const Eigen::MatrixXd& values, int axis,
                                SlowDerivative method);

// 1D coordinates of the fine nodes and of the quadrature points per axis.
std::vector<double> node_coordinates(const TorusGrid& fine);
std::vector<double> quad_coordinates(const TorusGrid& fine, const ElementQuadrature& quad);
// Maps element-major quadrature index e*nq + q to the tensor index of quad_coordinates.
std::vector<Index> quad_tensor_order(const TorusGrid& fine, const ElementQuadrature& quad);

}  // namespace lphom
