#pragma once

#include <array>
#include <vector>

#include "lphom/grid_function.hpp"

namespace lphom {

// omega- and t-quadratures for eps = 1/k on a fine grid with n_f points per
// eps-cell. Per axis, omega runs over -1/2 + s/m, s = 0..m, with trapezoid
// weights (half weight at both ends): a symmetric rule on [-1/2, 1/2] whose
// points are exact fine-grid shifts and which gives each fast residue class
// mod 1 the weight 1/m. Tensor product in 2D; weights sum to 1.
struct SmoothingSpec {
  int dim = 1;
  int eps_denominator = 8;
  int n_f = 16;
  int omega_points = 16;  // m
  std::vector<Vec> omega;
  std::vector<double> weights;
  std::vector<std::array<long, 2>> offsets;  // eps*omega in fine-grid steps
  std::vector<double> t_nodes, t_weights;    // Gauss-Legendre on [0, 1]

  double eps() const { return 1.0 / eps_denominator; }
  std::size_t size() const { return omega.size(); }
};

SmoothingSpec make_smoothing_spec(int dim, int eps_denominator, int n_f, int omega_points, int t_gauss);

// u(x + offset). offset must be a multiple of the grid spacing in every
// component; throws ConfigError otherwise.
GridFunction shift(const GridFunction& u, const Vec& offset);
// Shift by whole grid steps.
Eigen::VectorXd shift_steps(const TorusGrid& g, const Eigen::VectorXd& u, const std::array<long, 2>& steps);

// S^eps u(x) = sum_omega w_omega u(x - eps omega).
GridFunction steklov(const GridFunction& u, const SmoothingSpec& spec);

}  // namespace lphom
