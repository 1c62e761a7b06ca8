#pragma once

#include <memory>
#include <string>

#include "lphom/coefficient.hpp"
#include "lphom/discrete_operator.hpp"
#include "lphom/grid_function.hpp"
#include "lphom/homogenize.hpp"

namespace lphom {

// Fine grid for eps = 1/k with n_f points per eps-cell: n = k * n_f per period.
TorusGrid fine_grid(int dim, int eps_denominator, int n_f);

// Checks that `grid` resolves eps = 1/k with at least 8 points per cell and
// returns the points per cell.
int points_per_cell(const TorusGrid& grid, int eps_denominator);

// Discrete A_eps + 1 (strong form, lumped mass): multilinear elements with
// a(x_q, x_q / eps) at the quadrature points; in 1D the midpoint rule, which
// is the face-midpoint finite-volume scheme. transpose = true uses a^T.
SpMat assemble_fine(const CoefficientField& field, int eps_denominator, const TorusGrid& grid,
                    bool transpose = false);

// Discrete A_0 + 1 with a0 interpolated to the quadrature points.
SpMat assemble_homogenized(const HomogenizedField& hom, const TorusGrid& grid);

// Fast-variable coordinate of each quadrature point of the fine grid, taken
// exactly from the cell grid: ((e mod n_f) + xi) / n_f.
std::vector<Vec> fast_quad_points(const TorusGrid& grid, int n_f, const ElementQuadrature& quad);

// Factorized operator with solve and transpose solve.
class Resolvent {
 public:
  Resolvent(const SpMat& a_plus_one, std::string name);
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;
  Eigen::VectorXd solve_transpose(const Eigen::VectorXd& rhs) const;
  DiscreteOperator op() const;
  const SpMat& matrix() const { return *matrix_; }

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
  std::shared_ptr<const SpMat> matrix_;
  std::string name_;
};

struct SolveResult {
  GridFunction u;
  double relative_residual = 0.0;
  double energy_ratio = 0.0;  // |u|_H1 / |f|_L2
};

// Direct sparse LU solve (valid for nonsymmetric systems). Throws
// SolverError when the residual exceeds tol.
SolveResult solve(const SpMat& op, const GridFunction& rhs, double tol);

}  // namespace lphom
