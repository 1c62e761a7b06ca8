#pragma once

#include <memory>
#include <vector>

#include "lphom/cell_solver.hpp"
#include "lphom/smoothing.hpp"

namespace lphom {

// Cell solutions resampled to the fine grid of one eps: for every fine node p
// (slow argument x_p) the whole cell field. The cell grid must coincide with
// one eps-cell of the fine grid (element scheme, n_y = n_f), so the fast
// argument x_p / eps of node p is cell node cell_node(p).
struct TwoScaleTable {
  int dim = 1;
  int eps_denominator = 8;
  int n_f = 16;
  TorusGrid fine;
  TorusGrid cell;
  ElementQuadrature quad;  // shared by the cell and fine grids
  std::vector<Eigen::MatrixXd> N, Nt;  // per j: cell nodes x fine nodes

  Index cell_node(Index p) const {
    auto c = fine.coords(p);
    return cell.index(c[0] % n_f, c[1] % n_f);
  }
};

TwoScaleTable make_two_scale_table(const CellSolutions& cells, int eps_denominator, SlowInterp interp);

// The omega-average of the fast-slow products in the smoothed correctors:
//   (Q G)(x_p) = sum_omega w_omega sum_j N^j(x_p - eps omega, x_p / eps) G_j(x_p - eps omega)
// with G given as d node fields (columns). adjoint = true uses the adjoint
// cell solutions. The transpose is the exact discrete adjoint:
//   (Q^T psi)_j(x_p) = sum_omega w_omega N^j(x_p, x_p / eps + omega) psi(x_p + eps omega).
class CorrectorQuadrature {
 public:
  CorrectorQuadrature(std::shared_ptr<const TwoScaleTable> table, const SmoothingSpec& spec, bool adjoint);
  Eigen::VectorXd apply(const Eigen::MatrixXd& grad) const;
  Eigen::MatrixXd apply_transpose(const Eigen::VectorXd& psi) const;

 private:
  std::shared_ptr<const TwoScaleTable> table_;
  SmoothingSpec spec_;
  bool adjoint_;
};

}  // namespace lphom
