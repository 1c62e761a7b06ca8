#pragma once

#include <memory>
#include <vector>

#include "lphom/discrete_operator.hpp"
#include "lphom/fine_assembly.hpp"
#include "lphom/homogenize.hpp"
#include "lphom/two_scale.hpp"

namespace lphom {

// Slow coefficient tensors of the third- and second-order correcting
// operators, one row per slow sample. Column layouts:
//  c3   (j*d + k)*d + m : c^{jk}_m  = <g^j_m Nt^k>
//  c3t  (k*d + j)*d + m : ct^{kj}_m = <gt^k_m N^j>
//  c2   j*d + k         : c^{jk}    = <g^j . grad_x Nt^k>
//  c2t  k*d + j         : ct^{kj}   = <gt^k . grad_x N^j>
// c3_alt / c3t_alt hold the same tensors from the flux-free form
// <Nt^k a (grad N^j + e^j)> . e^m (and its adjoint counterpart).
struct CorrectorCoeffs {
  int dim = 1;
  TorusGrid slow;
  Eigen::MatrixXd c3, c3t, c2, c2t, c3_alt, c3t_alt;
  double max_form_defect = 0.0;  // max relative difference between the two forms

  double max_abs() const;
};

// fc: flux corrector of the field; fct: flux corrector built from the
// adjoint (transposed) problem.
CorrectorCoeffs corrector_coeffs(const CellSolutions& cells, const FluxCorrector& fc, const FluxCorrector& fct,
                                 const CoefficientField& field, const HomogenizedField& hom);

// Coefficient tensors interpolated to the fine nodes (same column layouts).
struct FineCoeffs {
  Eigen::MatrixXd c3, c3t, c2, c2t;
};
FineCoeffs interpolate_coeffs(const CorrectorCoeffs& coeffs, const TorusGrid& fine, SlowInterp interp);

// Sparse L3, L2, Lt3, Lt2 on the fine grid with centered differences D_j:
//  L3 = sum D_k D_m c^{jk}_m D_j,   Lt3 = sum D_j D_m ct^{kj}_m D_k,
//  L2 = sum D_k c^{jk} D_j,         Lt2 = sum D_j ct^{kj} D_k.
struct SlowOperators {
  SpMat L3, L2, Lt3, Lt2;
  // L3 - L2 + (Lt3 - Lt2)^T
  SpMat combined() const;
};
SlowOperators assemble_slow_operators(const FineCoeffs& c, const TorusGrid& fine, int dim);

// Double-averaged matrix at every fine quadrature point, hat[q](j, k) = chat^{jk}:
//   sum_omega w (grad_y Nt^k + e^k) . [sum_t w_t sum_l omega_l d_l a(x + t eps omega, y + omega)] (grad_y N^j + e^j)
// with y = x / eps. N at the quadrature point's slow argument is the
// multilinear interpolant of the element's corner rows of the two-scale table.
std::vector<Mat> double_averaged_matrix(const CoefficientField& field, const TwoScaleTable& table,
                                        const SmoothingSpec& spec);

// Strong-form M_eps = -div C grad with C_{kj} = chat^{jk}.
SpMat assemble_M_matrix(const std::vector<Mat>& chat, const TorusGrid& fine);

// Operators of the resolvent approximation for one eps.
DiscreteOperator gradient_operator(const TorusGrid& fine);  // n -> d*n (stacked centered differences)
DiscreteOperator corrector_K(const CorrectorQuadrature& q, const Resolvent& hom_solver, const TorusGrid& fine);
DiscreteOperator corrector_Ktilde(const CorrectorQuadrature& qt, const Resolvent& hom_solver,
                                  const TorusGrid& fine);
DiscreteOperator assemble_L(const SlowOperators& ops, const Resolvent& hom_solver);
DiscreteOperator assemble_M(const SpMat& M, const Resolvent& hom_solver);
// K + Kt^* - L - M.
DiscreteOperator full_corrector(const DiscreteOperator& K, const DiscreteOperator& Ktilde_adjoint,
                                const DiscreteOperator& L, const DiscreteOperator& M);

// Pointwise forms on grid functions.
GridFunction apply_corrector(const CorrectorQuadrature& q, const GridFunction& u_hom);

}  // namespace lphom
