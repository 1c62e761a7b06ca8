#pragma once

#include <string>
#include <vector>

#include "lphom/cell_solver.hpp"

namespace lphom {

// Effective matrix a0 on the slow grid, with interpolation to any x.
struct HomogenizedField {
  int dim = 1;
  bool adjoint = false;  // built from the transposed field and adjoint cell solutions
  TorusGrid slow;
  SlowInterp interp = SlowInterp::Trig;
  std::vector<Mat> a0;  // per slow sample

  double min_ellipticity = 0.0;     // min over samples of lambda_min(sym a0)
  double lipschitz_quotient = 0.0;  // max |a0(x_i) - a0(x_i')|_2 / |x_i - x_i'| over adjacent samples

  Mat at(const Vec& x) const;
  // a0 at every point of a tensor grid given by 1D coordinates (index t0 + m*t1).
  std::vector<Mat> on_tensor(const std::vector<double>& coords) const;
  HomogenizedField transposed() const;
};

// a0(x_i) e^j = <a(x_i, .)(e^j + grad_y N^j)> by the cell quadrature. With
// adjoint = true the transposed field and the adjoint cell solutions are used.
// Throws ValidationError when a0 fails the field's ellipticity bound.
HomogenizedField effective_matrix(const CellSolutions& cells, const CoefficientField& field, bool adjoint = false,
                                  SlowInterp interp = SlowInterp::Trig);

void write_effective_csv(const HomogenizedField& hom, const std::string& path);

// Flux corrector g^j = a(e^j + grad N^j) - a0 e^j and its skew potential G^j.
// Index conventions per slow sample:
//  g    (d*d) x points        row j*d + m         = g^j_m
//  G    (d*d*d) x nodes       row (j*d + i)*d + k = G^j_ik
//  dxG  (d*d*d*d) x nodes     row ((j*d + i)*d + k)*d + l = d G^j_ik / d x_l
struct FluxCorrector {
  int dim = 1;
  bool adjoint = false;
  bool has_potential = false;
  std::vector<Eigen::MatrixXd> g, G, dxG;

  double max_mean = 0.0;              // max |<g^j_m>|
  double max_divergence = 0.0;        // max |div g^j| / |div(a e^j)| (relative cell residual)
  double max_potential_defect = 0.0;  // max |div G^j - g^j|_L2
  double potential_ratio = 0.0;       // max |G^j|_H1 / |g^j|_L2
};

FluxCorrector flux_corrector(const CellSolutions& cells, const CoefficientField& field,
                             const HomogenizedField& hom, double tol = 1e-10);

// Fills G and dxG via Poisson potentials: laplace Phi^j_k = -g^j_k,
// G^j_ik = d_i Phi^j_k - d_k Phi^j_i, so that (div G^j)_i = sum_k d_k G^j_ik = g^j_i.
// Needs a spectral cell table in 2D; in 1D G is the zero 1x1 matrix.
void vector_potential(FluxCorrector& fc, const CellSolutions& cells, double tol = 1e-8);

// (div G^j)_i at the cell nodes, rows j*d + i (spectral tables only).
Eigen::MatrixXd potential_divergence(const FluxCorrector& fc, const CellSolutions& cells, Index sample);

}  // namespace lphom
