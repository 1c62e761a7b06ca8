#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lphom/coefficient.hpp"
#include "lphom/config.hpp"
#include "lphom/torus_grid.hpp"

namespace lphom {

class SpectralGrid;

// Solution of one cell problem with its y-gradient at the cell points.
struct CellField {
  Eigen::VectorXd values;    // nodal, zero mean
  Eigen::MatrixXd gradient;  // d rows, one column per cell point
  double residual = 0.0;     // relative residual of the discrete cell equation
  int iterations = 0;
};

// Discretization of periodic problems on the unit cell.
//  Spectral: Fourier collocation; cell points are the nodes.
//  Element:  multilinear elements; cell points are element quadrature points.
// Holds FFT scratch space: one instance per thread.
class CellDiscretization {
 public:
  CellDiscretization(CellScheme scheme, const TorusGrid& grid, QuadRule rule);
  ~CellDiscretization();
  CellDiscretization(CellDiscretization&&) noexcept;

  CellScheme scheme() const { return scheme_; }
  const TorusGrid& grid() const { return grid_; }
  const ElementQuadrature& quadrature() const { return quad_; }
  const std::vector<Vec>& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }  // sum to 1
  Index n_points() const { return static_cast<Index>(points_.size()); }

  Eigen::MatrixXd gradient(const Eigen::VectorXd& nodal);
  Eigen::VectorXd values_at_points(const Eigen::VectorXd& nodal) const;
  double mean_at_points(const Eigen::VectorXd& point_values) const { return weights_.dot(point_values); }

  // Solves div_y[a (e^j + grad N^j)] = 0, <N^j> = 0 for every j, with a given
  // at every cell point. Throws SolverError on nonconvergence.
  std::vector<CellField> solve(const std::vector<Mat>& a_at_points, double tol, int max_iter);

  // Relative residual of the discrete cell equation for direction j.
  double residual(const std::vector<Mat>& a_at_points, int j, const Eigen::VectorXd& N);

  // Discrete divergence of a flux given at the cell points (strong form):
  // spectral collocation or weak element residual divided by the cell volume.
  Eigen::VectorXd divergence(const Eigen::MatrixXd& flux_at_points);

 private:
  CellScheme scheme_;
  TorusGrid grid_;
  ElementQuadrature quad_;
  std::vector<Vec> points_;
  Eigen::VectorXd weights_;
  std::unique_ptr<SpectralGrid> spectral_;
};

CellScheme resolve_scheme(CellScheme requested, const CoefficientField& field);

// Single-direction entry points. j is zero-based.
CellField solve_cell(const CoefficientField& field, const Vec& x, int j, CellDiscretization& disc, double tol,
                     int max_iter = 2000);
CellField solve_adjoint_cell(const CoefficientField& field, const Vec& x, int j, CellDiscretization& disc,
                             double tol, int max_iter = 2000);

// Coefficient at every cell point for slow argument x.
std::vector<Mat> coefficient_at_points(const CoefficientField& field, const Vec& x, const std::vector<Vec>& pts,
                                       bool transpose = false);

// Cell data for one slow sample. Index conventions:
//  N, Nt        nodes x d            column j = N^j
//  gradN, gradNt (d*d) x points      row j*d + m = d N^j / d y_m
//  dxN, dxNt    nodes x (d*d)        column j*d + l = d N^j / d x_l
struct CellSample {
  Eigen::MatrixXd N, Nt, gradN, gradNt, dxN, dxNt;
  double residual = 0.0;  // max over j of primal and adjoint residuals
};

struct CellTableSpec {
  TorusGrid slow{1, 16};
  TorusGrid cell{1, 32};
  CellScheme scheme = CellScheme::Auto;
  QuadRule rule = QuadRule::Midpoint;
  SlowDerivative slow_derivative = SlowDerivative::Central;
  double tol = 1e-10;
  int max_iter = 2000;
  int jobs = 1;
};

struct CellSolutions {
  int dim = 1;
  CellScheme scheme = CellScheme::Spectral;
  QuadRule rule = QuadRule::Midpoint;
  SlowDerivative slow_derivative = SlowDerivative::Central;
  TorusGrid slow;
  TorusGrid cell;
  std::vector<CellSample> samples;  // slow node order

  // Diagnostics filled by build_cell_table.
  double max_residual = 0.0;
  double max_mean = 0.0;            // max |<N^j>|, |<Nt^j>|
  double max_gradient_norm = 0.0;   // max L2 norm of grad_y N^j over samples
  double lipschitz_quotient = 0.0;  // max |N(x_i) - N(x_i')|_H1 / |x_i - x_i'| over adjacent samples

  Vec slow_point(Index i) const { return slow.node(i); }
  Index size() const { return static_cast<Index>(samples.size()); }
};

// Cell solutions, adjoint cell solutions and slow derivatives on a slow grid.
// Samples are computed by `jobs` workers; results do not depend on jobs.
CellSolutions build_cell_table(const CoefficientField& field, const CellTableSpec& spec);

// Recomputes the slow derivatives dxN, dxNt from N, Nt over the slow grid.
void compute_slow_derivatives(CellSolutions& cells);

// Binary container; layout documented in docs/formats.md.
void save_cell_table(const CellSolutions& cells, const std::string& path);
CellSolutions load_cell_table(const std::string& path);

}  // namespace lphom
