#pragma once

#include <Eigen/Sparse>
#include <array>
#include <vector>

#include "lphom/types.hpp"

namespace lphom {

using Index = Eigen::Index;
using SpMat = Eigen::SparseMatrix<double>;

// Uniform periodic grid on the unit torus [0,1)^d, node k at k/n.
// Nodes are numbered i0 + n*i1 (axis 0 fastest).
struct TorusGrid {
  int dim = 1;
  int n = 8;

  TorusGrid() = default;
  TorusGrid(int dim, int n);

  double h() const { return 1.0 / n; }
  double cell_volume() const { return dim == 1 ? h() : h() * h(); }
  Index size() const { return dim == 1 ? n : static_cast<Index>(n) * n; }
  int wrap(long i) const { return static_cast<int>(((i % n) + n) % n); }
  Index index(long i0, long i1 = 0) const { return dim == 1 ? wrap(i0) : wrap(i0) + static_cast<Index>(n) * wrap(i1); }
  std::array<int, 2> coords(Index k) const {
    return {static_cast<int>(k % n), dim == 1 ? 0 : static_cast<int>(k / n)};
  }
  Vec node(Index k) const;
  // Node displaced by integer offsets per axis.
  Index shifted(Index k, const std::array<long, 2>& off) const {
    auto c = coords(k);
    return index(c[0] + off[0], c[1] + off[1]);
  }
  bool operator==(const TorusGrid& o) const { return dim == o.dim && n == o.n; }
  bool operator!=(const TorusGrid& o) const { return !(*this == o); }
};

enum class QuadRule { Midpoint, Gauss2 };

// Tensor quadrature on the reference element [0,1]^d with the values and
// reference gradients of the 2^d multilinear corner functions. Corner c has
// offset bit a along axis a.
struct ElementQuadrature {
  int dim = 1;
  QuadRule rule = QuadRule::Midpoint;
  std::vector<Vec> points;
  std::vector<double> weights;  // sum to 1
  Eigen::MatrixXd phi;                     // points x corners
  std::array<Eigen::MatrixXd, kMaxDim> dphi;  // per axis, points x corners

  int n_corners() const { return 1 << dim; }
  int n_points() const { return static_cast<int>(points.size()); }
};

ElementQuadrature make_quadrature(int dim, QuadRule rule);
// Midpoint in 1D (face-midpoint sampling), 2x2 Gauss in 2D.
QuadRule default_rule(int dim);

// Node of corner c of element e (element e has node e as its lower corner).
inline Index corner_node(const TorusGrid& g, Index e, int c) {
  auto ij = g.coords(e);
  return g.index(ij[0] + (c & 1), ij[1] + ((c >> 1) & 1));
}

// Physical coordinates of quadrature point q in element e (not wrapped).
Vec quad_point(const TorusGrid& g, const ElementQuadrature& quad, Index e, int q);

// All quadrature points in element-major order: index e*nq + q.
std::vector<Vec> quad_points(const TorusGrid& g, const ElementQuadrature& quad);

// Strong-form nodal operator of -div(c grad) with multilinear elements and
// lumped mass, plus shift * I. `coef` holds c at every quadrature point.
SpMat assemble_diffusion(const TorusGrid& g, const ElementQuadrature& quad, const std::vector<Mat>& coef,
                         double shift = 0.0);

// Gradient of the multilinear interpolant at every quadrature point: d rows.
Eigen::MatrixXd quad_gradients(const TorusGrid& g, const ElementQuadrature& quad, const Eigen::VectorXd& u);
// Multilinear interpolant at every quadrature point.
Eigen::VectorXd quad_values(const TorusGrid& g, const ElementQuadrature& quad, const Eigen::VectorXd& u);
// Weak divergence test: r_I = sum_q W_q flux_q . grad phi_I (flux has d rows).
Eigen::VectorXd weak_flux_residual(const TorusGrid& g, const ElementQuadrature& quad, const Eigen::MatrixXd& flux);
// Quadrature mean of per-point values.
double quad_mean(const ElementQuadrature& quad, const Eigen::VectorXd& values);

// Sparse gradient-at-quadrature matrix for one axis: (elements*nq) x nodes.
SpMat quad_gradient_matrix(const TorusGrid& g, const ElementQuadrature& quad, int axis);

// Periodic centered difference (u_{i+1} - u_{i-1}) / 2h along one axis.
SpMat centered_difference(const TorusGrid& g, int axis);

}  // namespace lphom
