#include "lphom/torus_grid.hpp"

#include <cmath>
#include <string>

namespace lphom {

TorusGrid::TorusGrid(int d, int points) : dim(d), n(points) {
  if (d != 1 && d != 2) throw ConfigError("TorusGrid: dimension must be 1 or 2");
  if (points < 2 || points % 2 != 0) throw ConfigError("TorusGrid: n must be even, got " + std::to_string(points));
}

Vec TorusGrid::node(Index k) const {
  auto c = coords(k);
  Vec x(dim);
  x[0] = c[0] * h();
  if (dim == 2) x[1] = c[1] * h();
  return x;
}

QuadRule default_rule(int dim) { return dim == 1 ? QuadRule::Midpoint : QuadRule::Gauss2; }

ElementQuadrature make_quadrature(int dim, QuadRule rule) {
  ElementQuadrature q;
  q.dim = dim;
  q.rule = rule;
  std::vector<double> pts1, w1;
  if (rule == QuadRule::Midpoint) {
    pts1 = {0.5};
    w1 = {1.0};
  } else {
    double s = 0.5 / std::sqrt(3.0);
    pts1 = {0.5 - s, 0.5 + s};
    w1 = {0.5, 0.5};
  }
  const int m = static_cast<int>(pts1.size());
  const int nq = dim == 1 ? m : m * m;
  for (int k = 0; k < nq; ++k) {
    Vec p(dim);
    p[0] = pts1[k % m];
    double w = w1[k % m];
    if (dim == 2) {
      p[1] = pts1[k / m];
      w *= w1[k / m];
    }
    q.points.push_back(p);
    q.weights.push_back(w);
  }
  const int nc = q.n_corners();
  q.phi.resize(nq, nc);
  for (auto& d : q.dphi) d = Eigen::MatrixXd::Zero(nq, nc);
  for (int k = 0; k < nq; ++k) {
    for (int c = 0; c < nc; ++c) {
      double val = 1.0;
      std::array<double, kMaxDim> f{}, df{};
      for (int a = 0; a < dim; ++a) {
        bool hi = (c >> a) & 1;
        f[a] = hi ? q.points[k][a] : 1.0 - q.points[k][a];
        df[a] = hi ? 1.0 : -1.0;
        val *= f[a];
      }
      q.phi(k, c) = val;
      for (int a = 0; a < dim; ++a) {
        double g = df[a];
        for (int b = 0; b < dim; ++b)
          if (b != a) g *= f[b];
        q.dphi[a](k, c) = g;
      }
    }
  }
  return q;
}

Vec quad_point(const TorusGrid& g, const ElementQuadrature& quad, Index e, int q) {
  auto c = g.coords(e);
  Vec x(g.dim);
  for (int a = 0; a < g.dim; ++a) x[a] = (c[a] + quad.points[q][a]) * g.h();
  return x;
}

std::vector<Vec> quad_points(const TorusGrid& g, const ElementQuadrature& quad) {
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(g.size()) * quad.n_points());
  for (Index e = 0; e < g.size(); ++e)
    for (int q = 0; q < quad.n_points(); ++q) out.push_back(quad_point(g, quad, e, q));
  return out;
}

SpMat assemble_diffusion(const TorusGrid& g, const ElementQuadrature& quad, const std::vector<Mat>& coef,
                         double shift) {
  const int nq = quad.n_points(), nc = quad.n_corners(), d = g.dim;
  if (static_cast<Index>(coef.size()) != g.size() * nq)
    throw ConfigError("assemble_diffusion: coefficient array does not match the grid");
  // Strong form: element stiffness scaled by 1/h^d (lumped mass h^d).
  // grad phi = dphi / h, weight W = h^d w, so the entry is w dphi_a dphi_b / h^2.
  const double scale = 1.0 / (g.h() * g.h());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(g.size()) * nc * nc + g.size());
  Eigen::MatrixXd ke(nc, nc);
  std::array<Index, 4> nodes{};
  for (Index e = 0; e < g.size(); ++e) {
    ke.setZero();
    for (int q = 0; q < nq; ++q) {
      const Mat& a = coef[static_cast<std::size_t>(e * nq + q)];
      const double w = quad.weights[q] * scale;
      for (int I = 0; I < nc; ++I) {
        for (int J = 0; J < nc; ++J) {
          double s = 0.0;
          for (int l = 0; l < d; ++l)
            for (int m = 0; m < d; ++m) s += quad.dphi[l](q, I) * a(l, m) * quad.dphi[m](q, J);
          ke(I, J) += w * s;
        }
      }
    }
    for (int c = 0; c < nc; ++c) nodes[c] = corner_node(g, e, c);
    for (int I = 0; I < nc; ++I)
      for (int J = 0; J < nc; ++J) trip.emplace_back(nodes[I], nodes[J], ke(I, J));
  }
  if (shift != 0.0)
    for (Index k = 0; k < g.size(); ++k) trip.emplace_back(k, k, shift);
  SpMat A(g.size(), g.size());
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

Eigen::MatrixXd quad_gradients(const TorusGrid& g, const ElementQuadrature& quad, const Eigen::VectorXd& u) {
  const int nq = quad.n_points(), nc = quad.n_corners(), d = g.dim;
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d, g.size() * nq);
  const double ih = 1.0 / g.h();
  std::array<double, 4> uc{};
  for (Index e = 0; e < g.size(); ++e) {
    for (int c = 0; c < nc; ++c) uc[c] = u[corner_node(g, e, c)];
    for (int q = 0; q < nq; ++q)
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int c = 0; c < nc; ++c) s += quad.dphi[a](q, c) * uc[c];
        out(a, e * nq + q) = s * ih;
      }
  }
  return out;
}

Eigen::VectorXd quad_values(const TorusGrid& g, const ElementQuadrature& quad, const Eigen::VectorXd& u) {
  const int nq = quad.n_points(), nc = quad.n_corners();
  Eigen::VectorXd out(g.size() * nq);
  for (Index e = 0; e < g.size(); ++e)
    for (int q = 0; q < nq; ++q) {
      double s = 0.0;
      for (int c = 0; c < nc; ++c) s += quad.phi(q, c) * u[corner_node(g, e, c)];
      out[e * nq + q] = s;
    }
  return out;
}

Eigen::VectorXd weak_flux_residual(const TorusGrid& g, const ElementQuadrature& quad, const Eigen::MatrixXd& flux) {
  const int nq = quad.n_points(), nc = quad.n_corners(), d = g.dim;
  const double vol = g.cell_volume(), ih = 1.0 / g.h();
  Eigen::VectorXd r = Eigen::VectorXd::Zero(g.size());
  for (Index e = 0; e < g.size(); ++e)
    for (int q = 0; q < nq; ++q) {
      const double w = quad.weights[q] * vol * ih;
      for (int c = 0; c < nc; ++c) {
        double s = 0.0;
        for (int a = 0; a < d; ++a) s += flux(a, e * nq + q) * quad.dphi[a](q, c);
        r[corner_node(g, e, c)] += w * s;
      }
    }
  return r;
}

double quad_mean(const ElementQuadrature& quad, const Eigen::VectorXd& values) {
  const int nq = quad.n_points();
  const Index ne = values.size() / nq;
  double s = 0.0;
  for (Index e = 0; e < ne; ++e)
    for (int q = 0; q < nq; ++q) s += quad.weights[q] * values[e * nq + q];
  return s / static_cast<double>(ne);
}

SpMat quad_gradient_matrix(const TorusGrid& g, const ElementQuadrature& quad, int axis) {
  const int nq = quad.n_points(), nc = quad.n_corners();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(g.size()) * nq * nc);
  for (Index e = 0; e < g.size(); ++e)
    for (int q = 0; q < nq; ++q)
      for (int c = 0; c < nc; ++c)
        trip.emplace_back(e * nq + q, corner_node(g, e, c), quad.dphi[axis](q, c) / g.h());
  SpMat B(g.size() * nq, g.size());
  B.setFromTriplets(trip.begin(), trip.end());
  B.makeCompressed();
  return B;
}

SpMat centered_difference(const TorusGrid& g, int axis) {
  std::vector<Eigen::Triplet<double>> trip;
  const double c = 0.5 / g.h();
  std::array<long, 2> plus{0, 0}, minus{0, 0};
  plus[axis] = 1;
  minus[axis] = -1;
  for (Index k = 0; k < g.size(); ++k) {
    trip.emplace_back(k, g.shifted(k, plus), c);
    trip.emplace_back(k, g.shifted(k, minus), -c);
  }
  SpMat D(g.size(), g.size());
  D.setFromTriplets(trip.begin(), trip.end());
  D.makeCompressed();
  return D;
}

}  // namespace lphom
