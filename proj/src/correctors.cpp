#include "lphom/correctors.hpp"

#include <cmath>
#include <sstream>

#include "lphom/slow_grid.hpp"

namespace lphom {

double CorrectorCoeffs::max_abs() const {
  double m = 0.0;
  for (const Eigen::MatrixXd* c : {&c3, &c3t, &c2, &c2t})
    if (c->size() > 0) m = std::max(m, c->cwiseAbs().maxCoeff());
  return m;
}

namespace {

// Difference of the two forms of the third-order tensors relative to the
// larger of the tensors and the integrand scale |a0| |Nt|_L2.
double relative_defect(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double integrand_scale) {
  double scale = std::max({a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff(), integrand_scale});
  if (scale == 0.0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace

CorrectorCoeffs corrector_coeffs(const CellSolutions& cells, const FluxCorrector& fc, const FluxCorrector& fct,
                                 const CoefficientField& field, const HomogenizedField& hom) {
  const int d = cells.dim;
  if (fc.adjoint || !fct.adjoint) throw ConfigError("corrector_coeffs: needs the primal and the adjoint flux correctors");
  if (fc.g.size() != cells.samples.size() || fct.g.size() != cells.samples.size())
    throw ConfigError("corrector_coeffs: flux correctors do not match the cell table");
  if (hom.slow != cells.slow) throw ConfigError("corrector_coeffs: homogenized field does not match the cell table");
  for (const CellSample& cs : cells.samples)
    if (cs.Nt.cols() != d || cs.dxNt.cols() != d * d)
      throw ConfigError("corrector_coeffs: cell table lacks adjoint solutions or slow derivatives");

  CellDiscretization disc(cells.scheme, cells.cell, cells.rule);
  const Eigen::VectorXd& w = disc.weights();
  const Index ns = cells.size();
  const Index np = disc.n_points();
  CorrectorCoeffs out;
  out.dim = d;
  out.slow = cells.slow;
  out.c3.setZero(ns, d * d * d);
  out.c3t.setZero(ns, d * d * d);
  out.c3_alt.setZero(ns, d * d * d);
  out.c3t_alt.setZero(ns, d * d * d);
  out.c2.setZero(ns, d * d);
  out.c2t.setZero(ns, d * d);

  double integrand_scale = 0.0;
  for (Index s = 0; s < ns; ++s) {
    const CellSample& cs = cells.samples[static_cast<std::size_t>(s)];
    const Eigen::MatrixXd& g = fc.g[static_cast<std::size_t>(s)];
    const Eigen::MatrixXd& gt = fct.g[static_cast<std::size_t>(s)];
    auto a = coefficient_at_points(field, cells.slow_point(s), disc.points(), false);
    std::vector<Eigen::VectorXd> N(d), Nt(d);
    std::vector<Eigen::VectorXd> dxN(d * d), dxNt(d * d);
    for (int j = 0; j < d; ++j) {
      N[j] = disc.values_at_points(cs.N.col(j));
      Nt[j] = disc.values_at_points(cs.Nt.col(j));
      integrand_scale = std::max(integrand_scale, hom.a0[static_cast<std::size_t>(s)].norm() *
                                                      std::sqrt(w.dot(Nt[j].cwiseAbs2())));
      for (int l = 0; l < d; ++l) {
        dxN[j * d + l] = disc.values_at_points(cs.dxN.col(j * d + l));
        dxNt[j * d + l] = disc.values_at_points(cs.dxNt.col(j * d + l));
      }
    }
    // Fluxes a(grad N^j + e^j) and a^T(grad Nt^k + e^k) taken straight from the field.
    std::vector<Eigen::MatrixXd> flux(d, Eigen::MatrixXd(d, np)), flux_t(d, Eigen::MatrixXd(d, np));
    for (int j = 0; j < d; ++j)
      for (Index q = 0; q < np; ++q) {
        Vec e = cs.gradN.block(j * d, q, d, 1);
        e[j] += 1.0;
        flux[j].col(q) = a[static_cast<std::size_t>(q)] * e;
        Vec et = cs.gradNt.block(j * d, q, d, 1);
        et[j] += 1.0;
        flux_t[j].col(q) = a[static_cast<std::size_t>(q)].transpose() * et;
      }
    for (int j = 0; j < d; ++j)
      for (int k = 0; k < d; ++k) {
        double s2 = 0.0, s2t = 0.0;
        for (int m = 0; m < d; ++m) {
          Eigen::VectorXd gm = g.row(j * d + m).transpose();
          Eigen::VectorXd gtm = gt.row(k * d + m).transpose();
          out.c3(s, (j * d + k) * d + m) = w.dot(gm.cwiseProduct(Nt[k]));
          out.c3t(s, (k * d + j) * d + m) = w.dot(gtm.cwiseProduct(N[j]));
          out.c3_alt(s, (j * d + k) * d + m) = w.dot(flux[j].row(m).transpose().cwiseProduct(Nt[k]));
          out.c3t_alt(s, (k * d + j) * d + m) = w.dot(flux_t[k].row(m).transpose().cwiseProduct(N[j]));
          s2 += w.dot(gm.cwiseProduct(dxNt[k * d + m]));
          s2t += w.dot(gtm.cwiseProduct(dxN[j * d + m]));
        }
        out.c2(s, j * d + k) = s2;
        out.c2t(s, k * d + j) = s2t;
      }
  }
  out.max_form_defect = std::max(relative_defect(out.c3, out.c3_alt, integrand_scale),
                                 relative_defect(out.c3t, out.c3t_alt, integrand_scale));
  return out;
}

FineCoeffs interpolate_coeffs(const CorrectorCoeffs& coeffs, const TorusGrid& fine, SlowInterp interp) {
  if (fine.dim != coeffs.dim) throw ConfigError("interpolate_coeffs: grid dimension mismatch");
  SlowInterpolator op(coeffs.slow, node_coordinates(fine), interp);
  FineCoeffs f;
  f.c3 = op.apply(coeffs.c3);
  f.c3t = op.apply(coeffs.c3t);
  f.c2 = op.apply(coeffs.c2);
  f.c2t = op.apply(coeffs.c2t);
  return f;
}

namespace {

SpMat diagonal(const Eigen::VectorXd& v) {
  SpMat D(v.size(), v.size());
  D.reserve(Eigen::VectorXi::Constant(v.size(), 1));
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) D.insert(i, i) = v[i];
  D.makeCompressed();
  return D;
}

}  // namespace

SpMat SlowOperators::combined() const {
  SpMat t = Lt3 - Lt2;
  SpMat tt = t.transpose();
  SpMat out = L3 - L2 + tt;
  out.makeCompressed();
  return out;
}

SlowOperators assemble_slow_operators(const FineCoeffs& c, const TorusGrid& fine, int dim) {
  const int d = dim;
  const Index n = fine.size();
  if (c.c3.rows() != n || c.c2.rows() != n) throw ConfigError("assemble_slow_operators: grid mismatch");
  std::vector<SpMat> D(d);
  for (int a = 0; a < d; ++a) D[a] = centered_difference(fine, a);
  SlowOperators ops;
  ops.L3.resize(n, n);
  ops.L2.resize(n, n);
  ops.Lt3.resize(n, n);
  ops.Lt2.resize(n, n);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      // L3: D_k D_m c^{jk}_m D_j.  Lt3: D_j D_m ct^{kj}_m D_k.
      for (int m = 0; m < d; ++m) {
        SpMat dm = D[k] * D[m];
        ops.L3 += SpMat(dm * diagonal(c.c3.col((j * d + k) * d + m)) * D[j]);
        SpMat dmt = D[j] * D[m];
        ops.Lt3 += SpMat(dmt * diagonal(c.c3t.col((k * d + j) * d + m)) * D[k]);
      }
      ops.L2 += SpMat(D[k] * diagonal(c.c2.col(j * d + k)) * D[j]);
      ops.Lt2 += SpMat(D[j] * diagonal(c.c2t.col(k * d + j)) * D[k]);
    }
  for (SpMat* m : {&ops.L3, &ops.L2, &ops.Lt3, &ops.Lt2}) {
    m->prune(0.0);
    m->makeCompressed();
  }
  return ops;
}

std::vector<Mat> double_averaged_matrix(const CoefficientField& field, const TwoScaleTable& table,
                                        const SmoothingSpec& spec) {
  if (!field.grad_x) throw ConfigError("double_averaged_matrix: the field has no slow gradient");
  if (spec.n_f != table.n_f || spec.eps_denominator != table.eps_denominator || spec.dim != table.dim)
    throw ConfigError("double_averaged_matrix: smoothing spec does not match the two-scale table");
  const int d = table.dim;
  const TorusGrid& fine = table.fine;
  const TorusGrid& cell = table.cell;
  const ElementQuadrature& quad = table.quad;
  const int nq = quad.n_points(), nc = quad.n_corners();
  const double eps = spec.eps();
  const double ih_cell = static_cast<double>(cell.n);
  std::vector<Mat> out(static_cast<std::size_t>(fine.size() * nq), Mat::Zero(d, d));

  std::array<Index, 4> slow_nodes{}, cell_nodes{};
  std::vector<Vec> gN(d), gNt(d);
  for (Index e = 0; e < fine.size(); ++e) {
    for (int c = 0; c < nc; ++c) slow_nodes[c] = corner_node(fine, e, c);
    auto ec = fine.coords(e);
    const Index cell_elem = cell.index(ec[0] % table.n_f, ec[1] % table.n_f);
    for (int q = 0; q < nq; ++q) {
      Vec x = quad_point(fine, quad, e, q);
      Vec y(d);
      for (int a = 0; a < d; ++a) y[a] = ((ec[a] % table.n_f) + quad.points[q][a]) / table.n_f;
      Mat acc = Mat::Zero(d, d);
      for (std::size_t w = 0; w < spec.size(); ++w) {
        const Vec& om = spec.omega[w];
        // y + omega lies in the cell element shifted by the omega offset.
        const Index ce = cell.shifted(cell_elem, spec.offsets[w]);
        for (int c = 0; c < nc; ++c) cell_nodes[c] = corner_node(cell, ce, c);
        for (int j = 0; j < d; ++j) {
          gN[j] = Vec::Zero(d);
          gNt[j] = Vec::Zero(d);
          gN[j][j] = 1.0;
          gNt[j][j] = 1.0;
          for (int cs = 0; cs < nc; ++cs) {
            const double ps = quad.phi(q, cs);
            const Index sn = slow_nodes[cs];
            for (int cc = 0; cc < nc; ++cc) {
              const double vn = table.N[j](cell_nodes[cc], sn);
              const double vt = table.Nt[j](cell_nodes[cc], sn);
              for (int a = 0; a < d; ++a) {
                const double dp = ps * quad.dphi[a](q, cc) * ih_cell;
                gN[j][a] += dp * vn;
                gNt[j][a] += dp * vt;
              }
            }
          }
        }
        Vec yw = y + om;
        Mat B = Mat::Zero(d, d);
        for (std::size_t t = 0; t < spec.t_nodes.size(); ++t) {
          Vec xt = x + (spec.t_nodes[t] * eps) * om;
          auto ga = field.grad_x(xt, yw);
          for (int l = 0; l < d; ++l) B += (spec.t_weights[t] * om[l]) * ga[l];
        }
        for (int j = 0; j < d; ++j) {
          Vec Bj = B * gN[j];
          for (int k = 0; k < d; ++k) acc(j, k) += spec.weights[w] * gNt[k].dot(Bj);
        }
      }
      out[static_cast<std::size_t>(e * nq + q)] = acc;
    }
  }
  return out;
}

SpMat assemble_M_matrix(const std::vector<Mat>& chat, const TorusGrid& fine) {
  ElementQuadrature quad = make_quadrature(fine.dim, default_rule(fine.dim));
  std::vector<Mat> C(chat.size());
  for (std::size_t i = 0; i < chat.size(); ++i) C[i] = chat[i].transpose();
  return assemble_diffusion(fine, quad, C, 0.0);
}

DiscreteOperator gradient_operator(const TorusGrid& fine) {
  const int d = fine.dim;
  const Index n = fine.size();
  auto D = std::make_shared<std::vector<SpMat>>();
  for (int a = 0; a < d; ++a) D->push_back(centered_difference(fine, a));
  return DiscreteOperator(
      d * n, n,
      [D, n, d](const Eigen::VectorXd& u) {
        Eigen::VectorXd out(d * n);
        for (int a = 0; a < d; ++a) out.segment(a * n, n) = (*D)[a] * u;
        return out;
      },
      [D, n, d](const Eigen::VectorXd& v) {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
        for (int a = 0; a < d; ++a) out += (*D)[a].transpose() * v.segment(a * n, n);
        return out;
      },
      "grad");
}

namespace {

// Q applied to a stacked gradient, as an operator d*n -> n.
DiscreteOperator quadrature_operator(const CorrectorQuadrature& q, const TorusGrid& fine, std::string name) {
  const int d = fine.dim;
  const Index n = fine.size();
  auto qq = std::make_shared<CorrectorQuadrature>(q);
  return DiscreteOperator(
      n, d * n,
      [qq, n, d](const Eigen::VectorXd& v) {
        Eigen::MatrixXd g(n, d);
        for (int a = 0; a < d; ++a) g.col(a) = v.segment(a * n, n);
        return qq->apply(g);
      },
      [qq, n, d](const Eigen::VectorXd& psi) {
        Eigen::MatrixXd g = qq->apply_transpose(psi);
        Eigen::VectorXd out(d * n);
        for (int a = 0; a < d; ++a) out.segment(a * n, n) = g.col(a);
        return out;
      },
      std::move(name));
}

void require_size(const DiscreteOperator& op, Index n, const char* what) {
  if (op.rows() != n || op.cols() != n) {
    std::ostringstream os;
    os << what << ": operator size " << op.rows() << "x" << op.cols() << " does not match the grid (" << n << ")";
    throw ConfigError(os.str());
  }
}

}  // namespace

DiscreteOperator corrector_K(const CorrectorQuadrature& q, const Resolvent& hom_solver, const TorusGrid& fine) {
  DiscreteOperator R0 = hom_solver.op();
  require_size(R0, fine.size(), "corrector_K");
  return (quadrature_operator(q, fine, "Q_N") * gradient_operator(fine) * R0).named("K");
}

// Kt = Q_Nt D R0^T. Its transpose Kt^* = R0 D^T Q_Nt^T acts as
// Kt^* f = R0(-div w) with w_k(x) = sum_omega w_omega Nt^k(x, x/eps + omega) f(x + eps omega).
DiscreteOperator corrector_Ktilde(const CorrectorQuadrature& qt, const Resolvent& hom_solver,
                                  const TorusGrid& fine) {
  DiscreteOperator R0 = hom_solver.op();
  require_size(R0, fine.size(), "corrector_Ktilde");
  return (quadrature_operator(qt, fine, "Q_Nt") * gradient_operator(fine) * R0.transpose()).named("Kt");
}

DiscreteOperator assemble_L(const SlowOperators& ops, const Resolvent& hom_solver) {
  DiscreteOperator R0 = hom_solver.op();
  require_size(R0, ops.L3.rows(), "assemble_L");
  return (R0 * DiscreteOperator::from_matrix(ops.combined(), "L3-L2+(Lt3-Lt2)^T") * R0).named("L");
}

DiscreteOperator assemble_M(const SpMat& M, const Resolvent& hom_solver) {
  DiscreteOperator R0 = hom_solver.op();
  require_size(R0, M.rows(), "assemble_M");
  return (R0 * DiscreteOperator::from_matrix(M, "M_eps") * R0).named("M");
}

DiscreteOperator full_corrector(const DiscreteOperator& K, const DiscreteOperator& Ktilde_adjoint,
                                const DiscreteOperator& L, const DiscreteOperator& M) {
  const Index n = K.rows();
  require_size(K, n, "full_corrector");
  require_size(Ktilde_adjoint, n, "full_corrector");
  require_size(L, n, "full_corrector");
  require_size(M, n, "full_corrector");
  return (K + Ktilde_adjoint - L - M).named("C");
}

GridFunction apply_corrector(const CorrectorQuadrature& q, const GridFunction& u_hom) {
  const TorusGrid& g = u_hom.grid;
  Eigen::MatrixXd grad(g.size(), g.dim);
  for (int a = 0; a < g.dim; ++a) grad.col(a) = centered_difference(g, a) * u_hom.values;
  return GridFunction(g, q.apply(grad));
}

}  // namespace lphom
