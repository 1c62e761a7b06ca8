#include "lphom/homogenize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lphom/slow_grid.hpp"
#include "lphom/spectral.hpp"

namespace lphom {

Mat HomogenizedField::at(const Vec& x) const {
  Eigen::MatrixXd w0 = periodic_interp_matrix(slow.n, {x[0]}, interp);
  Mat out = Mat::Zero(dim, dim);
  if (dim == 1) {
    for (int i = 0; i < slow.n; ++i) out += w0(0, i) * a0[static_cast<std::size_t>(i)];
    return out;
  }
  Eigen::MatrixXd w1 = periodic_interp_matrix(slow.n, {x[1]}, interp);
  for (int i1 = 0; i1 < slow.n; ++i1) {
    if (w1(0, i1) == 0.0) continue;
    for (int i0 = 0; i0 < slow.n; ++i0)
      out += (w0(0, i0) * w1(0, i1)) * a0[static_cast<std::size_t>(slow.index(i0, i1))];
  }
  return out;
}

std::vector<Mat> HomogenizedField::on_tensor(const std::vector<double>& coords) const {
  const Index ns = slow.size();
  Eigen::MatrixXd values(ns, dim * dim);
  for (Index s = 0; s < ns; ++s)
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) values(s, r * dim + c) = a0[static_cast<std::size_t>(s)](r, c);
  SlowInterpolator interp_op(slow, coords, interp);
  Eigen::MatrixXd out = interp_op.apply(values);
  std::vector<Mat> result(static_cast<std::size_t>(out.rows()), Mat::Zero(dim, dim));
  for (Index t = 0; t < out.rows(); ++t)
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) result[static_cast<std::size_t>(t)](r, c) = out(t, r * dim + c);
  return result;
}

HomogenizedField HomogenizedField::transposed() const {
  HomogenizedField t = *this;
  t.adjoint = !adjoint;
  for (Mat& m : t.a0) m.transposeInPlace();
  return t;
}

HomogenizedField effective_matrix(const CellSolutions& cells, const CoefficientField& field, bool adjoint,
                                  SlowInterp interp) {
  if (cells.dim != field.dim) throw ConfigError("effective_matrix: cell table does not match the field");
  const int d = cells.dim;
  CellDiscretization disc(cells.scheme, cells.cell, cells.rule);
  const Eigen::VectorXd& w = disc.weights();
  HomogenizedField hom;
  hom.dim = d;
  hom.adjoint = adjoint;
  hom.slow = cells.slow;
  hom.interp = interp;
  hom.a0.resize(cells.samples.size());
  hom.min_ellipticity = INFINITY;
  for (Index s = 0; s < cells.size(); ++s) {
    const CellSample& cs = cells.samples[static_cast<std::size_t>(s)];
    const Eigen::MatrixXd& grad = adjoint ? cs.gradNt : cs.gradN;
    if (grad.cols() != disc.n_points()) throw ConfigError("effective_matrix: cell table grid mismatch");
    auto a = coefficient_at_points(field, cells.slow_point(s), disc.points(), adjoint);
    Mat a0 = Mat::Zero(d, d);
    for (int j = 0; j < d; ++j) {
      Vec col = Vec::Zero(d);
      for (Index q = 0; q < disc.n_points(); ++q) {
        Vec e = grad.block(j * d, q, d, 1);
        e[j] += 1.0;
        col += w[q] * (a[static_cast<std::size_t>(q)] * e);
      }
      a0.col(j) = col;
    }
    hom.a0[static_cast<std::size_t>(s)] = a0;
    double lo = ellipticity_bounds(a0).first;
    hom.min_ellipticity = std::min(hom.min_ellipticity, lo);
    if (lo < field.lambda * (1.0 - 1e-6)) {
      std::ostringstream os;
      os << "effective_matrix: a0 at slow sample " << s << " has lambda_min " << lo << " below the field's "
         << field.lambda;
      throw ValidationError(os.str());
    }
  }
  for (Index s = 0; s < cells.size(); ++s) {
    for (int l = 0; l < d; ++l) {
      std::array<long, 2> off{0, 0};
      off[l] = 1;
      Index t = cells.slow.shifted(s, off);
      Mat diff = hom.a0[static_cast<std::size_t>(s)] - hom.a0[static_cast<std::size_t>(t)];
      double q = Eigen::JacobiSVD<Mat>(diff).singularValues()(0) / cells.slow.h();
      hom.lipschitz_quotient = std::max(hom.lipschitz_quotient, q);
    }
  }
  return hom;
}

void write_effective_csv(const HomogenizedField& hom, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path + "'");
  os << std::setprecision(17);
  os << (hom.dim == 1 ? "x1" : "x1,x2");
  for (int r = 0; r < hom.dim; ++r)
    for (int c = 0; c < hom.dim; ++c) os << ",a0_" << r + 1 << c + 1;
  os << "\n";
  for (Index s = 0; s < hom.slow.size(); ++s) {
    Vec x = hom.slow.node(s);
    for (int i = 0; i < hom.dim; ++i) os << (i ? "," : "") << x[i];
    const Mat& a = hom.a0[static_cast<std::size_t>(s)];
    for (int r = 0; r < hom.dim; ++r)
      for (int c = 0; c < hom.dim; ++c) os << "," << a(r, c);
    os << "\n";
  }
  if (!os) throw Error("failed writing '" + path + "'");
}

FluxCorrector flux_corrector(const CellSolutions& cells, const CoefficientField& field,
                             const HomogenizedField& hom, double tol) {
  if (hom.slow != cells.slow || hom.dim != cells.dim)
    throw ConfigError("flux_corrector: homogenized field does not match the cell table");
  const int d = cells.dim;
  const bool adjoint = hom.adjoint;
  CellDiscretization disc(cells.scheme, cells.cell, cells.rule);
  const Eigen::VectorXd& w = disc.weights();
  FluxCorrector fc;
  fc.dim = d;
  fc.adjoint = adjoint;
  fc.g.resize(cells.samples.size());
  for (Index s = 0; s < cells.size(); ++s) {
    const CellSample& cs = cells.samples[static_cast<std::size_t>(s)];
    const Eigen::MatrixXd& grad = adjoint ? cs.gradNt : cs.gradN;
    auto a = coefficient_at_points(field, cells.slow_point(s), disc.points(), adjoint);
    const Mat& a0 = hom.a0[static_cast<std::size_t>(s)];
    Eigen::MatrixXd& g = fc.g[static_cast<std::size_t>(s)];
    g.resize(d * d, disc.n_points());
    double scale = a0.cwiseAbs().maxCoeff();
    double amax = 0.0;
    for (const Mat& m : a) amax = std::max(amax, m.cwiseAbs().maxCoeff());
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXd ref_flux(d, disc.n_points());
      for (Index q = 0; q < disc.n_points(); ++q) {
        Vec e = grad.block(j * d, q, d, 1);
        e[j] += 1.0;
        g.block(j * d, q, d, 1) = a[static_cast<std::size_t>(q)] * e - a0.col(j);
        ref_flux.col(q) = a[static_cast<std::size_t>(q)].col(j);
      }
      for (int m = 0; m < d; ++m) fc.max_mean = std::max(fc.max_mean, std::abs(w.dot(g.row(j * d + m).transpose())));
      double ref = std::max(disc.divergence(ref_flux).norm(),
                            amax * std::sqrt(static_cast<double>(cells.cell.size())));
      double div = disc.divergence(g.middleRows(j * d, d)).norm();
      double rel = ref > 0.0 ? div / ref : div / std::max(scale, 1.0);
      fc.max_divergence = std::max(fc.max_divergence, rel);
    }
    if (fc.max_mean > 1e-10 * std::max(scale, 1.0)) {
      std::ostringstream os;
      os << "flux_corrector: mean of g is " << fc.max_mean << " at slow sample " << s;
      throw ValidationError(os.str());
    }
  }
  if (fc.max_divergence > 1e3 * tol) {
    std::ostringstream os;
    os << "flux_corrector: relative divergence of g is " << fc.max_divergence;
    throw ValidationError(os.str());
  }
  return fc;
}

Eigen::MatrixXd potential_divergence(const FluxCorrector& fc, const CellSolutions& cells, Index sample) {
  const int d = fc.dim;
  const Eigen::MatrixXd& G = fc.G[static_cast<std::size_t>(sample)];
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d * d, G.cols());
  if (d == 1) return out;
  SpectralGrid sp(cells.cell);
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < d; ++i)
      for (int k = 0; k < d; ++k)
        out.row(j * d + i) += sp.derivative(G.row((j * d + i) * d + k).transpose(), k).transpose();
  return out;
}

void vector_potential(FluxCorrector& fc, const CellSolutions& cells, double tol) {
  const int d = fc.dim;
  const Index nodes = cells.cell.size();
  const Index ns = cells.size();
  fc.G.assign(static_cast<std::size_t>(ns), Eigen::MatrixXd::Zero(d * d * d, nodes));
  fc.dxG.assign(static_cast<std::size_t>(ns), Eigen::MatrixXd::Zero(d * d * d * d, nodes));
  fc.has_potential = true;
  fc.max_potential_defect = 0.0;
  fc.potential_ratio = 0.0;
  if (d == 1) return;  // a 1x1 skew matrix is zero
  if (cells.scheme != CellScheme::Spectral)
    throw ConfigError("vector_potential: needs a spectral cell table in 2D");

  SpectralGrid sp(cells.cell);
  const double inv_n = 1.0 / static_cast<double>(nodes);
  for (Index s = 0; s < ns; ++s) {
    const Eigen::MatrixXd& g = fc.g[static_cast<std::size_t>(s)];
    Eigen::MatrixXd& G = fc.G[static_cast<std::size_t>(s)];
    for (int j = 0; j < d; ++j) {
      std::vector<Eigen::MatrixXd> dphi(static_cast<std::size_t>(d));  // dphi[k](i, :) = d_i Phi_k
      double g_norm2 = 0.0;
      for (int k = 0; k < d; ++k) {
        Eigen::VectorXd gk = g.row(j * d + k).transpose();
        g_norm2 += gk.squaredNorm() * inv_n;
        Eigen::VectorXd phi = sp.inverse_laplacian(-gk);
        dphi[static_cast<std::size_t>(k)] = sp.gradient(phi);
      }
      for (int i = 0; i < d; ++i)
        for (int k = i + 1; k < d; ++k) {
          Eigen::RowVectorXd gik = dphi[static_cast<std::size_t>(k)].row(i) - dphi[static_cast<std::size_t>(i)].row(k);
          G.row((j * d + i) * d + k) = gik;
          G.row((j * d + k) * d + i) = -gik;
        }
      double G_h1 = 0.0;
      for (int i = 0; i < d; ++i)
        for (int k = 0; k < d; ++k) {
          Eigen::VectorXd gik = G.row((j * d + i) * d + k).transpose();
          G_h1 += gik.squaredNorm() * inv_n + sp.gradient(gik).squaredNorm() * inv_n;
        }
      if (g_norm2 > 0.0) fc.potential_ratio = std::max(fc.potential_ratio, std::sqrt(G_h1 / g_norm2));
    }
    Eigen::MatrixXd divG = potential_divergence(fc, cells, s);
    double defect = std::sqrt((divG - g).squaredNorm() * inv_n);
    fc.max_potential_defect = std::max(fc.max_potential_defect, defect);
  }

  // Slow derivatives of every G entry over the slow grid.
  const int rows = d * d * d;
  Eigen::MatrixXd series(ns, rows * nodes);
  for (Index s = 0; s < ns; ++s) {
    const Eigen::MatrixXd& G = fc.G[static_cast<std::size_t>(s)];
    for (int r = 0; r < rows; ++r) series.row(s).segment(r * nodes, nodes) = G.row(r);
  }
  for (int l = 0; l < d; ++l) {
    Eigen::MatrixXd dl = slow_derivative(cells.slow, series, l, cells.slow_derivative);
    for (Index s = 0; s < ns; ++s)
      for (int r = 0; r < rows; ++r) fc.dxG[static_cast<std::size_t>(s)].row(r * d + l) = dl.row(s).segment(r * nodes, nodes);
  }

  if (fc.max_potential_defect > tol) {
    std::ostringstream os;
    os << "vector_potential: |div G - g| = " << fc.max_potential_defect << " exceeds " << tol;
    throw ValidationError(os.str());
  }
}

}  // namespace lphom
