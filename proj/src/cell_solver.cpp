#include "lphom/cell_solver.hpp"

#include <Eigen/SparseLU>
#include <atomic>
#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "lphom/linalg.hpp"
#include "lphom/slow_grid.hpp"
#include "lphom/spectral.hpp"

namespace lphom {

CellDiscretization::CellDiscretization(CellScheme scheme, const TorusGrid& grid, QuadRule rule)
    : scheme_(scheme), grid_(grid), quad_(make_quadrature(grid.dim, rule)) {
  if (scheme == CellScheme::Auto) throw ConfigError("CellDiscretization: scheme must be resolved");
  if (grid.n < 8) throw ConfigError("CellDiscretization: cell grid needs n >= 8");
  if (scheme == CellScheme::Spectral) {
    spectral_ = std::make_unique<SpectralGrid>(grid);
    points_.reserve(static_cast<std::size_t>(grid.size()));
    for (Index k = 0; k < grid.size(); ++k) points_.push_back(grid.node(k));
    weights_ = Eigen::VectorXd::Constant(grid.size(), 1.0 / static_cast<double>(grid.size()));
  } else {
    points_ = quad_points(grid, quad_);
    const int nq = quad_.n_points();
    weights_.resize(grid.size() * nq);
    for (Index e = 0; e < grid.size(); ++e)
      for (int q = 0; q < nq; ++q) weights_[e * nq + q] = quad_.weights[q] / static_cast<double>(grid.size());
  }
}

CellDiscretization::~CellDiscretization() = default;
CellDiscretization::CellDiscretization(CellDiscretization&&) noexcept = default;

Eigen::MatrixXd CellDiscretization::gradient(const Eigen::VectorXd& nodal) {
  if (scheme_ == CellScheme::Spectral) return spectral_->gradient(nodal);
  return quad_gradients(grid_, quad_, nodal);
}

Eigen::VectorXd CellDiscretization::values_at_points(const Eigen::VectorXd& nodal) const {
  if (scheme_ == CellScheme::Spectral) return nodal;
  return quad_values(grid_, quad_, nodal);
}

Eigen::VectorXd CellDiscretization::divergence(const Eigen::MatrixXd& flux) {
  if (scheme_ == CellScheme::Spectral) return spectral_->divergence(flux);
  return -weak_flux_residual(grid_, quad_, flux) / grid_.cell_volume();
}

namespace {

Eigen::MatrixXd apply_coefficient(const std::vector<Mat>& a, const Eigen::MatrixXd& grad, int j) {
  const int d = static_cast<int>(grad.rows());
  Eigen::MatrixXd flux(d, grad.cols());
  for (Index q = 0; q < grad.cols(); ++q) {
    Vec g = grad.col(q);
    if (j >= 0) g[j] += 1.0;
    flux.col(q) = a[static_cast<std::size_t>(q)] * g;
  }
  return flux;
}

}  // namespace

double CellDiscretization::residual(const std::vector<Mat>& a, int j, const Eigen::VectorXd& N) {
  Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(grid_.dim, n_points());
  double ref = divergence(apply_coefficient(a, zero, j)).norm();
  // A divergence-free cell flux gives a round-off sized ref; floor it by the coefficient scale.
  double amax = 0.0;
  for (const Mat& m : a) amax = std::max(amax, m.cwiseAbs().maxCoeff());
  ref = std::max(ref, amax * std::sqrt(static_cast<double>(grid_.size())));
  double r = divergence(apply_coefficient(a, gradient(N), j)).norm();
  return ref > 0.0 ? r / ref : r;
}

std::vector<CellField> CellDiscretization::solve(const std::vector<Mat>& a, double tol, int max_iter) {
  const int d = grid_.dim;
  if (static_cast<Index>(a.size()) != n_points()) throw ConfigError("cell solve: coefficient size mismatch");
  for (const Mat& m : a) {
    if (!(ellipticity_bounds(m).first > 0.0)) throw ValidationError("cell solve: coefficient is not elliptic");
  }
  std::vector<CellField> out(static_cast<std::size_t>(d));
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(d, n_points());

  if (scheme_ == CellScheme::Element) {
    SpMat A = assemble_diffusion(grid_, quad_, a);
    // Pin node 0; the dropped equation is implied by the zero column sums.
    A.prune([](Index row, Index, double) { return row != 0; });
    A.coeffRef(0, 0) = 1.0;
    A.makeCompressed();
    Eigen::SparseLU<SpMat> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw SolverError("cell solve: factorization failed");
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd rhs = weak_flux_residual(grid_, quad_, apply_coefficient(a, zero, j)) / -grid_.cell_volume();
      rhs[0] = 0.0;
      CellField& f = out[static_cast<std::size_t>(j)];
      f.values = lu.solve(rhs);
      f.values.array() -= f.values.mean();
      f.gradient = gradient(f.values);
      f.residual = residual(a, j, f.values);
      f.iterations = 1;
      if (!(f.residual <= std::max(tol, 1e-12) * 1e3))
        throw SolverError("cell solve: direct solve residual " + std::to_string(f.residual));
    }
    return out;
  }

  Mat abar = Mat::Zero(d, d);
  for (std::size_t q = 0; q < a.size(); ++q) abar += weights_[static_cast<Index>(q)] * a[q];
  abar = 0.5 * (abar + abar.transpose()).eval();
  LinearMap op = [&](const Eigen::VectorXd& u, Eigen::VectorXd& y) {
    y = -divergence(apply_coefficient(a, spectral_->gradient(u), -1));
  };
  LinearMap pre = [&](const Eigen::VectorXd& u, Eigen::VectorXd& y) {
    y = spectral_->inverse_constant_elliptic(u, abar);
  };
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd b = divergence(apply_coefficient(a, zero, j));
    CellField& f = out[static_cast<std::size_t>(j)];
    f.values = Eigen::VectorXd::Zero(grid_.size());
    IterativeResult it = gmres(op, pre, b, f.values, tol, max_iter);
    f.values.array() -= f.values.mean();
    f.gradient = gradient(f.values);
    f.residual = residual(a, j, f.values);
    f.iterations = it.iterations;
    if (!it.converged || f.residual > 10.0 * tol) {
      std::ostringstream os;
      os << "cell solve: GMRES did not converge (direction " << j << ", residual " << f.residual << " after "
         << it.iterations << " iterations)";
      throw SolverError(os.str());
    }
  }
  return out;
}

CellScheme resolve_scheme(CellScheme requested, const CoefficientField& field) {
  if (requested != CellScheme::Auto) return requested;
  return field.family == "laminate_2d" ? CellScheme::Element : CellScheme::Spectral;
}

std::vector<Mat> coefficient_at_points(const CoefficientField& field, const Vec& x, const std::vector<Vec>& pts,
                                       bool transpose) {
  std::vector<Mat> a;
  a.reserve(pts.size());
  for (const Vec& y : pts) {
    Mat m = field.eval(x, y);
    if (transpose) m.transposeInPlace();
    a.push_back(m);
  }
  return a;
}

CellField solve_cell(const CoefficientField& field, const Vec& x, int j, CellDiscretization& disc, double tol,
                     int max_iter) {
  if (j < 0 || j >= field.dim) throw ConfigError("solve_cell: direction out of range");
  auto all = disc.solve(coefficient_at_points(field, x, disc.points()), tol, max_iter);
  return all[static_cast<std::size_t>(j)];
}

CellField solve_adjoint_cell(const CoefficientField& field, const Vec& x, int j, CellDiscretization& disc,
                             double tol, int max_iter) {
  if (j < 0 || j >= field.dim) throw ConfigError("solve_adjoint_cell: direction out of range");
  auto all = disc.solve(coefficient_at_points(field, x, disc.points(), true), tol, max_iter);
  return all[static_cast<std::size_t>(j)];
}

void compute_slow_derivatives(CellSolutions& cells) {
  const int d = cells.dim;
  const Index ns = cells.size();
  if (ns == 0) return;
  const Index nodes = cells.samples[0].N.rows();
  // Stack every (node, j) series as a column over slow samples.
  auto derive = [&](auto member_in, auto member_out) {
    Eigen::MatrixXd series(ns, nodes * d);
    for (Index s = 0; s < ns; ++s) {
      const Eigen::MatrixXd& N = cells.samples[static_cast<std::size_t>(s)].*member_in;
      for (int j = 0; j < d; ++j) series.row(s).segment(j * nodes, nodes) = N.col(j).transpose();
    }
    for (Index s = 0; s < ns; ++s) (cells.samples[static_cast<std::size_t>(s)].*member_out).resize(nodes, d * d);
    for (int l = 0; l < d; ++l) {
      Eigen::MatrixXd dl = slow_derivative(cells.slow, series, l, cells.slow_derivative);
      for (Index s = 0; s < ns; ++s) {
        Eigen::MatrixXd& out = cells.samples[static_cast<std::size_t>(s)].*member_out;
        for (int j = 0; j < d; ++j) out.col(j * d + l) = dl.row(s).segment(j * nodes, nodes).transpose();
      }
    }
  };
  derive(&CellSample::N, &CellSample::dxN);
  derive(&CellSample::Nt, &CellSample::dxNt);
}

CellSolutions build_cell_table(const CoefficientField& field, const CellTableSpec& spec) {
  if (spec.slow.dim != field.dim || spec.cell.dim != field.dim)
    throw ConfigError("build_cell_table: grid dimension does not match the field");
  CellSolutions cells;
  cells.dim = field.dim;
  cells.scheme = resolve_scheme(spec.scheme, field);
  cells.rule = spec.rule;
  cells.slow_derivative = spec.slow_derivative;
  cells.slow = spec.slow;
  cells.cell = spec.cell;
  const Index ns = spec.slow.size();
  cells.samples.resize(static_cast<std::size_t>(ns));
  const int d = field.dim;

  std::atomic<Index> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    try {
      CellDiscretization disc(cells.scheme, spec.cell, spec.rule);
      for (Index s = next++; s < ns; s = next++) {
        Vec x = spec.slow.node(s);
        CellSample& out = cells.samples[static_cast<std::size_t>(s)];
        try {
          auto primal = disc.solve(coefficient_at_points(field, x, disc.points()), spec.tol, spec.max_iter);
          auto adjoint = disc.solve(coefficient_at_points(field, x, disc.points(), true), spec.tol, spec.max_iter);
          out.N.resize(spec.cell.size(), d);
          out.Nt.resize(spec.cell.size(), d);
          out.gradN.resize(d * d, disc.n_points());
          out.gradNt.resize(d * d, disc.n_points());
          for (int j = 0; j < d; ++j) {
            out.N.col(j) = primal[static_cast<std::size_t>(j)].values;
            out.Nt.col(j) = adjoint[static_cast<std::size_t>(j)].values;
            out.gradN.middleRows(j * d, d) = primal[static_cast<std::size_t>(j)].gradient;
            out.gradNt.middleRows(j * d, d) = adjoint[static_cast<std::size_t>(j)].gradient;
            out.residual = std::max({out.residual, primal[static_cast<std::size_t>(j)].residual,
                                     adjoint[static_cast<std::size_t>(j)].residual});
          }
        } catch (const Error& e) {
          std::ostringstream os;
          os << e.what() << " [slow sample " << s << " at x = (" << x.transpose() << ")]";
          throw SolverError(os.str());
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(err_mutex);
      if (!first_error) first_error = std::current_exception();
      next = ns;
    }
  };
  const int jobs = std::max(1, std::min<int>(spec.jobs, static_cast<int>(ns)));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  compute_slow_derivatives(cells);

  // Diagnostics.
  CellDiscretization disc(cells.scheme, spec.cell, spec.rule);
  const Eigen::VectorXd& w = disc.weights();
  for (const CellSample& s : cells.samples) {
    cells.max_residual = std::max(cells.max_residual, s.residual);
    for (int j = 0; j < d; ++j) {
      cells.max_mean = std::max({cells.max_mean, std::abs(s.N.col(j).mean()), std::abs(s.Nt.col(j).mean())});
      double g2 = 0.0;
      for (int m = 0; m < d; ++m) g2 += w.dot(s.gradN.row(j * d + m).transpose().cwiseAbs2());
      cells.max_gradient_norm = std::max(cells.max_gradient_norm, std::sqrt(g2));
    }
  }
  auto h1_distance = [&](const CellSample& a, const CellSample& b) {
    double acc = 0.0;
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd dv = disc.values_at_points(a.N.col(j) - b.N.col(j));
      acc += w.dot(dv.cwiseAbs2());
      for (int m = 0; m < d; ++m)
        acc += w.dot((a.gradN.row(j * d + m) - b.gradN.row(j * d + m)).transpose().cwiseAbs2());
    }
    return std::sqrt(acc);
  };
  for (Index s = 0; s < ns; ++s) {
    for (int l = 0; l < d; ++l) {
      std::array<long, 2> off{0, 0};
      off[l] = 1;
      Index t = spec.slow.shifted(s, off);
      double q = h1_distance(cells.samples[static_cast<std::size_t>(s)], cells.samples[static_cast<std::size_t>(t)]) /
                 spec.slow.h();
      cells.lipschitz_quotient = std::max(cells.lipschitz_quotient, q);
    }
  }
  return cells;
}

}  // namespace lphom
