#include "lphom/slow_grid.hpp"

#include <cmath>
#include <numbers>

namespace lphom {
namespace {

constexpr double kPi = std::numbers::pi;

// Band-limited periodic interpolation kernel for even n, distance t in samples' units of period.
double dirichlet_kernel(int n, double t) {
  t -= std::round(t);
  if (std::abs(t) < 1e-14) return 1.0;
  return std::sin(n * kPi * t) / (n * std::tan(kPi * t));
}

}  // namespace

Eigen::MatrixXd periodic_interp_matrix(int n, const std::vector<double>& targets, SlowInterp method) {
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(static_cast<Index>(targets.size()), n);
  for (std::size_t r = 0; r < targets.size(); ++r) {
    double x = targets[r];
    if (method == SlowInterp::Trig) {
      for (int i = 0; i < n; ++i) T(static_cast<Index>(r), i) = dirichlet_kernel(n, x - static_cast<double>(i) / n);
    } else {
      double s = x * n;
      double fl = std::floor(s);
      double w = s - fl;
      long i = static_cast<long>(fl);
      int i0 = static_cast<int>(((i % n) + n) % n);
      int i1 = (i0 + 1) % n;
      T(static_cast<Index>(r), i0) += 1.0 - w;
      T(static_cast<Index>(r), i1) += w;
    }
  }
  return T;
}

Eigen::MatrixXd periodic_derivative_matrix(int n, SlowDerivative method) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    if (method == SlowDerivative::Central) {
      D(i, (i + 1) % n) += 0.5 * n;
      D(i, (i + n - 1) % n) -= 0.5 * n;
    } else {
      // Derivative of the band-limited interpolant: pi (-1)^k cot(pi k / n).
      for (int j = 0; j < n; ++j) {
        int k = i - j;
        if (k == 0) continue;
        double sign = (k % 2 == 0) ? 1.0 : -1.0;
        D(i, j) = kPi * sign / std::tan(kPi * k / n);
      }
    }
  }
  return D;
}

SlowInterpolator::SlowInterpolator(const TorusGrid& slow, const std::vector<double>& targets, SlowInterp method)
    : slow_(slow), T_(periodic_interp_matrix(slow.n, targets, method)) {}

Index SlowInterpolator::target_size() const { return slow_.dim == 1 ? T_.rows() : T_.rows() * T_.rows(); }

Eigen::MatrixXd SlowInterpolator::apply(const Eigen::MatrixXd& values) const {
  if (values.rows() != slow_.size()) throw ConfigError("SlowInterpolator: value rows do not match the slow grid");
  if (slow_.dim == 1) return T_ * values;
  const Index n = slow_.n, m = T_.rows();
  Eigen::MatrixXd out(m * m, values.cols());
  Eigen::MatrixXd tmp(m, n);
  for (Index c = 0; c < values.cols(); ++c) {
    Eigen::Map<const Eigen::MatrixXd> F(values.col(c).data(), n, n);  // F(i0, i1)
    tmp.noalias() = T_ * F;
    Eigen::Map<Eigen::MatrixXd> R(out.col(c).data(), m, m);
    R.noalias() = tmp * T_.transpose();
  }
  return out;
}

Eigen::MatrixXd slow_derivative(const TorusGrid& slow, const Eigen::MatrixXd& values, int axis,
                                SlowDerivative method) {
  const Eigen::MatrixXd D = periodic_derivative_matrix(slow.n, method);
  if (slow.dim == 1) return D * values;
  const Index n = slow.n;
  Eigen::MatrixXd out(values.rows(), values.cols());
  for (Index c = 0; c < values.cols(); ++c) {
    Eigen::Map<const Eigen::MatrixXd> F(values.col(c).data(), n, n);
    Eigen::Map<Eigen::MatrixXd> R(out.col(c).data(), n, n);
    if (axis == 0) R.noalias() = D * F;
    else R.noalias() = F * D.transpose();
  }
  return out;
}

std::vector<double> node_coordinates(const TorusGrid& fine) {
  std::vector<double> x(fine.n);
  for (int i = 0; i < fine.n; ++i) x[i] = i * fine.h();
  return x;
}

namespace {
std::vector<double> axis_offsets(const ElementQuadrature& quad) {
  const int nq = quad.n_points();
  const int m = quad.dim == 1 ? nq : static_cast<int>(std::lround(std::sqrt(nq)));
  std::vector<double> xi(m);
  for (int k = 0; k < m; ++k) xi[k] = quad.points[k][0];
  return xi;
}
}  // namespace

std::vector<double> quad_coordinates(const TorusGrid& fine, const ElementQuadrature& quad) {
  auto xi = axis_offsets(quad);
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(fine.n) * xi.size());
  for (int i = 0; i < fine.n; ++i)
    for (double s : xi) x.push_back((i + s) * fine.h());
  return x;
}

std::vector<Index> quad_tensor_order(const TorusGrid& fine, const ElementQuadrature& quad) {
  const int nq = quad.n_points();
  const int m = static_cast<int>(axis_offsets(quad).size());
  const Index stride = static_cast<Index>(fine.n) * m;
  std::vector<Index> order(static_cast<std::size_t>(fine.size()) * nq);
  for (Index e = 0; e < fine.size(); ++e) {
    auto c = fine.coords(e);
    for (int q = 0; q < nq; ++q) {
      Index t0 = static_cast<Index>(c[0]) * m + q % m;
      Index t1 = fine.dim == 1 ? 0 : static_cast<Index>(c[1]) * m + q / m;
      order[static_cast<std::size_t>(e * nq + q)] = t0 + stride * t1;
    }
  }
  return order;
}

}  // namespace lphom
