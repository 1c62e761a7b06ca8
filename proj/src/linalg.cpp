#include "lphom/linalg.hpp"

#include <cmath>
#include <numbers>

#include "lphom/types.hpp"

namespace lphom {

IterativeResult gmres(const LinearMap& A, const LinearMap& precond, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                      double tol, int max_iter, int restart) {
  const Eigen::Index n = b.size();
  IterativeResult res;
  const double bnorm = b.norm();
  if (x.size() != n) x = Eigen::VectorXd::Zero(n);
  if (bnorm == 0.0) {
    x.setZero();
    res.converged = true;
    return res;
  }
  Eigen::VectorXd r(n), w(n), z(n);
  auto true_residual = [&] {
    A(x, w);
    r = b - w;
    return r.norm() / bnorm;
  };
  double rel = true_residual();
  const int m = std::max(1, restart);
  Eigen::MatrixXd V(n, m + 1), H = Eigen::MatrixXd::Zero(m + 1, m);
  Eigen::MatrixXd Z(n, m);
  Eigen::VectorXd cs(m), sn(m), g(m + 1);
  while (rel > tol && res.iterations < max_iter) {
    double beta = r.norm();
    V.col(0) = r / beta;
    g.setZero();
    g[0] = beta;
    H.setZero();
    int k = 0;
    for (; k < m && res.iterations < max_iter; ++k) {
      ++res.iterations;
      if (precond) {
        precond(V.col(k), z);
      } else {
        z = V.col(k);
      }
      Z.col(k) = z;
      A(z, w);
      for (int i = 0; i <= k; ++i) {
        H(i, k) = V.col(i).dot(w);
        w -= H(i, k) * V.col(i);
      }
      H(k + 1, k) = w.norm();
      if (H(k + 1, k) > 0.0) V.col(k + 1) = w / H(k + 1, k);
      for (int i = 0; i < k; ++i) {
        double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
        H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
        H(i, k) = t;
      }
      double denom = std::hypot(H(k, k), H(k + 1, k));
      cs[k] = denom == 0.0 ? 1.0 : H(k, k) / denom;
      sn[k] = denom == 0.0 ? 0.0 : H(k + 1, k) / denom;
      H(k, k) = denom;
      H(k + 1, k) = 0.0;
      g[k + 1] = -sn[k] * g[k];
      g[k] = cs[k] * g[k];
      if (std::abs(g[k + 1]) <= 0.5 * tol * bnorm || H(k, k) == 0.0) {
        ++k;
        break;
      }
    }
    Eigen::VectorXd y = H.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(g.head(k));
    x += Z.leftCols(k) * y;
    rel = true_residual();
  }
  res.relative_residual = rel;
  res.converged = rel <= tol;
  return res;
}

std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n) {
  if (n < 1) throw ConfigError("gauss_legendre01: need at least one point");
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = n == 1 ? z : p1;
      double pm = n == 1 ? 1.0 : p0;
      dp = n * (z * pn - pm) / (z * z - 1.0);
      double dz = pn / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    // Ascending order on [0, 1].
    x[n - 1 - i] = 0.5 * (1.0 + z);
    w[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

}  // namespace lphom
