#pragma once

#include <Eigen/Dense>
#include <functional>
#include <utility>
#include <vector>

namespace lphom {

using LinearMap = std::function<void(const Eigen::VectorXd& in, Eigen::VectorXd& out)>;

struct IterativeResult {
  int iterations = 0;
  double relative_residual = 0.0;
  bool converged = false;
};

// Restarted GMRES with right preconditioning (precond may be empty).
// Starts from the incoming x. Stops on |b - A x| <= tol |b|.
IterativeResult gmres(const LinearMap& A, const LinearMap& precond, const Eigen::VectorXd& b, Eigen::VectorXd& x,
                      double tol, int max_iter, int restart = 60);

// Gauss-Legendre nodes and weights on [0, 1]; weights sum to 1.
std::pair<std::vector<double>, std::vector<double>> gauss_legendre01(int n);

}  // namespace lphom
