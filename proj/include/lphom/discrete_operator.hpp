#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include "lphom/torus_grid.hpp"

namespace lphom {

// Linear map between grid-function spaces given by apply and transpose-apply.
// Transposes are with respect to the Euclidean (equivalently, uniform-weight
// discrete L2) inner product. Immutable; copies share state.
class DiscreteOperator {
 public:
  using Fn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

  DiscreteOperator() = default;
  DiscreteOperator(Index rows, Index cols, Fn apply, Fn apply_transpose, std::string name = "",
                   bool symmetric = false);

  static DiscreteOperator from_matrix(const SpMat& m, std::string name = "", bool symmetric = false);
  static DiscreteOperator from_dense(const Eigen::MatrixXd& m, std::string name = "");
  static DiscreteOperator identity(Index n);
  static DiscreteOperator zero(Index rows, Index cols);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  const std::string& name() const { return name_; }
  bool symmetric() const { return symmetric_; }

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_transpose(const Eigen::VectorXd& y) const;

  DiscreteOperator transpose() const;
  DiscreteOperator scaled(double s) const;
  DiscreteOperator named(std::string name) const;
  Eigen::MatrixXd to_dense() const;

  friend DiscreteOperator operator*(const DiscreteOperator& a, const DiscreteOperator& b);  // a after b
  friend DiscreteOperator operator+(const DiscreteOperator& a, const DiscreteOperator& b);
  friend DiscreteOperator operator-(const DiscreteOperator& a, const DiscreteOperator& b);

 private:
  Index rows_ = 0, cols_ = 0;
  Fn apply_, apply_t_;
  std::string name_;
  bool symmetric_ = false;
};

struct NormEstimate {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value of M from the output Gram matrix H (identity when
// null): sqrt of the top eigenvalue of M^T H M. Krylov (Lanczos) iteration
// from a seeded random start vector; relative tolerance on the eigenvalue.
// Throws SolverError when the budget is exhausted.
NormEstimate operator_norm(const DiscreteOperator& M, double tol, int max_iter, std::uint64_t seed,
                           const SpMat* output_gram = nullptr);

// Relative defect |<Mf,h> - <f,M^T h>| / (|Mf||h| + |f||M^T h|) on random vectors.
double transpose_defect(const DiscreteOperator& M, std::uint64_t seed);

// Deterministic uniform(-1,1) vector for a seed.
Eigen::VectorXd random_vector(Index n, std::uint64_t seed);

}  // namespace lphom
