#include "lphom/discrete_operator.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace lphom {

DiscreteOperator::DiscreteOperator(Index rows, Index cols, Fn apply, Fn apply_transpose, std::string name,
                                   bool symmetric)
    : rows_(rows), cols_(cols), apply_(std::move(apply)), apply_t_(std::move(apply_transpose)),
      name_(std::move(name)), symmetric_(symmetric) {}

DiscreteOperator DiscreteOperator::from_matrix(const SpMat& m, std::string name, bool symmetric) {
  auto mat = std::make_shared<const SpMat>(m);
  return DiscreteOperator(
      m.rows(), m.cols(), [mat](const Eigen::VectorXd& x) -> Eigen::VectorXd { return *mat * x; },
      [mat](const Eigen::VectorXd& y) -> Eigen::VectorXd { return mat->transpose() * y; }, std::move(name),
      symmetric);
}

DiscreteOperator DiscreteOperator::from_dense(const Eigen::MatrixXd& m, std::string name) {
  auto mat = std::make_shared<const Eigen::MatrixXd>(m);
  return DiscreteOperator(
      m.rows(), m.cols(), [mat](const Eigen::VectorXd& x) -> Eigen::VectorXd { return *mat * x; },
      [mat](const Eigen::VectorXd& y) -> Eigen::VectorXd { return mat->transpose() * y; }, std::move(name));
}

DiscreteOperator DiscreteOperator::identity(Index n) {
  auto id = [](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x; };
  return DiscreteOperator(n, n, id, id, "I", true);
}

DiscreteOperator DiscreteOperator::zero(Index rows, Index cols) {
  return DiscreteOperator(
      rows, cols, [rows](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(rows); },
      [cols](const Eigen::VectorXd&) -> Eigen::VectorXd { return Eigen::VectorXd::Zero(cols); }, "0", rows == cols);
}

Eigen::VectorXd DiscreteOperator::apply(const Eigen::VectorXd& x) const {
  if (x.size() != cols_) throw ConfigError("DiscreteOperator " + name_ + ": input size mismatch");
  return apply_(x);
}

Eigen::VectorXd DiscreteOperator::apply_transpose(const Eigen::VectorXd& y) const {
  if (y.size() != rows_) throw ConfigError("DiscreteOperator " + name_ + ": transpose input size mismatch");
  return apply_t_(y);
}

DiscreteOperator DiscreteOperator::transpose() const {
  return DiscreteOperator(cols_, rows_, apply_t_, apply_, name_.empty() ? "" : name_ + "^T", symmetric_);
}

DiscreteOperator DiscreteOperator::scaled(double s) const {
  auto f = apply_, ft = apply_t_;
  return DiscreteOperator(
      rows_, cols_, [f, s](const Eigen::VectorXd& x) -> Eigen::VectorXd { return s * f(x); },
      [ft, s](const Eigen::VectorXd& y) -> Eigen::VectorXd { return s * ft(y); }, name_, symmetric_);
}

DiscreteOperator DiscreteOperator::named(std::string name) const {
  DiscreteOperator out = *this;
  out.name_ = std::move(name);
  return out;
}

Eigen::MatrixXd DiscreteOperator::to_dense() const {
  Eigen::MatrixXd m(rows_, cols_);
  Eigen::VectorXd e = Eigen::VectorXd::Zero(cols_);
  for (Index c = 0; c < cols_; ++c) {
    e[c] = 1.0;
    m.col(c) = apply_(e);
    e[c] = 0.0;
  }
  return m;
}

DiscreteOperator operator*(const DiscreteOperator& a, const DiscreteOperator& b) {
  if (a.cols_ != b.rows_) throw ConfigError("DiscreteOperator: composition size mismatch");
  auto fa = a.apply_, fb = b.apply_, ta = a.apply_t_, tb = b.apply_t_;
  return DiscreteOperator(
      a.rows_, b.cols_, [fa, fb](const Eigen::VectorXd& x) -> Eigen::VectorXd { return fa(fb(x)); },
      [ta, tb](const Eigen::VectorXd& y) -> Eigen::VectorXd { return tb(ta(y)); }, a.name_ + "*" + b.name_);
}

DiscreteOperator operator+(const DiscreteOperator& a, const DiscreteOperator& b) {
  if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw ConfigError("DiscreteOperator: sum size mismatch");
  auto fa = a.apply_, fb = b.apply_, ta = a.apply_t_, tb = b.apply_t_;
  return DiscreteOperator(
      a.rows_, a.cols_, [fa, fb](const Eigen::VectorXd& x) -> Eigen::VectorXd { return fa(x) + fb(x); },
      [ta, tb](const Eigen::VectorXd& y) -> Eigen::VectorXd { return ta(y) + tb(y); }, a.name_ + "+" + b.name_,
      a.symmetric_ && b.symmetric_);
}

DiscreteOperator operator-(const DiscreteOperator& a, const DiscreteOperator& b) { return a + b.scaled(-1.0); }

Eigen::VectorXd random_vector(Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXd v(n);
  for (Index i = 0; i < n; ++i) v[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
  return v;
}

NormEstimate operator_norm(const DiscreteOperator& M, double tol, int max_iter, std::uint64_t seed,
                           const SpMat* output_gram) {
  const Index n = M.cols();
  if (output_gram && output_gram->rows() != M.rows()) throw ConfigError("operator_norm: Gram size mismatch");
  auto B = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd {
    Eigen::VectorXd y = M.apply(v);
    if (output_gram) y = (*output_gram) * y;
    return M.apply_transpose(y);
  };
  NormEstimate est;
  if (n == 0) {
    est.converged = true;
    return est;
  }
  const int kmax = static_cast<int>(std::min<Index>(max_iter, n));
  Eigen::MatrixXd V(n, kmax + 1);
  Eigen::VectorXd alpha(kmax), beta(kmax);
  Eigen::VectorXd v = random_vector(n, seed);
  V.col(0) = v / v.norm();
  double theta_prev = -1.0;
  int stable = 0;
  for (int k = 0; k < kmax; ++k) {
    est.iterations = k + 1;
    Eigen::VectorXd w = B(V.col(k));
    alpha[k] = V.col(k).dot(w);
    w -= alpha[k] * V.col(k);
    if (k > 0) w -= beta[k - 1] * V.col(k - 1);
    // Full reorthogonalization, twice.
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * w);
    beta[k] = w.norm();

    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k + 1, k + 1);
    for (int i = 0; i <= k; ++i) {
      T(i, i) = alpha[i];
      if (i < k) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    const double theta = std::max(es.eigenvalues()[k], 0.0);
    const double resid = beta[k] * std::abs(es.eigenvectors()(k, k));
    est.value = std::sqrt(theta);
    double scale = std::max(theta, 1e-300);
    if (theta == 0.0 && beta[k] <= 1e-300) {
      est.converged = true;
      return est;
    }
    if (resid <= tol * scale || beta[k] <= 1e-14 * std::max(std::abs(alpha[k]), scale)) {
      est.converged = true;
      return est;
    }
    stable = (theta_prev >= 0.0 && std::abs(theta - theta_prev) <= 0.1 * tol * scale) ? stable + 1 : 0;
    if (stable >= 2) {
      est.converged = true;
      return est;
    }
    theta_prev = theta;
    V.col(k + 1) = w / beta[k];
  }
  if (kmax == n) {
    est.converged = true;  // full Krylov space: exact
    return est;
  }
  std::ostringstream os;
  os << "operator_norm(" << M.name() << "): no convergence in " << max_iter << " iterations";
  throw SolverError(os.str());
}

double transpose_defect(const DiscreteOperator& M, std::uint64_t seed) {
  Eigen::VectorXd f = random_vector(M.cols(), seed);
  Eigen::VectorXd h = random_vector(M.rows(), seed + 7919);
  Eigen::VectorXd Mf = M.apply(f);
  Eigen::VectorXd Mth = M.apply_transpose(h);
  double lhs = Mf.dot(h), rhs = f.dot(Mth);
  double scale = Mf.norm() * h.norm() + f.norm() * Mth.norm();
  return scale > 0.0 ? std::abs(lhs - rhs) / scale : 0.0;
}

}  // namespace lphom
