#include <doctest.h>

#include <cmath>

#include "lphom/fine_assembly.hpp"

using namespace lphom;

namespace {

HomogenizedField constant_hom(const Mat& a, int slow = 4) {
  HomogenizedField h;
  h.dim = static_cast<int>(a.rows());
  h.slow = TorusGrid(h.dim, slow);
  h.a0.assign(static_cast<std::size_t>(h.slow.size()), a);
  return h;
}

double pi2() { return 2.0 * M_PI; }

}  // namespace

TEST_CASE("identity coefficient gives the shifted discrete Laplacian") {
  CoefficientField f = builtin_family("constant", {{"dim", 1}});
  TorusGrid g = fine_grid(1, 4, 8);
  SpMat A = assemble_fine(f, 4, g);
  Eigen::VectorXd one = Eigen::VectorXd::Ones(g.size());
  CHECK((A * one - one).cwiseAbs().maxCoeff() < 1e-12);
  const double h2 = g.h() * g.h();
  CHECK(A.coeff(3, 3) == doctest::Approx(2.0 / h2 + 1.0));
  CHECK(A.coeff(3, 4) == doctest::Approx(-1.0 / h2));
  CHECK(A.coeff(3, 5) == 0.0);
}

TEST_CASE("symmetric fields assemble to symmetric matrices; transposed fields to transposes") {
  for (const char* name : {"separable_1d", "laminate_2d", "smooth_2d_nonsymmetric"}) {
    CoefficientField f = builtin_family(name);
    TorusGrid g = fine_grid(f.dim, 4, 8);
    SpMat A = assemble_fine(f, 4, g);
    SpMat At = assemble_fine(f, 4, g, true);
    SpMat diff = SpMat(A.transpose()) - At;
    CHECK(diff.cwiseAbs().sum() <= 1e-12 * A.cwiseAbs().sum());
    if (f.symmetric) CHECK(SpMat(SpMat(A.transpose()) - A).cwiseAbs().sum() <= 1e-12 * A.cwiseAbs().sum());
  }
}

TEST_CASE("coarse resolutions are rejected") {
  CoefficientField f = builtin_family("separable_1d");
  CHECK_THROWS_AS(assemble_fine(f, 8, TorusGrid(1, 48)), ConfigError);  // 6 points per cell
  CHECK_THROWS_AS(assemble_fine(f, 8, TorusGrid(1, 100)), ConfigError);  // not commensurate
}

TEST_CASE("self-convergence of the 1D fine solve") {
  CoefficientField f = builtin_family("separable_1d");
  auto rhs = [](const Vec& x) { return std::cos(2.0 * M_PI * x[0]) + 0.5 * std::sin(4.0 * M_PI * x[0]); };
  std::vector<Eigen::VectorXd> sol;
  for (int nf : {8, 16, 32}) {
    TorusGrid g = fine_grid(1, 4, nf);
    sol.push_back(solve(assemble_fine(f, 4, g), GridFunction::sample(g, rhs), 1e-10).u.values);
  }
  auto coarse_diff = [&](int i) {
    double m = 0.0;
    for (Index k = 0; k < sol[i].size(); ++k) m = std::max(m, std::abs(sol[i][k] - sol[i + 1][2 * k]));
    return m;
  };
  double ratio = coarse_diff(0) / coarse_diff(1);
  CHECK(ratio > 3.0);  // O(h^2)
}

TEST_CASE("homogenized assembly") {
  Mat a(2, 2);
  a << 2.0, 0.3, -0.1, 1.0;
  TorusGrid g(2, 16);
  SpMat A = assemble_homogenized(constant_hom(a), g);
  CoefficientField cf = builtin_family("constant", {{"dim", 2}, {"a11", 2.0}, {"a12", 0.3}, {"a21", -0.1}, {"a22", 1.0}});
  SpMat B = assemble_fine(cf, 2, g);
  CHECK(SpMat(A - B).cwiseAbs().sum() < 1e-9);
  SpMat At = assemble_homogenized(constant_hom(a).transposed(), g);
  Eigen::VectorXd u = random_vector(g.size(), 3), v = random_vector(g.size(), 4);
  CHECK(std::abs(v.dot(A * u) - u.dot(At * v)) < 1e-10 * std::abs(v.dot(A * u)) + 1e-10);
}

TEST_CASE("homogenized solutions have bounded discrete second differences") {
  CoefficientField f = builtin_family("separable_1d");
  CellTableSpec spec;
  spec.slow = TorusGrid(1, 16);
  spec.cell = TorusGrid(1, 32);
  HomogenizedField hom = effective_matrix(build_cell_table(f, spec), f);
  std::vector<double> h2;
  for (int n : {64, 128, 256}) {
    TorusGrid g(1, n);
    Eigen::VectorXd rhs(n);  // rough data: the bound is on |D^2 u| / |f|
    for (Index k = 0; k < n; ++k) rhs[k] = std::sin(2 * M_PI * g.node(k)[0]) + (k % 2 ? 0.3 : -0.3);
    Eigen::VectorXd u = solve(assemble_homogenized(hom, g), GridFunction(g, rhs), 1e-10).u.values;
    double s = 0.0;
    for (Index k = 0; k < n; ++k) {
      double d2 = (u[(k + 1) % n] - 2 * u[k] + u[(k + n - 1) % n]) / (g.h() * g.h());
      s += g.h() * d2 * d2;
    }
    h2.push_back(std::sqrt(s) / l2_norm(g, rhs));
  }
  for (double v : h2) CHECK(v < 1.0 / f.lambda + 1.0);
  CHECK(std::abs(h2[2] - h2[1]) <= 0.1 * h2[2]);
}

TEST_CASE("solve") {
  TorusGrid g(1, 128);
  CoefficientField f = builtin_family("constant", {{"dim", 1}});
  SpMat A = assemble_fine(f, 8, g);
  SUBCASE("zero right-hand side") {
    CHECK(solve(A, GridFunction::zeros(g), 1e-12).u.values.norm() == 0.0);
  }
  SUBCASE("sine eigenfunction") {
    GridFunction s = GridFunction::sample(g, [](const Vec& x) { return std::sin(2 * M_PI * x[0]); });
    SolveResult r = solve(A, s, 1e-12);
    const double h = g.h();
    double discrete = (2.0 - 2.0 * std::cos(pi2() * h)) / (h * h) + 1.0;
    CHECK((r.u.values - s.values / discrete).cwiseAbs().maxCoeff() < 1e-13);
    CHECK((r.u.values - s.values / (pi2() * pi2() + 1.0)).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(r.relative_residual <= 1e-12);
    CHECK(r.energy_ratio > 0.0);
  }
  SUBCASE("nonsymmetric system") {
    CoefficientField ns = builtin_family("smooth_2d_nonsymmetric");
    TorusGrid g2 = fine_grid(2, 2, 8);
    SpMat B = assemble_fine(ns, 2, g2);
    GridFunction rhs(g2, random_vector(g2.size(), 5));
    SolveResult r = solve(B, rhs, 1e-10);
    CHECK(r.relative_residual <= 1e-10);
    CHECK((B * r.u.values - rhs.values).norm() <= 1e-10 * rhs.values.norm());
  }
}

TEST_CASE("coercivity and resolvent contraction") {
  CoefficientField f = builtin_family("smooth_2d_nonsymmetric");
  TorusGrid g = fine_grid(2, 2, 8);
  SpMat A = assemble_fine(f, 2, g);
  SpMat H = h1_gram(g);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    Eigen::VectorXd u = random_vector(g.size(), s);
    double lhs = u.dot(A * u);
    double rhs = u.squaredNorm() + f.lambda * (u.dot(H * u) - u.squaredNorm());
    CHECK(lhs >= rhs * (1.0 - 1e-12));
  }
  Resolvent R(A, "R");
  NormEstimate n = operator_norm(R.op(), 1e-8, 300, 1);
  CHECK(n.value <= 1.0 + 1e-8);
  CHECK(n.value >= 1.0 - 1e-6);  // constants are fixed by A + 1
  CHECK(transpose_defect(R.op(), 3) < 1e-12);
}

TEST_CASE("operator norms") {
  SUBCASE("identity") { CHECK(operator_norm(DiscreteOperator::identity(20), 1e-10, 100, 1).value == doctest::Approx(1.0)); }
  SUBCASE("diag(3, 1)") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 3;
    d(1, 1) = 1;
    CHECK(operator_norm(DiscreteOperator::from_dense(d), 1e-10, 100, 1).value == doctest::Approx(3.0).epsilon(1e-10));
  }
  SUBCASE("random 50x50 against the SVD") {
    Eigen::MatrixXd m(50, 50);
    for (int c = 0; c < 50; ++c) m.col(c) = random_vector(50, 100 + c);
    double ref = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0);
    NormEstimate e = operator_norm(DiscreteOperator::from_dense(m), 1e-10, 100, 2);
    CHECK(std::abs(e.value - ref) <= 1e-9 * ref);
  }
  SUBCASE("output Gram matrix") {
    TorusGrid g(1, 16);
    SpMat H = h1_gram(g);
    Eigen::MatrixXd Hd = Eigen::MatrixXd(H);
    Eigen::LLT<Eigen::MatrixXd> llt(Hd);
    Eigen::MatrixXd Lt = llt.matrixU();
    double ref = Eigen::JacobiSVD<Eigen::MatrixXd>(Lt).singularValues()(0);
    CHECK(operator_norm(DiscreteOperator::identity(16), 1e-10, 100, 1, &H).value ==
          doctest::Approx(ref).epsilon(1e-8));
  }
  SUBCASE("budget exhaustion") {
    Eigen::MatrixXd m(60, 60);
    for (int c = 0; c < 60; ++c) m.col(c) = random_vector(60, 300 + c);
    CHECK_THROWS_AS(operator_norm(DiscreteOperator::from_dense(m), 1e-14, 3, 1), SolverError);
  }
}

TEST_CASE("grid norms") {
  TorusGrid g(1, 256);
  Norms one = norms(GridFunction(g, Eigen::VectorXd::Ones(256)));
  CHECK(one.l2 == doctest::Approx(1.0));
  CHECK(one.h1 == doctest::Approx(1.0));
  Norms z = norms(GridFunction::zeros(g));
  CHECK(z.l2 == 0.0);
  CHECK(z.h1 == 0.0);
  Norms s = norms(GridFunction::sample(g, [](const Vec& x) { return std::sin(2 * M_PI * x[0]); }));
  CHECK(s.l2 == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
  CHECK(s.h1 == doctest::Approx(std::sqrt(0.5 + 2 * M_PI * M_PI)).epsilon(1e-4));
  TorusGrid g2(2, 64);
  Norms s2 = norms(GridFunction::sample(g2, [](const Vec& x) { return std::sin(2 * M_PI * x[0]) * std::cos(2 * M_PI * x[1]); }));
  CHECK(s2.l2 == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s2.h1 == doctest::Approx(std::sqrt(0.25 + 2 * M_PI * M_PI)).epsilon(2e-3));
}

TEST_CASE("discrete operator algebra") {
  Eigen::MatrixXd a(3, 2), b(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  b << 1, 0, -1, 2, 1, 0;
  DiscreteOperator A = DiscreteOperator::from_dense(a), B = DiscreteOperator::from_dense(b);
  CHECK(((A * B).to_dense() - a * b).norm() < 1e-14);
  CHECK(((A * B).transpose().to_dense() - (a * b).transpose()).norm() < 1e-14);
  CHECK(((A * B + DiscreteOperator::identity(3).scaled(2.0)).to_dense() - (a * b + 2 * Eigen::MatrixXd::Identity(3, 3))).norm() < 1e-14);
  CHECK_THROWS_AS(A + B, ConfigError);
  CHECK_THROWS_AS(A.apply(Eigen::VectorXd::Ones(3)), ConfigError);
  CHECK(transpose_defect(A * B, 1) < 1e-14);
}
