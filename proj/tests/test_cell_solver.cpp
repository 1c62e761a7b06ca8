#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lphom/cell_solver.hpp"
#include "lphom/homogenize.hpp"
#include "lphom/linalg.hpp"

using namespace lphom;

namespace {

Vec v1(double a) { Vec v(1); v << a; return v; }
Vec v2(double a, double b) { Vec v(2); v << a, b; return v; }

// N(y) = int_0^y (a0 / a - 1) minus its mean, for a(y) = 2 + sin 2 pi y,
// by composite Gauss-Legendre quadrature.
double integral_inv_a(double y0, double y1) {
  auto [t, w] = gauss_legendre01(20);
  const int pieces = 64;
  double s = 0.0, h = (y1 - y0) / pieces;
  for (int p = 0; p < pieces; ++p)
    for (std::size_t q = 0; q < t.size(); ++q) {
      double y = y0 + (p + t[q]) * h;
      s += w[q] * h / (2.0 + std::sin(2.0 * M_PI * y));
    }
  return s;
}

CellSolutions table(const CoefficientField& f, int slow, int cell, CellScheme scheme) {
  CellTableSpec spec;
  spec.slow = TorusGrid(f.dim, slow);
  spec.cell = TorusGrid(f.dim, cell);
  spec.scheme = scheme;
  spec.rule = default_rule(f.dim);
  return build_cell_table(f, spec);
}

}  // namespace

TEST_CASE("identity coefficient gives zero correctors") {
  CoefficientField f = builtin_family("constant", {{"dim", 2}});
  for (CellScheme s : {CellScheme::Spectral, CellScheme::Element}) {
    CellDiscretization disc(s, TorusGrid(2, 16), QuadRule::Gauss2);
    for (int j = 0; j < 2; ++j) {
      CellField c = solve_cell(f, v2(0.1, 0.2), j, disc, 1e-12);
      CHECK(c.values.cwiseAbs().maxCoeff() < 1e-13);
      CellField ct = solve_adjoint_cell(f, v2(0.1, 0.2), j, disc, 1e-12);
      CHECK(ct.values.cwiseAbs().maxCoeff() < 1e-13);
    }
  }
}

TEST_CASE("1D cell solution matches the closed form at n = 256") {
  CoefficientField f = builtin_family("periodic_only");
  const int n = 256;
  CellDiscretization disc(CellScheme::Spectral, TorusGrid(1, n), QuadRule::Midpoint);
  CellField c = solve_cell(f, v1(0.0), 0, disc, 1e-11);
  const double a0 = std::sqrt(3.0);
  Eigen::VectorXd ref(n);
  double acc = 0.0;
  ref[0] = 0.0;
  for (int i = 1; i < n; ++i) {
    acc += integral_inv_a((i - 1.0) / n, static_cast<double>(i) / n);
    ref[i] = a0 * acc - static_cast<double>(i) / n;
  }
  ref.array() -= ref.mean();
  CHECK((c.values - ref).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(c.values.mean()) < 1e-12);
}

TEST_CASE("laminate: N^1 depends on y1 only and N^2 vanishes") {
  CoefficientField f = builtin_family("laminate_2d");
  TorusGrid g(2, 32);
  CellDiscretization disc(CellScheme::Element, g, QuadRule::Gauss2);
  CellField n1 = solve_cell(f, v2(0.3, 0.0), 0, disc, 1e-12);
  CellField n2 = solve_cell(f, v2(0.3, 0.0), 1, disc, 1e-12);
  CHECK(n2.values.cwiseAbs().maxCoeff() < 1e-10);
  double spread = 0.0;
  for (int i0 = 0; i0 < g.n; ++i0)
    for (int i1 = 1; i1 < g.n; ++i1) spread = std::max(spread, std::abs(n1.values[g.index(i0, i1)] - n1.values[g.index(i0, 0)]));
  CHECK(spread < 1e-10);
  CHECK(n1.values.cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("adjoint cell problem equals the primal problem on the transposed field") {
  CoefficientField f = builtin_family("smooth_2d_nonsymmetric");
  CoefficientField ft = transposed(f);
  CellDiscretization disc(CellScheme::Spectral, TorusGrid(2, 32), QuadRule::Gauss2);
  for (int j = 0; j < 2; ++j) {
    CellField a = solve_adjoint_cell(f, v2(0.2, 0.7), j, disc, 1e-12);
    CellField b = solve_cell(ft, v2(0.2, 0.7), j, disc, 1e-12);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-10);
    CellField p = solve_cell(f, v2(0.2, 0.7), j, disc, 1e-12);
    CHECK((a.values - p.values).cwiseAbs().maxCoeff() > 1e-4);
  }
}

TEST_CASE("symmetric coefficient: adjoint solutions equal primal ones") {
  CoefficientField f = builtin_family("periodic_only", {{"dim", 2}});
  CellSolutions c = table(f, 4, 16, CellScheme::Spectral);
  for (const CellSample& s : c.samples) CHECK((s.N - s.Nt).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("cell table invariants") {
  SUBCASE("constant family gives a zero table") {
    CellSolutions c = table(builtin_family("constant", {{"dim", 2}, {"a12", 0.3}}), 4, 8, CellScheme::Spectral);
    for (const CellSample& s : c.samples) {
      CHECK(s.N.cwiseAbs().maxCoeff() < 1e-13);
      CHECK(s.Nt.cwiseAbs().maxCoeff() < 1e-13);
      CHECK(s.dxN.cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  SUBCASE("periodic_only gives zero slow derivatives") {
    CellSolutions c = table(builtin_family("periodic_only", {{"dim", 2}}), 6, 16, CellScheme::Spectral);
    for (const CellSample& s : c.samples) {
      CHECK(s.dxN.cwiseAbs().maxCoeff() < 1e-10);
      CHECK(s.dxNt.cwiseAbs().maxCoeff() < 1e-10);
    }
  }
  SUBCASE("zero mean, residual and energy bound") {
    CoefficientField f = builtin_family("smooth_2d_nonsymmetric");
    CellSolutions c = table(f, 6, 16, CellScheme::Spectral);
    CHECK(c.max_mean <= 1e-9);
    CHECK(c.max_residual <= 1e-9);
    CHECK(c.max_gradient_norm <= std::sqrt(2.0) / (f.lambda * f.lambda));
  }
}

TEST_CASE("Lipschitz quotient of the cell table is stable under slow refinement") {
  CoefficientField f = builtin_family("smooth_2d_nonsymmetric");
  CellSolutions a = table(f, 8, 16, CellScheme::Spectral);
  CellSolutions b = table(f, 16, 16, CellScheme::Spectral);
  CHECK(a.lipschitz_quotient > 0.0);
  CHECK(std::abs(a.lipschitz_quotient - b.lipschitz_quotient) <= 0.1 * b.lipschitz_quotient);
}

TEST_CASE("element effective matrix converges at second order") {
  CoefficientField f = builtin_family("smooth_2d_nonsymmetric");
  std::vector<double> a0;
  for (int n : {16, 32, 64, 128}) {
    CellSolutions c = table(f, 2, n, CellScheme::Element);
    a0.push_back(effective_matrix(c, f).a0[1](0, 1));
  }
  std::vector<double> diff;
  for (std::size_t i = 0; i + 1 < a0.size(); ++i) diff.push_back(std::abs(a0[i] - a0[i + 1]));
  double slope = std::log2(diff[0] / diff[2]) / 2.0;
  CHECK(slope >= 1.8);
}

TEST_CASE("cell table save and load round trip") {
  CoefficientField f = builtin_family("smooth_2d_nonsymmetric");
  CellSolutions c = table(f, 4, 8, CellScheme::Spectral);
  auto path = std::filesystem::temp_directory_path() / "lphom_cells_test.bin";
  save_cell_table(c, path.string());
  CellSolutions d = load_cell_table(path.string());
  std::filesystem::remove(path);
  CHECK(d.slow == c.slow);
  CHECK(d.cell == c.cell);
  CHECK(d.scheme == c.scheme);
  REQUIRE(d.samples.size() == c.samples.size());
  for (std::size_t i = 0; i < c.samples.size(); ++i) {
    CHECK(d.samples[i].N == c.samples[i].N);
    CHECK(d.samples[i].gradNt == c.samples[i].gradNt);
    CHECK(d.samples[i].dxNt == c.samples[i].dxNt);
  }
  CHECK_THROWS_AS(load_cell_table("/nonexistent/file.bin"), Error);
}

TEST_CASE("table results do not depend on the number of workers") {
  CoefficientField f = builtin_family("smooth_2d_nonsymmetric");
  CellTableSpec spec;
  spec.slow = TorusGrid(2, 4);
  spec.cell = TorusGrid(2, 16);
  spec.scheme = CellScheme::Spectral;
  spec.rule = QuadRule::Gauss2;
  spec.jobs = 1;
  CellSolutions a = build_cell_table(f, spec);
  spec.jobs = 3;
  CellSolutions b = build_cell_table(f, spec);
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].N == b.samples[i].N);
}
