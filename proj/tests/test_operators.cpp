#include <doctest.h>

#include <cmath>

#include "lphom/sweep.hpp"

using namespace lphom;

namespace {

ExperimentConfig small_config(const std::string& family, ParamMap params = {}, int slow = 16, int nf = 8) {
  ExperimentConfig c;
  c.family = family;
  c.params = std::move(params);
  c.slow = slow;
  c.fine_per_cell = nf;
  c.eps_denominators = {2, 4};
  return c;
}

double max_abs_apply(const DiscreteOperator& op, std::uint64_t seed) {
  return op.apply(random_vector(op.cols(), seed)).cwiseAbs().maxCoeff();
}

// 1 / <1/p> for p = 2 + sin 2 pi y.
const double kHarmonic = std::sqrt(3.0);

}  // namespace

TEST_CASE("shift") {
  TorusGrid g(1, 64);
  GridFunction u(g, random_vector(64, 1));
  CHECK(shift(u, Vec::Zero(1)).values == u.values);
  CHECK(shift(u, Vec::Ones(1)).values == u.values);
  Vec off(1);
  off << 3.0 / 64;
  GridFunction s = shift(u, off);
  CHECK(s.values[0] == u.values[3]);
  CHECK(l2_norm(g, s.values) == doctest::Approx(l2_norm(g, u.values)).epsilon(1e-14));
  off << 0.01;
  CHECK_THROWS_AS(shift(u, off), ConfigError);

  // |S_omega u - u| <= 2 pi |eps omega| |u| (1 + h) for the sine mode.
  GridFunction sn = GridFunction::sample(g, [](const Vec& x) { return std::sin(2 * M_PI * x[0]); });
  for (int k = 1; k <= 8; ++k) {
    off << static_cast<double>(k) / 64;
    double lhs = l2_norm(g, shift(sn, off).values - sn.values);
    CHECK(lhs <= 2 * M_PI * off[0] * l2_norm(g, sn.values) * (1.0 + g.h()));
  }
}

TEST_CASE("Steklov smoothing") {
  SUBCASE("contraction on random grid functions") {
    for (int d : {1, 2}) {
      SmoothingSpec spec = make_smoothing_spec(d, 4, 8, 8, 3);
      TorusGrid g = fine_grid(d, 4, 8);
      for (std::uint64_t s = 1; s <= 100; ++s) {
        GridFunction u(g, random_vector(g.size(), s));
        CHECK(l2_norm(g, steklov(u, spec).values) <= l2_norm(g, u.values) * (1.0 + 1e-14));
      }
    }
  }
  SUBCASE("constants are preserved, weights sum to one") {
    SmoothingSpec spec = make_smoothing_spec(2, 4, 8, 4, 3);
    double w = 0.0;
    for (double x : spec.weights) w += x;
    CHECK(w == doctest::Approx(1.0).epsilon(1e-15));
    TorusGrid g = fine_grid(2, 4, 8);
    GridFunction c(g, Eigen::VectorXd::Constant(g.size(), 2.5));
    CHECK((steklov(c, spec).values.array() - 2.5).abs().maxCoeff() < 1e-14);
  }
  SUBCASE("sinc multiplier on the sine mode") {
    for (int k : {4, 8, 16}) {
      const int nf = 16;
      SmoothingSpec spec = make_smoothing_spec(1, k, nf, nf, 3);
      TorusGrid g = fine_grid(1, k, nf);
      GridFunction u = GridFunction::sample(g, [](const Vec& x) { return std::sin(2 * M_PI * x[0]); });
      GridFunction s = steklov(u, spec);
      double mult = s.values.dot(u.values) / u.values.squaredNorm();
      double pe = M_PI / k;
      double sinc = std::sin(pe) / pe;
      // Trapezoid error bound: (2 pi eps)^2 / (12 m^2).
      double bound = std::pow(2 * pe, 2) / (12.0 * nf * nf);
      CHECK(std::abs(mult - sinc) <= bound);
      CHECK((s.values - mult * u.values).cwiseAbs().maxCoeff() < 1e-13);
    }
  }
  SUBCASE("second-order smoothing error on smooth modes") {
    std::vector<double> eps, err;
    for (int k : {4, 8, 16, 32}) {
      SmoothingSpec spec = make_smoothing_spec(1, k, 16, 16, 3);
      TorusGrid g = fine_grid(1, k, 16);
      GridFunction u = GridFunction::sample(g, [](const Vec& x) { return std::sin(2 * M_PI * x[0]); });
      eps.push_back(1.0 / k);
      err.push_back(l2_norm(g, steklov(u, spec).values - u.values));
    }
    CHECK(fit_rate(eps, err).slope >= 1.9);
  }
  SUBCASE("invalid specs") {
    CHECK_THROWS_AS(make_smoothing_spec(1, 4, 16, 5, 3), ConfigError);
    CHECK_THROWS_AS(make_smoothing_spec(3, 4, 16, 16, 3), ConfigError);
    SmoothingSpec spec = make_smoothing_spec(1, 4, 16, 16, 3);
    CHECK_THROWS_AS(steklov(GridFunction::zeros(TorusGrid(1, 32)), spec), ConfigError);
  }
}

TEST_CASE("corrector tensors: the two forms agree on every family") {
  for (const std::string& name : builtin_family_names()) {
    CAPTURE(name);
    SweepContext ctx = make_sweep_context(small_config(name), 1);
    CHECK(ctx.coeffs.max_form_defect <= 1e-10);
  }
  SweepContext ctx = make_sweep_context(small_config("periodic_only", {{"dim", 2}}), 1);
  CHECK(ctx.coeffs.max_form_defect <= 1e-10);
}

TEST_CASE("degeneration: constant coefficients") {
  SweepContext ctx = make_sweep_context(small_config("constant", {{"dim", 2}, {"a12", 0.3}}), 1);
  CHECK(ctx.coeffs.max_abs() < 1e-13);
  EpsOperators ops = build_eps_operators(ctx, 2);
  CHECK(max_abs_apply(ops.K(), 1) < 1e-12);
  CHECK(max_abs_apply(ops.Ktilde(), 2) < 1e-12);
  CHECK(max_abs_apply(ops.L(), 3) < 1e-12);
  CHECK(max_abs_apply(ops.Mop(), 4) < 1e-12);
  CHECK(max_abs_apply(ops.C(), 5) < 1e-12);
}

TEST_CASE("degeneration: periodic_only") {
  for (int d : {1, 2}) {
    SweepContext ctx = make_sweep_context(small_config("periodic_only", {{"dim", static_cast<double>(d)}}), 1);
    CHECK(ctx.coeffs.c2.cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ctx.coeffs.c2t.cwiseAbs().maxCoeff() < 1e-12);
    EpsOperators ops = build_eps_operators(ctx, 2);
    auto chat = double_averaged_matrix(ctx.field, *ops.table, ops.spec);
    double m = 0.0;
    for (const Mat& c : chat) m = std::max(m, c.cwiseAbs().maxCoeff());
    CHECK(m == 0.0);
    CHECK(max_abs_apply(ops.Mop(), 1) == 0.0);
  }
}

TEST_CASE("symmetric coefficients: Kt equals K and C = K + K^T") {
  SweepContext ctx = make_sweep_context(small_config("periodic_only", {{"dim", 2}}), 1);
  EpsOperators ops = build_eps_operators(ctx, 2);
  Eigen::MatrixXd K = ops.K().to_dense(), Kt = ops.Ktilde().to_dense();
  CHECK((K - Kt).cwiseAbs().maxCoeff() <= 1e-10 * K.cwiseAbs().maxCoeff());
  CHECK(max_abs_apply(ops.L(), 1) < 1e-10 * max_abs_apply(ops.K(), 1));
  Eigen::MatrixXd C = ops.C().to_dense();
  CHECK((C - (K + K.transpose())).cwiseAbs().maxCoeff() <= 1e-10 * K.cwiseAbs().maxCoeff());
}

TEST_CASE("nonsymmetric family: Kt differs from K") {
  SweepContext ctx = make_sweep_context(small_config("smooth_2d_nonsymmetric"), 1);
  EpsOperators ops = build_eps_operators(ctx, 2);
  Eigen::VectorXd f = random_vector(ops.fine.size(), 9);
  double diff = (ops.K().apply(f) - ops.Ktilde().apply(f)).norm();
  CHECK(diff > 1e-3 * ops.K().apply(f).norm());
}

TEST_CASE("transpose identities of the assembled operators") {
  SweepContext ctx = make_sweep_context(small_config("smooth_2d_nonsymmetric"), 1);
  EpsOperators ops = build_eps_operators(ctx, 2);
  for (const DiscreteOperator& op : {ops.K(), ops.Ktilde(), ops.Ktilde().transpose(), ops.L(), ops.Mop(), ops.C(),
                                     ops.zero_order_error(), ops.first_order_error(), ops.second_order_error()}) {
    CAPTURE(op.name());
    CHECK(transpose_defect(op, 11) <= 1e-12);
  }
  // The shared-solve error operators agree with the composed ones.
  const double eps = 0.5;
  DiscreteOperator Re = ops.R_eps->op(), R0 = ops.R_hom->op();
  DiscreteOperator E2 = Re - R0 - ops.C().scaled(eps);
  DiscreteOperator E1 = Re - R0 - ops.K().scaled(eps);
  for (std::uint64_t s : {1, 2}) {
    Eigen::VectorXd f = random_vector(ops.fine.size(), s);
    CHECK((E2.apply(f) - ops.second_order_error().apply(f)).norm() <= 1e-12 * f.norm());
    CHECK((E2.apply_transpose(f) - ops.second_order_error().apply_transpose(f)).norm() <= 1e-12 * f.norm());
    CHECK((E1.apply(f) - ops.first_order_error().apply(f)).norm() <= 1e-12 * f.norm());
    CHECK((E1.apply_transpose(f) - ops.first_order_error().apply_transpose(f)).norm() <= 1e-12 * f.norm());
  }
}

TEST_CASE("transposing L swaps the roles of the primal and adjoint blocks") {
  SweepContext ctx = make_sweep_context(small_config("smooth_2d_nonsymmetric"), 1);
  EpsOperators ops = build_eps_operators(ctx, 2);
  FineCoeffs fc = interpolate_coeffs(ctx.coeffs, ops.fine, ctx.config.slow_interp);
  FineCoeffs swapped{fc.c3t, fc.c3, fc.c2t, fc.c2};
  SlowOperators sw = assemble_slow_operators(swapped, ops.fine, 2);
  Resolvent R0t(SpMat(ops.R_hom->matrix().transpose()), "R0t");
  Eigen::MatrixXd L = assemble_L(ops.slow_ops, *ops.R_hom).to_dense();
  Eigen::MatrixXd Lsw = assemble_L(sw, R0t).to_dense();
  CHECK((L.transpose() - Lsw).cwiseAbs().maxCoeff() <= 1e-12 * L.cwiseAbs().maxCoeff());
  CHECK(L.cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("double-averaged matrix for the separable family matches a refined oracle") {
  ExperimentConfig cfg = small_config("separable_1d", {}, 32, 16);
  SweepContext ctx = make_sweep_context(cfg, 1);
  const int k = 8, nf = 16;
  EpsOperators ops = build_eps_operators(ctx, k);
  auto chat = double_averaged_matrix(ctx.field, *ops.table, ops.spec);
  const double eps = 1.0 / k;
  auto p = [](double y) { return 2.0 + std::sin(2 * M_PI * y); };
  auto s = [](double x) { return 1.0 + 0.5 * std::sin(2 * M_PI * x); };
  double worst = 0.0, scale = 0.0;
  for (Index e = 0; e < ops.fine.size(); ++e) {
    double x = (e + 0.5) / ops.fine.n;
    double y = ((e % nf) + 0.5) / nf;
    // Exact t-integral: sum_t w_t omega s'(x + t eps omega) -> (s(x + eps omega) - s(x)) / eps.
    double ref = 0.0;
    for (int i = 0; i <= nf; ++i) {
      double om = -0.5 + static_cast<double>(i) / nf;
      double w = (i == 0 || i == nf) ? 0.5 / nf : 1.0 / nf;
      double py = p(y + om);
      double one_plus_dN = kHarmonic / py;
      ref += w * one_plus_dN * one_plus_dN * py * (s(x + eps * om) - s(x)) / eps;
    }
    worst = std::max(worst, std::abs(chat[static_cast<std::size_t>(e)](0, 0) - ref));
    scale = std::max(scale, std::abs(ref));
  }
  CHECK(scale > 1e-3);
  CHECK(worst <= 1e-6);
}

TEST_CASE("smoothed corrector") {
  SweepContext ctx = make_sweep_context(small_config("separable_1d", {}, 32, 16), 1);
  SUBCASE("constant input gives zero") {
    EpsOperators ops = build_eps_operators(ctx, 4);
    GridFunction c(ops.fine, Eigen::VectorXd::Constant(ops.fine.size(), 1.5));
    CHECK(apply_corrector(*ops.Q, c).values.cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("omega grid must match the fine grid") {
    EpsOperators ops = build_eps_operators(ctx, 4);
    SmoothingSpec coarse = make_smoothing_spec(1, 4, 16, 8, 3);
    CHECK_THROWS_AS(CorrectorQuadrature(ops.table, coarse, false), ConfigError);
  }
  SUBCASE("norm of K is stable under eps halving") {
    std::vector<double> nk;
    for (int k : {4, 8, 16}) {
      EpsOperators ops = build_eps_operators(ctx, k);
      nk.push_back(operator_norm(ops.K(), 1e-6, 300, 1).value);
    }
    for (std::size_t i = 0; i + 1 < nk.size(); ++i) {
      CHECK(nk[i + 1] <= 1.5 * nk[i]);
      CHECK(nk[i + 1] >= nk[i] / 1.5);
    }
  }
}
