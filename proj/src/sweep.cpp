#include "lphom/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <thread>

namespace lphom {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

bool compatible(const CellSolutions& c, const CellTableSpec& s) {
  return c.slow == s.slow && c.cell == s.cell && c.scheme == s.scheme && c.rule == s.rule &&
         c.slow_derivative == s.slow_derivative;
}

}  // namespace

RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& errors) {
  if (eps.size() != errors.size()) throw ValidationError("fit_rate: eps and error lists differ in length");
  if (eps.size() < 3) throw ValidationError("fit_rate: needs at least 3 points");
  const std::size_t n = eps.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(eps[i] > 0.0)) throw ValidationError("fit_rate: eps values must be positive");
    if (!(errors[i] > 0.0)) {
      std::ostringstream os;
      os << "fit_rate: error " << errors[i] << " at eps " << eps[i]
         << " is not positive (discretization floor; refine the grid)";
      throw ValidationError(os.str());
    }
    lx[i] = std::log(eps[i]);
    ly[i] = std::log(errors[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) sxx += (lx[i] - mx) * (lx[i] - mx), sxy += (lx[i] - mx) * (ly[i] - my);
  if (sxx == 0.0) throw ValidationError("fit_rate: eps values must not all coincide");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r = ly[i] - (f.intercept + f.slope * lx[i]);
    ss += r * r;
  }
  f.residual = std::sqrt(ss / n);
  return f;
}

bool ConvergenceReport::complete() const {
  for (const SweepPoint& p : points)
    if (!p.ok) return false;
  return true;
}

CellSolutions sweep_cell_table(const ExperimentConfig& cfg, const CoefficientField& field, int jobs) {
  const int d = field.dim;
  CellTableSpec spec;
  spec.slow = TorusGrid(d, cfg.slow);
  spec.cell = TorusGrid(d, cfg.fine_per_cell);
  spec.scheme = CellScheme::Element;
  spec.rule = default_rule(d);
  spec.slow_derivative = cfg.slow_derivative;
  spec.tol = cfg.tol;
  spec.max_iter = cfg.max_iter;
  spec.jobs = jobs;
  if (!cfg.cell_table.empty() && std::filesystem::exists(cfg.cell_table)) {
    CellSolutions c = load_cell_table(cfg.cell_table);
    if (c.dim == d && compatible(c, spec)) return c;
  }
  CellSolutions c = build_cell_table(field, spec);
  if (!cfg.cell_table.empty()) save_cell_table(c, cfg.cell_table);
  return c;
}

SweepContext make_sweep_context(const ExperimentConfig& cfg, int jobs) {
  validate_config(cfg);
  SweepContext ctx;
  ctx.config = cfg;
  ctx.field = cfg.make_field();
  ctx.cells = sweep_cell_table(cfg, ctx.field, jobs);
  ctx.hom = effective_matrix(ctx.cells, ctx.field, false, cfg.slow_interp);
  ctx.hom_t = effective_matrix(ctx.cells, ctx.field, true, cfg.slow_interp);
  ctx.fc = flux_corrector(ctx.cells, ctx.field, ctx.hom, cfg.tol);
  ctx.fct = flux_corrector(ctx.cells, ctx.field, ctx.hom_t, cfg.tol);
  ctx.coeffs = corrector_coeffs(ctx.cells, ctx.fc, ctx.fct, ctx.field, ctx.hom);
  return ctx;
}

EpsOperators build_eps_operators(const SweepContext& ctx, int k) {
  const ExperimentConfig& cfg = ctx.config;
  const int d = ctx.field.dim;
  EpsOperators ops;
  ops.eps_denominator = k;
  ops.fine = fine_grid(d, k, cfg.fine_per_cell);
  ops.R_eps = std::make_shared<Resolvent>(assemble_fine(ctx.field, k, ops.fine), "R_eps");
  ops.R_hom = std::make_shared<Resolvent>(assemble_homogenized(ctx.hom, ops.fine), "R_0");
  ops.table = std::make_shared<const TwoScaleTable>(make_two_scale_table(ctx.cells, k, cfg.slow_interp));
  ops.spec = make_smoothing_spec(d, k, cfg.fine_per_cell, cfg.effective_omega_points(), cfg.t_gauss);
  ops.Q = std::make_shared<CorrectorQuadrature>(ops.table, ops.spec, false);
  ops.Qt = std::make_shared<CorrectorQuadrature>(ops.table, ops.spec, true);
  ops.slow_ops = assemble_slow_operators(interpolate_coeffs(ctx.coeffs, ops.fine, cfg.slow_interp), ops.fine, d);
  ops.Lc = ops.slow_ops.combined();
  ops.M = assemble_M_matrix(double_averaged_matrix(ctx.field, *ops.table, ops.spec), ops.fine);
  ops.gram = h1_gram(ops.fine);
  return ops;
}

DiscreteOperator EpsOperators::K() const { return corrector_K(*Q, *R_hom, fine); }
DiscreteOperator EpsOperators::Ktilde() const { return corrector_Ktilde(*Qt, *R_hom, fine); }
DiscreteOperator EpsOperators::L() const { return assemble_L(slow_ops, *R_hom); }
DiscreteOperator EpsOperators::Mop() const { return assemble_M(M, *R_hom); }
DiscreteOperator EpsOperators::C() const { return full_corrector(K(), Ktilde().transpose(), L(), Mop()); }

namespace {

Eigen::VectorXd grad_apply(const TorusGrid& g, const std::vector<SpMat>& D, const Eigen::VectorXd& u) {
  Eigen::MatrixXd out(g.size(), g.dim);
  for (int a = 0; a < g.dim; ++a) out.col(a) = D[a] * u;
  return Eigen::Map<Eigen::VectorXd>(out.data(), out.size());
}

Eigen::MatrixXd as_columns(const Eigen::VectorXd& v, Index n, int d) {
  return Eigen::Map<const Eigen::MatrixXd>(v.data(), n, d);
}

Eigen::VectorXd grad_transpose(const std::vector<SpMat>& D, const Eigen::MatrixXd& g) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.rows());
  for (std::size_t a = 0; a < D.size(); ++a) out += D[a].transpose() * g.col(static_cast<Index>(a));
  return out;
}

}  // namespace

DiscreteOperator EpsOperators::zero_order_error() const {
  auto Re = R_eps, R0 = R_hom;
  const Index n = fine.size();
  return DiscreteOperator(
      n, n, [Re, R0](const Eigen::VectorXd& f) -> Eigen::VectorXd { return Re->solve(f) - R0->solve(f); },
      [Re, R0](const Eigen::VectorXd& h) -> Eigen::VectorXd {
        return Re->solve_transpose(h) - R0->solve_transpose(h);
      },
      "R_eps-R_0");
}

DiscreteOperator EpsOperators::first_order_error() const {
  auto Re = R_eps, R0 = R_hom;
  auto q = Q;
  const TorusGrid g = fine;
  const double eps = 1.0 / eps_denominator;
  auto D = std::make_shared<std::vector<SpMat>>();
  for (int a = 0; a < g.dim; ++a) D->push_back(centered_difference(g, a));
  return DiscreteOperator(
      g.size(), g.size(),
      [=](const Eigen::VectorXd& f) -> Eigen::VectorXd {
        Eigen::VectorXd u0 = R0->solve(f);
        return Re->solve(f) - u0 - eps * q->apply(as_columns(grad_apply(g, *D, u0), g.size(), g.dim));
      },
      [=](const Eigen::VectorXd& h) -> Eigen::VectorXd {
        Eigen::VectorXd w = h + eps * grad_transpose(*D, q->apply_transpose(h));
        return Re->solve_transpose(h) - R0->solve_transpose(w);
      },
      "R_eps-R_0-eps*K");
}

// E2 f = R_eps f - u0 - eps Q_N D u0 - eps R0 [D^T Q_Nt^T f - (Lc + M) u0], u0 = R0 f.
DiscreteOperator EpsOperators::second_order_error() const {
  auto Re = R_eps, R0 = R_hom;
  auto q = Q, qt = Qt;
  const TorusGrid g = fine;
  const double eps = 1.0 / eps_denominator;
  auto D = std::make_shared<std::vector<SpMat>>();
  for (int a = 0; a < g.dim; ++a) D->push_back(centered_difference(g, a));
  auto S = std::make_shared<const SpMat>(Lc + M);
  return DiscreteOperator(
      g.size(), g.size(),
      [=](const Eigen::VectorXd& f) -> Eigen::VectorXd {
        Eigen::VectorXd u0 = R0->solve(f);
        Eigen::VectorXd inner = grad_transpose(*D, qt->apply_transpose(f)) - (*S) * u0;
        Eigen::VectorXd out = Re->solve(f) - u0 - eps * q->apply(as_columns(grad_apply(g, *D, u0), g.size(), g.dim));
        return out - eps * R0->solve(inner);
      },
      [=](const Eigen::VectorXd& h) -> Eigen::VectorXd {
        Eigen::VectorXd z = R0->solve_transpose(h);
        Eigen::VectorXd inner = grad_transpose(*D, q->apply_transpose(h)) - S->transpose() * z;
        Eigen::VectorXd out = Re->solve_transpose(h) - z - eps * R0->solve_transpose(inner);
        return out - eps * qt->apply(as_columns(grad_apply(g, *D, z), g.size(), g.dim));
      },
      "R_eps-R_0-eps*C");
}

namespace {

void run_point(const SweepContext& ctx, int k, std::uint64_t seed, SweepPoint& p) {
  const ExperimentConfig& cfg = ctx.config;
  p.eps_denominator = k;
  p.eps = 1.0 / k;
  std::string stage = "assemble";
  try {
    auto t0 = Clock::now();
    EpsOperators ops = build_eps_operators(ctx, k);
    p.timings.push_back({"assemble", ms_since(t0)});

    stage = "E0";
    t0 = Clock::now();
    NormEstimate n0 = operator_norm(ops.zero_order_error(), cfg.norm_tol, cfg.norm_max_iter, seed);
    p.E0 = n0.value;
    p.iterations0 = n0.iterations;
    p.timings.push_back({"E0", ms_since(t0)});

    stage = "E1";
    t0 = Clock::now();
    NormEstimate n1 = operator_norm(ops.first_order_error(), cfg.norm_tol, cfg.norm_max_iter, seed, &ops.gram);
    p.E1 = n1.value;
    p.iterations1 = n1.iterations;
    p.timings.push_back({"E1", ms_since(t0)});

    stage = "E2";
    t0 = Clock::now();
    NormEstimate n2 = operator_norm(ops.second_order_error(), cfg.norm_tol, cfg.norm_max_iter, seed);
    p.E2 = n2.value;
    p.iterations2 = n2.iterations;
    p.timings.push_back({"E2", ms_since(t0)});
    p.ok = true;
  } catch (const SolverError& e) {
    p.failed_stage = stage;
    p.error = e.what();
    p.error_code = 3;
  } catch (const std::exception& e) {
    p.failed_stage = stage;
    p.error = e.what();
    p.error_code = 2;
  }
}

}  // namespace

ConvergenceReport run_sweep(const ExperimentConfig& cfg, int jobs, std::uint64_t seed) {
  ConvergenceReport rep;
  rep.config_snapshot = to_normalized_string(cfg);
  rep.family = cfg.family;
  auto t0 = Clock::now();
  SweepContext ctx = make_sweep_context(cfg, jobs);
  rep.cell_ms = ms_since(t0);
  rep.dim = ctx.field.dim;
  rep.max_cell_residual = ctx.cells.max_residual;
  rep.max_form_defect = ctx.coeffs.max_form_defect;
  rep.max_coeff = ctx.coeffs.max_abs();

  // eps strictly decreasing: denominators ascending.
  std::vector<int> ks = cfg.eps_denominators;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  rep.points.resize(ks.size());
  std::atomic<std::size_t> next{0};
  // Largest grids first so the slowest point starts early.
  auto worker = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= ks.size()) return;
      std::size_t idx = ks.size() - 1 - i;
      run_point(ctx, ks[idx], seed + static_cast<std::uint64_t>(ks[idx]), rep.points[idx]);
    }
  };
  const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(ks.size())));
  std::vector<std::thread> pool;
  for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  if (rep.complete() && rep.points.size() >= 3) {
    std::vector<double> eps;
    std::vector<std::vector<double>> E(3);
    for (const SweepPoint& p : rep.points) {
      eps.push_back(p.eps);
      E[0].push_back(p.E0);
      E[1].push_back(p.E1);
      E[2].push_back(p.E2);
    }
    for (int c = 0; c < 3; ++c) {
      bool floor = false;
      for (double v : E[c]) floor = floor || v <= kFloor;
      rep.at_floor[c] = floor;
      if (!floor) {
        rep.fits[c] = fit_rate(eps, E[c]);
        rep.has_fit[c] = true;
      }
    }
  }
  return rep;
}

}  // namespace lphom
