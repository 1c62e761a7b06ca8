#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lphom/config.hpp"
#include "lphom/correctors.hpp"

namespace lphom {

struct StageTime {
  std::string stage;
  double wall_ms = 0.0;
};

struct SweepPoint {
  int eps_denominator = 0;
  double eps = 0.0;
  double E0 = 0.0, E1 = 0.0, E2 = 0.0;
  int iterations0 = 0, iterations1 = 0, iterations2 = 0;
  bool ok = false;
  std::string failed_stage;  // set when !ok
  std::string error;
  int error_code = 0;  // exit code class of the failure (2 or 3)
  std::vector<StageTime> timings;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;  // log prefactor
  double residual = 0.0;   // RMS of the log residuals
};

// Least squares of log E against log eps. Needs >= 3 points, all positive.
RateFit fit_rate(const std::vector<double>& eps, const std::vector<double>& errors);

struct ConvergenceReport {
  std::string config_snapshot;
  int dim = 1;
  std::string family;
  std::vector<SweepPoint> points;  // eps strictly decreasing
  double cell_ms = 0.0;
  // Cell-table diagnostics.
  double max_cell_residual = 0.0;
  double max_form_defect = 0.0;
  double max_coeff = 0.0;
  // Slopes; a curve at the discretization floor (all values <= floor) is not fitted.
  bool has_fit[3] = {false, false, false};
  bool at_floor[3] = {false, false, false};
  RateFit fits[3];

  bool complete() const;
};

// Values at or below this are treated as the discretization floor.
inline constexpr double kFloor = 1e-11;

// Everything built for one eps: resolvents and correctors.
struct EpsOperators {
  int eps_denominator = 0;
  TorusGrid fine;
  std::shared_ptr<Resolvent> R_eps, R_hom;
  std::shared_ptr<const TwoScaleTable> table;
  SmoothingSpec spec;
  std::shared_ptr<CorrectorQuadrature> Q, Qt;
  SlowOperators slow_ops;
  SpMat M;
  SpMat Lc;     // L3 - L2 + (Lt3 - Lt2)^T
  SpMat gram;   // H1 Gram matrix of the fine grid

  DiscreteOperator K() const;
  DiscreteOperator Ktilde() const;
  DiscreteOperator L() const;
  DiscreteOperator Mop() const;
  DiscreteOperator C() const;  // K + Kt^* - L - M
  // R_eps - R_0, R_eps - R_0 - eps K, R_eps - R_0 - eps C with shared solves.
  DiscreteOperator zero_order_error() const;
  DiscreteOperator first_order_error() const;
  DiscreteOperator second_order_error() const;
};

// Shared eps-independent data of a sweep.
struct SweepContext {
  ExperimentConfig config;
  CoefficientField field;
  CellSolutions cells;
  HomogenizedField hom, hom_t;
  FluxCorrector fc, fct;
  CorrectorCoeffs coeffs;
};

// Cell table for the sweep: element scheme on one eps-cell of the fine grid.
CellSolutions sweep_cell_table(const ExperimentConfig& cfg, const CoefficientField& field, int jobs);
SweepContext make_sweep_context(const ExperimentConfig& cfg, int jobs);
EpsOperators build_eps_operators(const SweepContext& ctx, int eps_denominator);

ConvergenceReport run_sweep(const ExperimentConfig& cfg, int jobs, std::uint64_t seed);

// Files: convergence.csv (eps, E0, E1, E2), timings.csv, summary.txt,
// plot.dat (log-log pairs). Creates the directory if needed.
void emit_report(const ConvergenceReport& report, const std::string& out_dir);
std::string convergence_csv(const ConvergenceReport& report);
std::string summary_text(const ConvergenceReport& report);

}  // namespace lphom
