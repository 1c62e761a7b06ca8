#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "lphom/cell_solver.hpp"
#include "lphom/homogenize.hpp"
#include "lphom/sweep.hpp"

namespace {

using namespace lphom;

struct Options {
  std::string config;
  std::string out;
  int jobs = 1;
  std::int64_t seed = -1;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed >= 0) cfg.seed = static_cast<std::uint64_t>(o.seed);
  validate_config(cfg);
  return cfg;
}

CellSolutions cells_for(const ExperimentConfig& cfg, const CoefficientField& field, int jobs) {
  CellTableSpec spec;
  spec.slow = TorusGrid(field.dim, cfg.slow);
  spec.cell = TorusGrid(field.dim, cfg.cell);
  spec.scheme = resolve_scheme(cfg.cell_scheme, field);
  spec.rule = default_rule(field.dim);
  spec.slow_derivative = cfg.slow_derivative;
  spec.tol = cfg.tol;
  spec.max_iter = cfg.max_iter;
  spec.jobs = jobs;
  return build_cell_table(field, spec);
}

int cmd_cells(const Options& o) {
  ExperimentConfig cfg = load(o);
  CoefficientField field = cfg.make_field();
  CellSolutions cells = cells_for(cfg, field, o.jobs);
  std::filesystem::create_directories(cfg.out_dir);
  std::string path = (std::filesystem::path(cfg.out_dir) / "cells.bin").string();
  save_cell_table(cells, path);
  std::cout << "cell table: " << cells.size() << " slow samples, " << cells.cell.size() << " cell nodes, scheme "
            << to_string(cells.scheme) << "\n"
            << std::setprecision(4) << "  max residual " << cells.max_residual << "\n  max |<N>| "
            << cells.max_mean << "\n  max |grad_y N|_L2 " << cells.max_gradient_norm << "\n  slow Lipschitz quotient "
            << cells.lipschitz_quotient << "\nwrote " << path << "\n";
  return 0;
}

int cmd_effective(const Options& o) {
  ExperimentConfig cfg = load(o);
  CoefficientField field = cfg.make_field();
  CellSolutions cells = cells_for(cfg, field, o.jobs);
  HomogenizedField hom = effective_matrix(cells, field, false, cfg.slow_interp);
  std::filesystem::create_directories(cfg.out_dir);
  std::string path = (std::filesystem::path(cfg.out_dir) / "effective.csv").string();
  write_effective_csv(hom, path);
  std::cout << std::setprecision(6) << "effective matrix: min ellipticity " << hom.min_ellipticity
            << ", slow Lipschitz quotient " << hom.lipschitz_quotient << "\nwrote " << path << "\n";
  return 0;
}

int cmd_sweep(const Options& o) {
  ExperimentConfig cfg = load(o);
  ConvergenceReport rep = run_sweep(cfg, o.jobs, cfg.seed);
  emit_report(rep, cfg.out_dir);
  std::cout << summary_text(rep);
  int code = 0;
  for (const SweepPoint& p : rep.points) code = std::max(code, p.ok ? 0 : p.error_code);
  return code;
}

int cmd_validate(const Options& o) {
  ExperimentConfig cfg = load(o);
  CoefficientField field = cfg.make_field();
  ValidationReport r = validate_coefficient(field, 4096, cfg.seed);
  std::cout << std::setprecision(6) << "family " << field.family << " (d = " << field.dim << ")\n"
            << "  samples " << r.samples << "\n  claimed lambda " << field.lambda << ", measured "
            << r.measured_lambda << "\n  claimed Lipschitz " << field.lipschitz_x << ", measured "
            << r.measured_lipschitz << "\n  max periodicity defect " << r.max_periodicity_defect
            << "\n  max asymmetry " << r.max_asymmetry << "\n";
  for (const std::string& v : r.violations) std::cout << "  violation: " << v << "\n";
  std::cout << (r.passed ? "passed" : "FAILED") << "\n";
  return r.passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Locally periodic homogenization experiments"};
  Options o;
  app.add_option("--config", o.config, "INI experiment file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out, "output directory (overrides [output] dir)");
  app.add_option("--jobs", o.jobs, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "seed for norm-estimation start vectors")->check(CLI::NonNegativeNumber);
  app.require_subcommand(1);
  int (*handler)(const Options&) = nullptr;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    app.add_subcommand(name, help)->fallthrough()->callback([&handler, fn] { handler = fn; });
  };
  add("cells", "build a cell table and report its diagnostics", cmd_cells);
  add("effective", "compute the effective matrix on the slow grid", cmd_effective);
  add("sweep", "run the eps convergence experiment", cmd_sweep);
  add("validate", "check the coefficient family against its claimed bounds", cmd_validate);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    return handler(o);
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
