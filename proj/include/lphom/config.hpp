#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lphom/coefficient.hpp"

namespace lphom {

enum class CellScheme { Auto, Spectral, Element };
enum class SlowInterp { Trig, Linear };
enum class SlowDerivative { Central, Spectral };

struct ExperimentConfig {
  // [coefficient]
  std::string family = "separable_1d";
  ParamMap params;

  // [grids]
  int slow = 32;            // slow samples per axis, n_x
  int cell = 32;            // cell points per axis, n_y (cells/effective commands)
  int fine_per_cell = 16;   // fine points per eps-cell, n_f
  CellScheme cell_scheme = CellScheme::Auto;
  SlowInterp slow_interp = SlowInterp::Trig;
  SlowDerivative slow_derivative = SlowDerivative::Central;

  // [sweep]
  std::vector<int> eps_denominators = {8, 16, 32, 64};  // eps = 1/k, k ascending
  int omega_points = 0;  // 0 means n_f
  int t_gauss = 3;

  // [solver]
  double tol = 1e-10;
  double norm_tol = 1e-7;
  int norm_max_iter = 300;
  int max_iter = 2000;
  std::uint64_t seed = 1;

  // [output]
  std::string out_dir = "out";
  std::string cell_table;  // optional cache file for the sweep cell table

  std::vector<double> eps_values() const;
  int effective_omega_points() const { return omega_points > 0 ? omega_points : fine_per_cell; }
  CoefficientField make_field() const { return builtin_family(family, params); }
};

// Parses an INI document. Errors carry the line number when the parser knows it.
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<string>");
ExperimentConfig load_config(const std::string& path);

// Checks the resolution and eps invariants; throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

// Canonical INI text: every key present, fixed section and key order.
std::string to_normalized_string(const ExperimentConfig& cfg);

std::string to_string(CellScheme s);
std::string to_string(SlowInterp s);
std::string to_string(SlowDerivative s);

}  // namespace lphom
