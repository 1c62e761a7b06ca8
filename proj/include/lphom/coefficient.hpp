#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "lphom/types.hpp"

namespace lphom {

using ParamMap = std::map<std::string, double>;

// Matrix field a(x, y): x on the unit slow torus, y in the unit cell [0,1)^d.
// Both arguments are 1-periodic in every component.
struct CoefficientField {
  std::string family;
  int dim = 1;
  std::function<Mat(const Vec& x, const Vec& y)> eval;
  // Partial derivatives in the slow variable, entry l = d a / d x_l.
  // Empty for fields without an analytic slow gradient.
  std::function<std::array<Mat, kMaxDim>(const Vec& x, const Vec& y)> grad_x;
  bool symmetric = false;
  double lambda = 1.0;       // claimed ellipticity constant
  double lipschitz_x = 0.0;  // claimed Lipschitz constant in x (spectral norm)

  Mat operator()(const Vec& x, const Vec& y) const { return eval(x, y); }
  bool has_grad_x() const { return static_cast<bool>(grad_x); }
  // True when the field does not depend on x at all.
  bool slow_independent() const { return lipschitz_x == 0.0; }
};

// Field with a(x, y) replaced by a(x, y)^T; metadata is unchanged.
CoefficientField transposed(const CoefficientField& field);

// Builtin closed-form families. Parameters and their ranges are listed in
// docs/config.md; unknown keys are rejected.
CoefficientField builtin_family(const std::string& id, const ParamMap& params = {});
std::vector<std::string> builtin_family_names();

// Ellipticity pair for a single matrix: (lambda_min of the symmetric part,
// 1 / largest singular value). The effective constant is the smaller one.
std::pair<double, double> ellipticity_bounds(const Mat& a);

struct ValidationReport {
  std::size_t samples = 0;
  double measured_lower = 0.0;      // min over samples of lambda_min(sym a)
  double measured_upper = 0.0;      // max over samples of |a|_2
  double measured_lambda = 0.0;     // min(measured_lower, 1/measured_upper)
  double measured_lipschitz = 0.0;  // max sampled |a(x,y) - a(x',y)|_2 / |x - x'|
  double max_periodicity_defect = 0.0;
  double max_asymmetry = 0.0;
  bool passed = true;
  std::vector<std::string> violations;
};

// Sampled check of the claimed metadata with 1% slack. Never throws on a
// failed check; inspect `passed` and `violations`.
ValidationReport validate_coefficient(const CoefficientField& field, std::size_t n_samples,
                                      std::uint64_t seed = 1);

}  // namespace lphom
