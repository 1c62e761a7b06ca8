#include "lphom/smoothing.hpp"

#include <cmath>
#include <sstream>

#include "lphom/linalg.hpp"

namespace lphom {

SmoothingSpec make_smoothing_spec(int dim, int eps_denominator, int n_f, int omega_points, int t_gauss) {
  if (dim != 1 && dim != 2) throw ConfigError("SmoothingSpec: dimension must be 1 or 2");
  if (eps_denominator < 2) throw ConfigError("SmoothingSpec: eps must be 1/k with k >= 2");
  if (omega_points < 1 || n_f % omega_points != 0)
    throw ConfigError("SmoothingSpec: omega points must divide the points per eps-cell");
  if (n_f % 2 != 0) throw ConfigError("SmoothingSpec: points per eps-cell must be even");
  SmoothingSpec s;
  s.dim = dim;
  s.eps_denominator = eps_denominator;
  s.n_f = n_f;
  s.omega_points = omega_points;
  const int m = omega_points;
  const long stride = n_f / m;
  std::vector<double> w1(static_cast<std::size_t>(m + 1), 1.0 / m);
  w1.front() *= 0.5;
  w1.back() *= 0.5;
  const int count1 = m + 1;
  const int total = dim == 1 ? count1 : count1 * count1;
  for (int idx = 0; idx < total; ++idx) {
    int s0 = idx % count1, s1 = idx / count1;
    Vec om(dim);
    om[0] = -0.5 + static_cast<double>(s0) / m;
    double w = w1[static_cast<std::size_t>(s0)];
    std::array<long, 2> off{s0 * stride - n_f / 2, 0};
    if (dim == 2) {
      om[1] = -0.5 + static_cast<double>(s1) / m;
      w *= w1[static_cast<std::size_t>(s1)];
      off[1] = s1 * stride - n_f / 2;
    }
    s.omega.push_back(om);
    s.weights.push_back(w);
    s.offsets.push_back(off);
  }
  auto [t, tw] = gauss_legendre01(t_gauss);
  s.t_nodes = t;
  s.t_weights = tw;
  return s;
}

Eigen::VectorXd shift_steps(const TorusGrid& g, const Eigen::VectorXd& u, const std::array<long, 2>& steps) {
  Eigen::VectorXd out(g.size());
  for (Index k = 0; k < g.size(); ++k) out[k] = u[g.shifted(k, steps)];
  return out;
}

GridFunction shift(const GridFunction& u, const Vec& offset) {
  const TorusGrid& g = u.grid;
  if (offset.size() != g.dim) throw ConfigError("shift: offset dimension mismatch");
  std::array<long, 2> steps{0, 0};
  for (int a = 0; a < g.dim; ++a) {
    double s = offset[a] * g.n;
    double r = std::round(s);
    if (std::abs(s - r) > 1e-9 * std::max(1.0, std::abs(s))) {
      std::ostringstream os;
      os << "shift: offset component " << offset[a] << " is not on the grid (spacing " << g.h() << ")";
      throw ConfigError(os.str());
    }
    steps[a] = static_cast<long>(r);
  }
  return GridFunction(g, shift_steps(g, u.values, steps));
}

GridFunction steklov(const GridFunction& u, const SmoothingSpec& spec) {
  const TorusGrid& g = u.grid;
  if (g.dim != spec.dim || g.n != spec.eps_denominator * spec.n_f)
    throw ConfigError("steklov: smoothing spec does not match the grid");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
  for (std::size_t w = 0; w < spec.size(); ++w) {
    std::array<long, 2> back{-spec.offsets[w][0], -spec.offsets[w][1]};
    out += spec.weights[w] * shift_steps(g, u.values, back);
  }
  return GridFunction(g, out);
}

}  // namespace lphom
