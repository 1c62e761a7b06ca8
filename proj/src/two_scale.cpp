#include "lphom/two_scale.hpp"

#include "lphom/slow_grid.hpp"

namespace lphom {

TwoScaleTable make_two_scale_table(const CellSolutions& cells, int eps_denominator, SlowInterp interp) {
  if (cells.scheme != CellScheme::Element)
    throw ConfigError("two-scale table: needs an element cell table matched to the fine grid");
  TwoScaleTable t;
  t.dim = cells.dim;
  t.eps_denominator = eps_denominator;
  t.n_f = cells.cell.n;
  t.fine = TorusGrid(cells.dim, eps_denominator * t.n_f);
  t.cell = cells.cell;
  t.quad = make_quadrature(cells.dim, cells.rule);
  const int d = cells.dim;
  const Index nodes = cells.cell.size();
  SlowInterpolator op(cells.slow, node_coordinates(t.fine), interp);
  for (int adj = 0; adj < 2; ++adj) {
    auto& dest = adj ? t.Nt : t.N;
    dest.resize(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      Eigen::MatrixXd values(cells.size(), nodes);
      for (Index s = 0; s < cells.size(); ++s) {
        const CellSample& cs = cells.samples[static_cast<std::size_t>(s)];
        values.row(s) = (adj ? cs.Nt : cs.N).col(j).transpose();
      }
      dest[static_cast<std::size_t>(j)] = op.apply(values).transpose();
    }
  }
  return t;
}

CorrectorQuadrature::CorrectorQuadrature(std::shared_ptr<const TwoScaleTable> table, const SmoothingSpec& spec,
                                         bool adjoint)
    : table_(std::move(table)), spec_(spec), adjoint_(adjoint) {
  if (spec_.n_f != table_->n_f || spec_.eps_denominator != table_->eps_denominator || spec_.dim != table_->dim)
    throw ConfigError("CorrectorQuadrature: smoothing spec does not match the two-scale table");
  if (spec_.omega_points != spec_.n_f)
    throw ConfigError("CorrectorQuadrature: the omega grid must have one point per fine step (omega_points = n_f)");
}

Eigen::VectorXd CorrectorQuadrature::apply(const Eigen::MatrixXd& grad) const {
  const TwoScaleTable& t = *table_;
  const auto& N = adjoint_ ? t.Nt : t.N;
  const Index n = t.fine.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (Index p = 0; p < n; ++p) {
    const Index r = t.cell_node(p);
    double acc = 0.0;
    for (std::size_t w = 0; w < spec_.size(); ++w) {
      const Index ps = t.fine.shifted(p, {-spec_.offsets[w][0], -spec_.offsets[w][1]});
      double s = 0.0;
      for (int j = 0; j < t.dim; ++j) s += N[static_cast<std::size_t>(j)](r, ps) * grad(ps, j);
      acc += spec_.weights[w] * s;
    }
    out[p] = acc;
  }
  return out;
}

Eigen::MatrixXd CorrectorQuadrature::apply_transpose(const Eigen::VectorXd& psi) const {
  const TwoScaleTable& t = *table_;
  const auto& N = adjoint_ ? t.Nt : t.N;
  const Index n = t.fine.size();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, t.dim);
  for (Index p = 0; p < n; ++p) {
    const Index r = t.cell_node(p);
    for (std::size_t w = 0; w < spec_.size(); ++w) {
      const Index ps = t.fine.shifted(p, {-spec_.offsets[w][0], -spec_.offsets[w][1]});
      const double v = spec_.weights[w] * psi[p];
      for (int j = 0; j < t.dim; ++j) out(ps, j) += N[static_cast<std::size_t>(j)](r, ps) * v;
    }
  }
  return out;
}

}  // namespace lphom
