#pragma once

#include <complex>
#include <functional>
#include <memory>

#include "lphom/torus_grid.hpp"

namespace lphom {

// Fourier collocation tools on a TorusGrid. Holds FFT plans and scratch
// buffers, so an instance must not be shared between threads; create one
// per worker. Odd derivatives drop the Nyquist mode.
class SpectralGrid {
 public:
  explicit SpectralGrid(const TorusGrid& g);
  ~SpectralGrid();
  SpectralGrid(const SpectralGrid&) = delete;
  SpectralGrid& operator=(const SpectralGrid&) = delete;

  const TorusGrid& grid() const { return grid_; }

  Eigen::VectorXd derivative(const Eigen::VectorXd& u, int axis);
  Eigen::MatrixXd gradient(const Eigen::VectorXd& u);  // d rows
  Eigen::VectorXd divergence(const Eigen::MatrixXd& flux);  // sum_a d_a flux_a
  // Zero-mean solution of laplace(u) = f - <f>.
  Eigen::VectorXd inverse_laplacian(const Eigen::VectorXd& f);
  // Zero-mean u with -div(abar grad u) = f for a constant matrix abar.
  // Modes with every wavenumber in {0, Nyquist} are set to zero.
  Eigen::VectorXd inverse_constant_elliptic(const Eigen::VectorXd& f, const Mat& abar);

 private:
  // Applies a multiplier given the signed wavenumbers (k0, k1) and flags
  // telling whether each is the Nyquist index.
  using Symbol = std::function<std::complex<double>(int k0, int k1, bool nyq0, bool nyq1)>;
  Eigen::VectorXd apply(const Eigen::VectorXd& u, const Symbol& symbol);

  struct Plans;
  TorusGrid grid_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace lphom
