#include "lphom/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace lphom {
namespace {

// FFTW planning is not thread-safe; execution with distinct buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace

struct SpectralGrid::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  Index n_spec = 0;
};

SpectralGrid::SpectralGrid(const TorusGrid& g) : grid_(g), plans_(std::make_unique<Plans>()) {
  const int n = g.n;
  Plans& p = *plans_;
  p.n_spec = g.dim == 1 ? n / 2 + 1 : static_cast<Index>(n) * (n / 2 + 1);
  p.real = fftw_alloc_real(static_cast<std::size_t>(g.size()));
  p.spec = fftw_alloc_complex(static_cast<std::size_t>(p.n_spec));
  std::lock_guard<std::mutex> lock(planner_mutex());
  if (g.dim == 1) {
    p.forward = fftw_plan_dft_r2c_1d(n, p.real, p.spec, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_1d(n, p.spec, p.real, FFTW_ESTIMATE);
  } else {
    // Row-major n x n with the last index fastest: FFTW's last axis is our axis 0.
    p.forward = fftw_plan_dft_r2c_2d(n, n, p.real, p.spec, FFTW_ESTIMATE);
    p.backward = fftw_plan_dft_c2r_2d(n, n, p.spec, p.real, FFTW_ESTIMATE);
  }
  if (!p.forward || !p.backward) throw SolverError("SpectralGrid: FFT planning failed");
}

SpectralGrid::~SpectralGrid() {
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plans_->forward);
  fftw_destroy_plan(plans_->backward);
  fftw_free(plans_->real);
  fftw_free(plans_->spec);
}

Eigen::VectorXd SpectralGrid::apply(const Eigen::VectorXd& u, const Symbol& symbol) {
  const int n = grid_.n;
  const Index total = grid_.size();
  Plans& p = *plans_;
  std::copy(u.data(), u.data() + total, p.real);
  fftw_execute(p.forward);
  const int half = n / 2 + 1;
  auto signed_k = [n](int k) { return k <= n / 2 ? k : k - n; };
  const int rows = grid_.dim == 1 ? 1 : n;
  for (int i1 = 0; i1 < rows; ++i1) {
    int k1 = grid_.dim == 1 ? 0 : signed_k(i1);
    bool nyq1 = grid_.dim == 2 && i1 == n / 2;
    for (int k0 = 0; k0 < half; ++k0) {
      bool nyq0 = k0 == n / 2;
      std::complex<double> m = symbol(k0, k1, nyq0, nyq1);
      fftw_complex& c = p.spec[static_cast<Index>(i1) * half + k0];
      std::complex<double> v(c[0], c[1]);
      v *= m / static_cast<double>(total);
      c[0] = v.real();
      c[1] = v.imag();
    }
  }
  fftw_execute(p.backward);
  return Eigen::Map<Eigen::VectorXd>(p.real, total);
}

Eigen::VectorXd SpectralGrid::derivative(const Eigen::VectorXd& u, int axis) {
  return apply(u, [axis](int k0, int k1, bool nyq0, bool nyq1) {
    int k = axis == 0 ? k0 : k1;
    bool nyq = axis == 0 ? nyq0 : nyq1;
    return nyq ? std::complex<double>(0.0) : std::complex<double>(0.0, kTwoPi * k);
  });
}

Eigen::MatrixXd SpectralGrid::gradient(const Eigen::VectorXd& u) {
  Eigen::MatrixXd g(grid_.dim, grid_.size());
  for (int a = 0; a < grid_.dim; ++a) g.row(a) = derivative(u, a).transpose();
  return g;
}

Eigen::VectorXd SpectralGrid::divergence(const Eigen::MatrixXd& flux) {
  Eigen::VectorXd out = derivative(flux.row(0).transpose(), 0);
  for (int a = 1; a < grid_.dim; ++a) out += derivative(flux.row(a).transpose(), a);
  return out;
}

Eigen::VectorXd SpectralGrid::inverse_laplacian(const Eigen::VectorXd& f) {
  return apply(f, [](int k0, int k1, bool, bool) {
    if (k0 == 0 && k1 == 0) return std::complex<double>(0.0);
    return std::complex<double>(-1.0 / (kTwoPi * kTwoPi * (double(k0) * k0 + double(k1) * k1)));
  });
}

Eigen::VectorXd SpectralGrid::inverse_constant_elliptic(const Eigen::VectorXd& f, const Mat& abar) {
  const int d = grid_.dim;
  return apply(f, [&abar, d](int k0, int k1, bool nyq0, bool nyq1) {
    bool trivial0 = k0 == 0 || nyq0;
    bool trivial1 = d == 1 || k1 == 0 || nyq1;
    if (trivial0 && trivial1) return std::complex<double>(0.0);
    double q = abar(0, 0) * k0 * k0;
    if (d == 2) q += (abar(0, 1) + abar(1, 0)) * k0 * k1 + abar(1, 1) * k1 * k1;
    return std::complex<double>(1.0 / (kTwoPi * kTwoPi * q));
  });
}

}  // namespace lphom
