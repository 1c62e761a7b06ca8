#include "lphom/coefficient.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace lphom {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reads family parameters with defaults and rejects keys nobody asked for.
class ParamReader {
 public:
  ParamReader(std::string family, const ParamMap& params) : family_(std::move(family)), params_(params) {}

  double get(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  double in_range(const std::string& key, double fallback, double lo, double hi) {
    double v = get(key, fallback);
    if (!(v >= lo && v <= hi)) {
      std::ostringstream os;
      os << family_ << ": parameter " << key << " = " << v << " outside [" << lo << ", " << hi << "]";
      throw ConfigError(os.str());
    }
    return v;
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      if (!used_.count(key)) throw ConfigError(family_ + ": unknown parameter '" + key + "'");
    }
  }

 private:
  std::string family_;
  const ParamMap& params_;
  std::set<std::string> used_;
};

Mat mat1(double v) {
  Mat m(1, 1);
  m(0, 0) = v;
  return m;
}

Mat mat2(double a11, double a12, double a21, double a22) {
  Mat m(2, 2);
  m << a11, a12, a21, a22;
  return m;
}

Mat zero_mat(int d) { return Mat::Zero(d, d); }

void require_elliptic(const std::string& family, double lambda) {
  if (!(lambda > 0.0)) {
    std::ostringstream os;
    os << family << ": parameters give ellipticity constant " << lambda << " <= 0";
    throw ConfigError(os.str());
  }
}

CoefficientField make_constant(const ParamMap& params) {
  ParamReader p("constant", params);
  int d = static_cast<int>(p.in_range("dim", 1, 1, 2));
  Mat a = d == 1 ? mat1(p.get("a11", 1.0))
                 : mat2(p.get("a11", 1.0), p.get("a12", 0.0), p.get("a21", 0.0), p.get("a22", 1.0));
  p.finish();
  auto [lo, inv_hi] = ellipticity_bounds(a);
  CoefficientField f;
  f.family = "constant";
  f.dim = d;
  f.eval = [a](const Vec&, const Vec&) { return a; };
  f.grad_x = [d](const Vec&, const Vec&) {
    std::array<Mat, kMaxDim> g;
    for (auto& m : g) m = zero_mat(d);
    return g;
  };
  f.symmetric = (a - a.transpose()).norm() == 0.0;
  f.lambda = std::min(lo, inv_hi);
  f.lipschitz_x = 0.0;
  require_elliptic(f.family, f.lambda);
  return f;
}

// a(x,y) = (2 + ay sin 2 pi y)(1 + ax sin 2 pi x)
CoefficientField make_separable_1d(const ParamMap& params) {
  ParamReader p("separable_1d", params);
  double ay = p.in_range("amp_y", 1.0, 0.0, 1.9);
  double ax = p.in_range("amp_x", 0.5, 0.0, 0.9);
  p.finish();
  CoefficientField f;
  f.family = "separable_1d";
  f.dim = 1;
  f.eval = [ay, ax](const Vec& x, const Vec& y) {
    return mat1((2.0 + ay * std::sin(kTwoPi * y[0])) * (1.0 + ax * std::sin(kTwoPi * x[0])));
  };
  f.grad_x = [ay, ax](const Vec& x, const Vec& y) {
    std::array<Mat, kMaxDim> g;
    g[0] = mat1((2.0 + ay * std::sin(kTwoPi * y[0])) * ax * kTwoPi * std::cos(kTwoPi * x[0]));
    g[1] = mat1(0.0);
    return g;
  };
  f.symmetric = true;
  f.lambda = std::min((2.0 - ay) * (1.0 - ax), 1.0 / ((2.0 + ay) * (1.0 + ax)));
  f.lipschitz_x = (2.0 + ay) * ax * kTwoPi;
  require_elliptic(f.family, f.lambda);
  return f;
}

// a(x,y) = s(x1) diag(alpha(y1), beta(y1)), two phases y1 in [0,1/2) and
// [1/2,1), s(x1) = 1 + slow_amp sin 2 pi x1.
CoefficientField make_laminate_2d(const ParamMap& params) {
  ParamReader p("laminate_2d", params);
  double a1 = p.in_range("alpha1", 1.0, 1e-3, 1e3);
  double a2 = p.in_range("alpha2", 4.0, 1e-3, 1e3);
  double b1 = p.in_range("beta1", 2.0, 1e-3, 1e3);
  double b2 = p.in_range("beta2", 1.0, 1e-3, 1e3);
  double k = p.in_range("slow_amp", 0.25, 0.0, 0.9);
  p.finish();
  auto phase_one = [](double y1) { return y1 - std::floor(y1) < 0.5; };
  CoefficientField f;
  f.family = "laminate_2d";
  f.dim = 2;
  f.eval = [=](const Vec& x, const Vec& y) {
    double s = 1.0 + k * std::sin(kTwoPi * x[0]);
    bool one = phase_one(y[0]);
    return mat2(s * (one ? a1 : a2), 0.0, 0.0, s * (one ? b1 : b2));
  };
  f.grad_x = [=](const Vec& x, const Vec& y) {
    double ds = k * kTwoPi * std::cos(kTwoPi * x[0]);
    bool one = phase_one(y[0]);
    std::array<Mat, kMaxDim> g;
    g[0] = mat2(ds * (one ? a1 : a2), 0.0, 0.0, ds * (one ? b1 : b2));
    g[1] = zero_mat(2);
    return g;
  };
  f.symmetric = true;
  double lo = std::min({a1, a2, b1, b2});
  double hi = std::max({a1, a2, b1, b2});
  f.lambda = std::min(lo * (1.0 - k), 1.0 / (hi * (1.0 + k)));
  f.lipschitz_x = hi * kTwoPi * k;
  require_elliptic(f.family, f.lambda);
  return f;
}

// Smooth nonsymmetric 2D field. With m = slow_amp:
//   a11 = 2 + s1(x) sin 2 pi y1,  s1 = (1 + m sin 2 pi x1)/2
//   a22 = 2 + s2(x) cos 2 pi y2,  s2 = (1 + m cos 2 pi x2)/2
//   a12 = t(x) sin 2 pi (y1+y2) + g(x) cos 2 pi y1
//   a21 = t(x) sin 2 pi (y1+y2) - g(x) cos 2 pi y1
//   t = sym_amp (1 + m sin 2 pi (x1+x2)),  g = skew (1 + m sin 2 pi x2)
CoefficientField make_smooth_2d(const std::string& family, const ParamMap& params, bool slow) {
  ParamReader p(family, params);
  double m = slow ? p.in_range("slow_amp", 0.5, 0.0, 1.0) : 0.0;
  double tau = p.in_range("sym_amp", 0.3, 0.0, 1.0);
  double gam = p.in_range("skew", slow ? 0.5 : 0.0, 0.0, 2.0);
  p.finish();
  CoefficientField f;
  f.family = family;
  f.dim = 2;
  f.eval = [=](const Vec& x, const Vec& y) {
    double s1 = 0.5 * (1.0 + m * std::sin(kTwoPi * x[0]));
    double s2 = 0.5 * (1.0 + m * std::cos(kTwoPi * x[1]));
    double t = tau * (1.0 + m * std::sin(kTwoPi * (x[0] + x[1])));
    double g = gam * (1.0 + m * std::sin(kTwoPi * x[1]));
    double sym = t * std::sin(kTwoPi * (y[0] + y[1]));
    double skw = g * std::cos(kTwoPi * y[0]);
    return mat2(2.0 + s1 * std::sin(kTwoPi * y[0]), sym + skw, sym - skw,
                2.0 + s2 * std::cos(kTwoPi * y[1]));
  };
  f.grad_x = [=](const Vec& x, const Vec& y) {
    double sy1 = std::sin(kTwoPi * y[0]);
    double cy2 = std::cos(kTwoPi * y[1]);
    double sym = std::sin(kTwoPi * (y[0] + y[1]));
    double skw = std::cos(kTwoPi * y[0]);
    double ds1 = 0.5 * m * kTwoPi * std::cos(kTwoPi * x[0]);
    double ds2 = -0.5 * m * kTwoPi * std::sin(kTwoPi * x[1]);
    double dt = tau * m * kTwoPi * std::cos(kTwoPi * (x[0] + x[1]));
    double dg = gam * m * kTwoPi * std::cos(kTwoPi * x[1]);
    std::array<Mat, kMaxDim> out;
    out[0] = mat2(ds1 * sy1, dt * sym, dt * sym, 0.0);
    out[1] = mat2(0.0, dt * sym + dg * skw, dt * sym - dg * skw, ds2 * cy2);
    return out;
  };
  f.symmetric = gam == 0.0;
  // Gershgorin on the symmetric part; Frobenius bound for |a|_2.
  double amp = 0.5 * (1.0 + m);
  double tmax = tau * (1.0 + m);
  double gmax = gam * (1.0 + m);
  double lower = 2.0 - amp - tmax;
  double upper = std::sqrt(2.0 * (2.0 + amp) * (2.0 + amp) + 2.0 * (tmax + gmax) * (tmax + gmax));
  f.lambda = std::min(lower, 1.0 / upper);
  // Entrywise Lipschitz constants combined in Frobenius norm.
  double l_diag = 0.5 * m * kTwoPi;
  double l_off = tau * m * kTwoPi * std::sqrt(2.0) + gam * m * kTwoPi;
  f.lipschitz_x = std::sqrt(2.0 * l_diag * l_diag + 2.0 * l_off * l_off);
  require_elliptic(f.family, f.lambda);
  return f;
}

// 1D: a(y) = 2 + amp sin 2 pi y. 2D: smooth_2d without slow dependence.
CoefficientField make_periodic_only(const ParamMap& params) {
  ParamMap rest = params;
  int d = 1;
  if (auto it = rest.find("dim"); it != rest.end()) {
    if (it->second != 1.0 && it->second != 2.0) throw ConfigError("periodic_only: dim must be 1 or 2");
    d = static_cast<int>(it->second);
    rest.erase(it);
  }
  if (d == 2) return make_smooth_2d("periodic_only", rest, false);
  ParamReader p("periodic_only", rest);
  double amp = p.in_range("amp", 1.0, 0.0, 1.9);
  p.finish();
  CoefficientField f;
  f.family = "periodic_only";
  f.dim = 1;
  f.eval = [amp](const Vec&, const Vec& y) { return mat1(2.0 + amp * std::sin(kTwoPi * y[0])); };
  f.grad_x = [](const Vec&, const Vec&) {
    std::array<Mat, kMaxDim> g;
    g[0] = mat1(0.0);
    g[1] = g[0];
    return g;
  };
  f.symmetric = true;
  f.lambda = std::min(2.0 - amp, 1.0 / (2.0 + amp));
  f.lipschitz_x = 0.0;
  require_elliptic(f.family, f.lambda);
  return f;
}

std::string format_point(const Vec& v) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ")";
  return os.str();
}

}  // namespace

std::pair<double, double> ellipticity_bounds(const Mat& a) {
  Mat sym = 0.5 * (a + a.transpose());
  double lo = Eigen::SelfAdjointEigenSolver<Mat>(sym, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  double smax = Eigen::JacobiSVD<Mat>(a).singularValues()(0);
  return {lo, smax > 0.0 ? 1.0 / smax : INFINITY};
}

CoefficientField transposed(const CoefficientField& field) {
  CoefficientField t = field;
  auto eval = field.eval;
  t.eval = [eval](const Vec& x, const Vec& y) -> Mat { return eval(x, y).transpose(); };
  if (field.grad_x) {
    auto grad = field.grad_x;
    t.grad_x = [grad](const Vec& x, const Vec& y) {
      auto g = grad(x, y);
      for (auto& m : g) m.transposeInPlace();
      return g;
    };
  }
  return t;
}

std::vector<std::string> builtin_family_names() {
  return {"constant", "separable_1d", "laminate_2d", "smooth_2d_nonsymmetric", "periodic_only"};
}

CoefficientField builtin_family(const std::string& id, const ParamMap& params) {
  if (id == "constant") return make_constant(params);
  if (id == "separable_1d") return make_separable_1d(params);
  if (id == "laminate_2d") return make_laminate_2d(params);
  if (id == "smooth_2d_nonsymmetric") return make_smooth_2d(id, params, true);
  if (id == "periodic_only") return make_periodic_only(params);
  throw ConfigError("unknown coefficient family '" + id + "'");
}

ValidationReport validate_coefficient(const CoefficientField& field, std::size_t n_samples,
                                      std::uint64_t seed) {
  if (n_samples < 1) throw ConfigError("validate_coefficient: n_samples must be >= 1");
  const int d = field.dim;
  const double slack = 0.01;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_point = [&] {
    Vec v(d);
    for (int i = 0; i < d; ++i) v[i] = unit(rng);
    return v;
  };

  ValidationReport r;
  r.samples = n_samples;
  r.measured_lower = INFINITY;
  auto fail = [&r](const std::string& what, const Vec& x, const Vec& y) {
    r.passed = false;
    if (r.violations.size() < 20)
      r.violations.push_back(what + " at x = " + format_point(x) + ", y = " + format_point(y));
  };

  for (std::size_t s = 0; s < n_samples; ++s) {
    Vec x = random_point();
    Vec y = random_point();
    Mat a = field.eval(x, y);
    auto [lo, inv_hi] = ellipticity_bounds(a);
    double hi = 1.0 / inv_hi;
    r.measured_lower = std::min(r.measured_lower, lo);
    r.measured_upper = std::max(r.measured_upper, hi);
    if (lo < field.lambda * (1.0 - slack)) {
      std::ostringstream os;
      os << "ellipticity: lambda_min(sym a) = " << lo << " < claimed " << field.lambda;
      fail(os.str(), x, y);
    }
    if (hi > (1.0 + slack) / field.lambda) {
      std::ostringstream os;
      os << "boundedness: |a| = " << hi << " > 1/lambda = " << 1.0 / field.lambda;
      fail(os.str(), x, y);
    }

    double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
    r.max_asymmetry = std::max(r.max_asymmetry, asym);
    if (field.symmetric && asym != 0.0) fail("symmetric flag set but a != a^T", x, y);

    double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    for (int i = 0; i < d; ++i) {
      Vec xs = x, ys = y;
      xs[i] += 1.0;
      ys[i] += 1.0;
      double defect = std::max((field.eval(xs, y) - a).cwiseAbs().maxCoeff(),
                               (field.eval(x, ys) - a).cwiseAbs().maxCoeff()) / scale;
      r.max_periodicity_defect = std::max(r.max_periodicity_defect, defect);
      if (defect > 1e-12) fail("periodicity defect " + std::to_string(defect), x, y);
    }

    // Lipschitz quotient against a nearby and a distant slow point.
    for (double radius : {1e-3, 0.25}) {
      Vec dir = random_point().array() - 0.5;
      if (dir.norm() == 0.0) continue;
      Vec x2 = x + radius * unit(rng) * dir / dir.norm();
      double dist = (x2 - x).norm();
      if (dist == 0.0) continue;
      double q = Eigen::JacobiSVD<Mat>(field.eval(x2, y) - a).singularValues()(0) / dist;
      r.measured_lipschitz = std::max(r.measured_lipschitz, q);
      if (q > field.lipschitz_x * (1.0 + slack) + 1e-12) {
        std::ostringstream os;
        os << "Lipschitz quotient " << q << " > claimed " << field.lipschitz_x;
        fail(os.str(), x, y);
      }
    }
  }
  r.measured_lambda = std::min(r.measured_lower, 1.0 / r.measured_upper);
  return r;
}

}  // namespace lphom
