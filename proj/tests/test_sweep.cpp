#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lphom/sweep.hpp"

using namespace lphom;

namespace {

std::string read(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig sweep_config(const std::string& family) {
  ExperimentConfig c;
  c.family = family;
  c.slow = 16;
  c.fine_per_cell = 16;
  c.eps_denominators = {4, 8, 16, 32};
  return c;
}

}  // namespace

TEST_CASE("fit_rate") {
  std::vector<double> eps = {1.0 / 8, 1.0 / 16, 1.0 / 32, 1.0 / 64};
  std::vector<double> e1, e2, e3;
  for (double e : eps) {
    e1.push_back(e);
    e2.push_back(e * e);
    e3.push_back(3.0 * std::pow(e, 1.5));
  }
  RateFit f1 = fit_rate(eps, e1);
  CHECK(f1.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f1.residual < 1e-12);
  CHECK(fit_rate(eps, e2).slope == doctest::Approx(2.0).epsilon(1e-12));
  RateFit f3 = fit_rate(eps, e3);
  CHECK(f3.slope == doctest::Approx(1.5).epsilon(1e-12));
  CHECK(f3.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK_THROWS_AS(fit_rate({0.5, 0.25}, {1.0, 0.5}), ValidationError);
  CHECK_THROWS_AS(fit_rate(eps, {1.0, 0.0, 0.5, 0.1}), ValidationError);
}

TEST_CASE("empty report") {
  ConvergenceReport rep;
  rep.family = "constant";
  auto dir = std::filesystem::temp_directory_path() / "lphom_empty_report";
  emit_report(rep, dir.string());
  CHECK(read(dir / "convergence.csv") == "eps,E0,E1,E2\n");
  CHECK(read(dir / "summary.txt").find("no data") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("unwritable output path") {
  ConvergenceReport rep;
  CHECK_THROWS_AS(emit_report(rep, "/proc/lphom_cannot_write"), Error);
}

TEST_CASE("separable sweep: report structure, orderings and determinism") {
  ExperimentConfig cfg = sweep_config("separable_1d");
  ConvergenceReport rep = run_sweep(cfg, 1, 1);
  REQUIRE(rep.complete());
  REQUIRE(rep.points.size() == 4);
  for (std::size_t i = 0; i + 1 < rep.points.size(); ++i) CHECK(rep.points[i].eps > rep.points[i + 1].eps);
  for (const SweepPoint& p : rep.points) {
    CHECK(p.E0 > 0.0);
    CHECK(p.E1 > 0.0);
    CHECK(p.E2 > 0.0);
    if (p.eps <= 1.0 / 16) CHECK(p.E2 <= p.E0);
  }
  for (int c = 0; c < 3; ++c) CHECK(rep.has_fit[c]);
  CHECK(rep.fits[2].slope >= rep.fits[0].slope + 0.5);

  auto dir = std::filesystem::temp_directory_path() / "lphom_sweep_report";
  emit_report(rep, dir.string());
  std::string csv = read(dir / "convergence.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(read(dir / "summary.txt").find("slope") != std::string::npos);
  CHECK(read(dir / "plot.dat").find("log(eps)") != std::string::npos);
  CHECK(read(dir / "timings.csv").find("wall_ms") != std::string::npos);

  ConvergenceReport again = run_sweep(cfg, 2, 1);
  CHECK(convergence_csv(again) == csv);
  std::filesystem::remove_all(dir);
}

TEST_CASE("constant family sits at the discretization floor") {
  ExperimentConfig cfg = sweep_config("constant");
  cfg.eps_denominators = {4, 8, 16};
  ConvergenceReport rep = run_sweep(cfg, 1, 1);
  REQUIRE(rep.complete());
  for (const SweepPoint& p : rep.points) CHECK(p.E0 <= kFloor);
  CHECK(rep.at_floor[0]);
  CHECK_FALSE(rep.has_fit[0]);
  CHECK(summary_text(rep).find("floor") != std::string::npos);
}
