#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "lphom/sweep.hpp"

namespace lphom {

namespace {

const char* kCurve[3] = {"E0", "E1", "E2"};

void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error("cannot write '" + p.string() + "'");
  os << text;
  if (!os) throw Error("failed writing '" + p.string() + "'");
}

}  // namespace

std::string convergence_csv(const ConvergenceReport& report) {
  std::ostringstream os;
  os << std::setprecision(10);
  os << "eps,E0,E1,E2\n";
  for (const SweepPoint& p : report.points) {
    if (!p.ok) continue;
    os << "1/" << p.eps_denominator << "," << p.E0 << "," << p.E1 << "," << p.E2 << "\n";
  }
  return os.str();
}

std::string summary_text(const ConvergenceReport& report) {
  std::ostringstream os;
  os << "family: " << report.family << " (d = " << report.dim << ")\n";
  int ok = 0;
  for (const SweepPoint& p : report.points) ok += p.ok ? 1 : 0;
  if (ok == 0) {
    os << "no data\n";
  } else {
    os << std::setprecision(4);
    os << "points: " << ok << " of " << report.points.size() << "\n";
    os << "cell table: max residual " << report.max_cell_residual << ", corrector tensor form defect "
       << report.max_form_defect << ", max |c| " << report.max_coeff << "\n";
    os << "\n   eps          E0           E1           E2\n";
    for (const SweepPoint& p : report.points) {
      if (!p.ok) continue;
      os << std::setw(6) << ("1/" + std::to_string(p.eps_denominator)) << "  " << std::scientific << std::setw(11)
         << p.E0 << "  " << std::setw(11) << p.E1 << "  " << std::setw(11) << p.E2 << std::defaultfloat << "\n";
    }
    os << "\nfitted rates (E = C eps^s):\n";
    for (int c = 0; c < 3; ++c) {
      os << "  " << kCurve[c] << ": ";
      if (report.has_fit[c])
        os << "slope " << std::fixed << std::setprecision(3) << report.fits[c].slope << ", prefactor C "
           << std::setprecision(4) << std::exp(report.fits[c].intercept) << ", log residual "
           << std::scientific << std::setprecision(2) << report.fits[c].residual << std::defaultfloat;
      else if (report.at_floor[c])
        os << "floor (values at or below " << kFloor << "; slope not meaningful)";
      else
        os << "not fitted (fewer than 3 complete points)";
      os << "\n";
    }
  }
  bool failed = false;
  for (const SweepPoint& p : report.points)
    if (!p.ok) {
      if (!failed) os << "\nfailures:\n";
      failed = true;
      os << "  eps 1/" << p.eps_denominator << " at stage " << p.failed_stage << ": " << p.error << "\n";
    }
  os << "\nconfig:\n" << report.config_snapshot;
  return os.str();
}

void emit_report(const ConvergenceReport& report, const std::string& out_dir) {
  std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + out_dir + "': " + ec.message());
  write_file(dir / "convergence.csv", convergence_csv(report));

  std::ostringstream t;
  t << std::fixed << std::setprecision(1) << "eps,stage,wall_ms\n";
  t << "all,cells," << report.cell_ms << "\n";
  for (const SweepPoint& p : report.points)
    for (const StageTime& s : p.timings) t << "1/" << p.eps_denominator << "," << s.stage << "," << s.wall_ms << "\n";
  write_file(dir / "timings.csv", t.str());

  write_file(dir / "summary.txt", summary_text(report));

  std::ostringstream pl;
  pl << std::setprecision(10) << "# log(eps) log(E0) log(E1) log(E2)\n";
  for (const SweepPoint& p : report.points) {
    if (!p.ok) continue;
    auto lg = [](double v) { return v > 0.0 ? std::log(v) : NAN; };
    pl << std::log(p.eps) << " " << lg(p.E0) << " " << lg(p.E1) << " " << lg(p.E2) << "\n";
  }
  write_file(dir / "plot.dat", pl.str());
}

}  // namespace lphom
