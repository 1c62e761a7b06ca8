#include "lphom/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace lphom {
namespace {

namespace pt = boost::property_tree;

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("key '" + key + "': not a decimal number: '" + raw + "'");
  return v;
}

long parse_int(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError("key '" + key + "': not an integer: '" + raw + "'");
  return v;
}

std::vector<std::string> split_list(const std::string& raw) {
  std::vector<std::string> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

int denominator_of(double eps) {
  if (!(eps > 0.0 && eps <= 0.5)) {
    throw ConfigError("eps = " + format_double(eps) + " is not of the form 1/k with integer k >= 2");
  }
  double k = 1.0 / eps;
  double r = std::round(k);
  if (std::abs(k - r) > 1e-9 * r)
    throw ConfigError("eps = " + format_double(eps) + " is not of the form 1/k with integer k >= 2");
  return static_cast<int>(r);
}

CellScheme parse_scheme(const std::string& s) {
  if (s == "auto") return CellScheme::Auto;
  if (s == "spectral") return CellScheme::Spectral;
  if (s == "element") return CellScheme::Element;
  throw ConfigError("cell_scheme must be auto, spectral or element, got '" + s + "'");
}

SlowInterp parse_interp(const std::string& s) {
  if (s == "trig") return SlowInterp::Trig;
  if (s == "linear") return SlowInterp::Linear;
  throw ConfigError("slow_interp must be trig or linear, got '" + s + "'");
}

SlowDerivative parse_derivative(const std::string& s) {
  if (s == "central") return SlowDerivative::Central;
  if (s == "spectral") return SlowDerivative::Spectral;
  throw ConfigError("slow_derivative must be central or spectral, got '" + s + "'");
}

// Walks one section and dispatches known keys; anything else is an error.
template <typename Handler>
void read_section(const pt::ptree& root, const std::string& name, const std::set<std::string>& keys,
                  Handler&& handle) {
  auto sec = root.get_child_optional(name);
  if (!sec) return;
  for (const auto& [key, node] : *sec) {
    if (!node.empty()) throw ConfigError("[" + name + "] " + key + ": nested values are not allowed");
    if (!keys.empty() && !keys.count(key)) throw ConfigError("[" + name + "]: unknown key '" + key + "'");
    handle(key, node.data());
  }
}

}  // namespace

std::string to_string(CellScheme s) {
  switch (s) {
    case CellScheme::Auto: return "auto";
    case CellScheme::Spectral: return "spectral";
    case CellScheme::Element: return "element";
  }
  return "?";
}

std::string to_string(SlowInterp s) { return s == SlowInterp::Trig ? "trig" : "linear"; }

std::string to_string(SlowDerivative s) { return s == SlowDerivative::Central ? "central" : "spectral"; }

std::vector<double> ExperimentConfig::eps_values() const {
  std::vector<double> out;
  for (int k : eps_denominators) out.push_back(1.0 / k);
  return out;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin) {
  pt::ptree root;
  std::istringstream in(text);
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    std::ostringstream os;
    os << origin << ": line " << e.line() << ": " << e.message();
    throw ConfigError(os.str());
  }

  static const std::set<std::string> sections = {"coefficient", "grids", "sweep", "solver", "output"};
  for (const auto& [name, node] : root) {
    if (!sections.count(name)) throw ConfigError(origin + ": unknown section [" + name + "]");
    if (node.empty() && !node.data().empty())
      throw ConfigError(origin + ": key '" + name + "' outside of any section");
  }

  ExperimentConfig cfg;
  bool have_family = false;
  try {
    read_section(root, "coefficient", {}, [&](const std::string& key, const std::string& v) {
      if (key == "family") {
        cfg.family = trim(v);
        have_family = true;
      } else {
        cfg.params[key] = parse_double(key, v);
      }
    });
    read_section(root, "grids",
                 {"slow", "cell", "fine_per_cell", "cell_scheme", "slow_interp", "slow_derivative"},
                 [&](const std::string& key, const std::string& v) {
                   if (key == "slow") cfg.slow = static_cast<int>(parse_int(key, v));
                   else if (key == "cell") cfg.cell = static_cast<int>(parse_int(key, v));
                   else if (key == "fine_per_cell") cfg.fine_per_cell = static_cast<int>(parse_int(key, v));
                   else if (key == "cell_scheme") cfg.cell_scheme = parse_scheme(trim(v));
                   else if (key == "slow_interp") cfg.slow_interp = parse_interp(trim(v));
                   else cfg.slow_derivative = parse_derivative(trim(v));
                 });
    bool have_denominators = false, have_eps = false;
    read_section(root, "sweep", {"eps_denominators", "eps", "omega_points", "t_gauss"},
                 [&](const std::string& key, const std::string& v) {
                   if (key == "eps_denominators") {
                     have_denominators = true;
                     cfg.eps_denominators.clear();
                     for (const auto& item : split_list(v)) {
                       long k = parse_int(key, item);
                       if (k < 2) throw ConfigError("eps_denominators: " + item + " is not an integer >= 2");
                       cfg.eps_denominators.push_back(static_cast<int>(k));
                     }
                   } else if (key == "eps") {
                     have_eps = true;
                     cfg.eps_denominators.clear();
                     for (const auto& item : split_list(v))
                       cfg.eps_denominators.push_back(denominator_of(parse_double(key, item)));
                   } else if (key == "omega_points") {
                     cfg.omega_points = static_cast<int>(parse_int(key, v));
                   } else {
                     cfg.t_gauss = static_cast<int>(parse_int(key, v));
                   }
                 });
    if (have_denominators && have_eps) throw ConfigError("[sweep]: give either eps or eps_denominators, not both");
    read_section(root, "solver", {"tol", "norm_tol", "norm_max_iter", "max_iter", "seed"},
                 [&](const std::string& key, const std::string& v) {
                   if (key == "tol") cfg.tol = parse_double(key, v);
                   else if (key == "norm_tol") cfg.norm_tol = parse_double(key, v);
                   else if (key == "norm_max_iter") cfg.norm_max_iter = static_cast<int>(parse_int(key, v));
                   else if (key == "max_iter") cfg.max_iter = static_cast<int>(parse_int(key, v));
                   else {
                     long s = parse_int(key, v);
                     if (s < 0) throw ConfigError("seed must be nonnegative");
                     cfg.seed = static_cast<std::uint64_t>(s);
                   }
                 });
    read_section(root, "output", {"dir", "cell_table"}, [&](const std::string& key, const std::string& v) {
      if (key == "dir") cfg.out_dir = trim(v);
      else cfg.cell_table = trim(v);
    });
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!have_family) throw ConfigError(origin + ": [coefficient] family is required");

  std::sort(cfg.eps_denominators.begin(), cfg.eps_denominators.end());
  cfg.eps_denominators.erase(std::unique(cfg.eps_denominators.begin(), cfg.eps_denominators.end()),
                             cfg.eps_denominators.end());
  try {
    validate_config(cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

void validate_config(const ExperimentConfig& cfg) {
  auto field = cfg.make_field();  // checks family and parameters
  (void)field;
  if (cfg.fine_per_cell < 8 || cfg.fine_per_cell % 2 != 0)
    throw ConfigError("fine_per_cell must be even and >= 8");
  if (cfg.cell < 8 || cfg.cell % 2 != 0) throw ConfigError("cell must be even and >= 8");
  if (cfg.slow < 4 || cfg.slow % 2 != 0) throw ConfigError("slow must be even and >= 4");
  for (int k : cfg.eps_denominators)
    if (k < 2) throw ConfigError("every eps must be 1/k with integer k >= 2");
  if (!std::is_sorted(cfg.eps_denominators.begin(), cfg.eps_denominators.end()))
    throw ConfigError("eps list must be sorted descending");
  int m = cfg.effective_omega_points();
  if (m < 1 || cfg.fine_per_cell % m != 0) throw ConfigError("omega_points must divide fine_per_cell");
  if (cfg.t_gauss < 1 || cfg.t_gauss > 32) throw ConfigError("t_gauss must be in [1, 32]");
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw ConfigError("tol must be in (0, 1)");
  if (!(cfg.norm_tol > 0.0 && cfg.norm_tol < 1.0)) throw ConfigError("norm_tol must be in (0, 1)");
  if (cfg.norm_max_iter < 1 || cfg.max_iter < 1) throw ConfigError("iteration budgets must be positive");
}

std::string to_normalized_string(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "[coefficient]\n";
  os << "family = " << cfg.family << "\n";
  for (const auto& [key, value] : cfg.params) os << key << " = " << format_double(value) << "\n";
  os << "\n[grids]\n";
  os << "slow = " << cfg.slow << "\n";
  os << "cell = " << cfg.cell << "\n";
  os << "fine_per_cell = " << cfg.fine_per_cell << "\n";
  os << "cell_scheme = " << to_string(cfg.cell_scheme) << "\n";
  os << "slow_interp = " << to_string(cfg.slow_interp) << "\n";
  os << "slow_derivative = " << to_string(cfg.slow_derivative) << "\n";
  os << "\n[sweep]\n";
  os << "eps_denominators = ";
  for (std::size_t i = 0; i < cfg.eps_denominators.size(); ++i) os << (i ? "," : "") << cfg.eps_denominators[i];
  os << "\n";
  os << "omega_points = " << cfg.omega_points << "\n";
  os << "t_gauss = " << cfg.t_gauss << "\n";
  os << "\n[solver]\n";
  os << "tol = " << format_double(cfg.tol) << "\n";
  os << "norm_tol = " << format_double(cfg.norm_tol) << "\n";
  os << "norm_max_iter = " << cfg.norm_max_iter << "\n";
  os << "max_iter = " << cfg.max_iter << "\n";
  os << "seed = " << cfg.seed << "\n";
  os << "\n[output]\n";
  os << "dir = " << cfg.out_dir << "\n";
  if (!cfg.cell_table.empty()) os << "cell_table = " << cfg.cell_table << "\n";
  return os.str();
}

}  // namespace lphom
