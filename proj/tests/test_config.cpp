#include <doctest.h>

#include "lphom/config.hpp"

using namespace lphom;

TEST_CASE("minimal config gets documented defaults") {
  ExperimentConfig c = parse_config("[coefficient]\nfamily = separable_1d\n");
  ExperimentConfig d;
  CHECK(c.family == "separable_1d");
  CHECK(c.slow == d.slow);
  CHECK(c.cell == d.cell);
  CHECK(c.fine_per_cell == 16);
  CHECK(c.eps_denominators == std::vector<int>{8, 16, 32, 64});
  CHECK(c.t_gauss == 3);
  CHECK(c.effective_omega_points() == 16);
  std::vector<double> eps = c.eps_values();
  REQUIRE(eps.size() == 4);
  CHECK(eps.front() == 0.125);
  CHECK(eps.back() == 1.0 / 64);
}

TEST_CASE("eps must be 1/k") {
  CHECK_THROWS_AS(parse_config("[coefficient]\nfamily = constant\n[sweep]\neps = 0.3\n"), ConfigError);
  ExperimentConfig c = parse_config("[coefficient]\nfamily = constant\n[sweep]\neps = 0.0625, 0.125, 0.25\n");
  CHECK(c.eps_denominators == std::vector<int>{4, 8, 16});
}

TEST_CASE("parse errors and unknown keys") {
  CHECK_THROWS_AS(parse_config("[grids]\nslow = 8\n"), ConfigError);  // family missing
  CHECK_THROWS_AS(parse_config("[coefficient]\nfamily = constant\n[grids]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[coefficient]\nfamily = constant\n[extra]\nk = 1\n"), ConfigError);
  try {
    parse_config("[coefficient]\nfamily = constant\n[grids\nslow = 8\n", "bad.ini");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
}

TEST_CASE("resolution constraints") {
  CHECK_THROWS_AS(parse_config("[coefficient]\nfamily = constant\n[grids]\nfine_per_cell = 6\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[coefficient]\nfamily = constant\n[grids]\ncell = 9\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[coefficient]\nfamily = constant\n[sweep]\nomega_points = 5\n"), ConfigError);
}

TEST_CASE("full config round-trips through the normalized form") {
  const char* text =
      "[coefficient]\nfamily = smooth_2d_nonsymmetric\nslow_amp = 0.4\n"
      "[grids]\nslow = 48\ncell = 64\nfine_per_cell = 8\ncell_scheme = spectral\n"
      "[sweep]\neps_denominators = 32, 8, 16\nt_gauss = 4\n"
      "[solver]\ntol = 1e-11\nseed = 9\n[output]\ndir = out/x\n";
  ExperimentConfig c = parse_config(text);
  CHECK(c.eps_denominators == std::vector<int>{8, 16, 32});
  CHECK(c.params.at("slow_amp") == 0.4);
  std::string norm = to_normalized_string(c);
  ExperimentConfig c2 = parse_config(norm);
  CHECK(to_normalized_string(c2) == norm);
  CHECK(c2.seed == 9);
  CHECK(c2.cell_scheme == CellScheme::Spectral);
  CHECK(c2.out_dir == "out/x");
}

TEST_CASE("family parameters are checked at load time") {
  CHECK_THROWS_AS(parse_config("[coefficient]\nfamily = separable_1d\namp_q = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[coefficient]\nfamily = unknown\n"), ConfigError);
}
