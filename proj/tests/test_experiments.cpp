#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "gifga/experiments.hpp"

using namespace gifga;

TEST_CASE("presets cover the built-in studies") {
  for (const char* name : {"ex2", "ex3", "ex4", "ex5", "ex6", "ex7"}) {
    const auto cfg = preset(name);
    CHECK(cfg.name == name);
    CHECK_FALSE(cfg.eps_list.empty());
  }
  for (const char* name : {"ex4", "ex5", "ex6", "ex7"})
    CHECK(preset(name).T > 0.0);
  CHECK_THROWS(preset("ex1"));
  CHECK_THROWS(preset("bogus"));

  const auto ex5 = preset("ex5");
  CHECK(ex5.project_band == 1);
  CHECK(ex5.lattice_kind == "gaussian-bump");
  const auto ex6 = preset("ex6");
  CHECK(ex6.external_kind == "harmonic");
  CHECK(ex6.T == doctest::Approx(0.2));
  const auto ex7 = preset("ex7");
  CHECK(ex7.external_kind == "cosine");
}

TEST_CASE("json overrides reach into sections") {
  auto cfg = preset("ex6");
  apply_overrides(cfg, R"({"bloch": {"lambda": 24, "n_xi": 128},
                           "run": {"eps_list": [0.25], "threads": 4},
                           "dynamics": {"K": 99}})");
  CHECK(cfg.lambda == 24);
  CHECK(cfg.n_xi == 128);
  CHECK(cfg.K == 99);
  CHECK(cfg.threads == 4);
  REQUIRE(cfg.eps_list.size() == 1);
  CHECK(cfg.eps_list[0] == doctest::Approx(0.25));
  CHECK_THROWS(apply_overrides(cfg, "not json"));
}

TEST_CASE("config serialization round-trips through the hash") {
  const auto a = preset("ex4");
  auto b = preset("ex4");
  CHECK(config_hash(a) == config_hash(b));
  apply_overrides(b, R"({"dynamics": {"K": 151}})");
  CHECK(config_hash(a) != config_hash(b));
  const std::string dump = config_json(a);
  CHECK(dump.find("ex4") != std::string::npos);
  const std::string params = resolved_params_json(a, 0.125);
  CHECK(params.find("n_x") != std::string::npos);
}

TEST_CASE("initial data families") {
  const double eps = 1.0 / 64.0;
  auto cfg = preset("ex2");
  cfg.amplitude = "gauss";
  const auto gauss = make_base_initial(cfg, eps);
  CHECK(std::abs(gauss.psi(0.0)) == doctest::Approx(1.0));
  // |psi| = gaussian envelope regardless of the phase function
  CHECK(std::abs(gauss.psi(0.1)) == doctest::Approx(std::exp(-0.5)));
  CHECK(gauss.support == doctest::Approx(cfg.support));

  cfg.amplitude = "gauss-cos";
  const auto mod = make_base_initial(cfg, eps);
  CHECK(std::abs(mod.psi(0.5)) ==
        doctest::Approx(std::exp(-50.0 * 0.25)).epsilon(1e-12));
  cfg.amplitude = "unknown";
  CHECK_THROWS(make_base_initial(cfg, eps));
}

TEST_CASE("reference step shrinks with eps") {
  const auto cfg = preset("ex6");
  CHECK(effective_ref_dt(cfg, 1.0 / 16.0) == doctest::Approx(cfg.ref_dt));
  CHECK(effective_ref_dt(cfg, 1.0 / 64.0) < effective_ref_dt(cfg, 1.0 / 32.0));
  CHECK(effective_ref_dt(cfg, 1.0 / 128.0) ==
        doctest::Approx(cfg.ref_dt * 0.25));
}

TEST_CASE("fga runs are deterministic") {
  auto cfg = preset("ex6");
  cfg.eps_list = {1.0 / 16.0};
  cfg.T = 0.05;
  cfg.K = 20;
  cfg.n_bands = 2;
  cfg.band_counts = {2};
  const auto a = run_fga(cfg, cfg.eps_list[0]);
  const auto b = run_fga(cfg, cfg.eps_list[0]);
  REQUIRE(a.size() == b.size());
  for (int i = 0; i < a.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("gauge check on a small run stays at rounding level") {
  auto cfg = preset("ex6");
  cfg.eps_list = {1.0 / 16.0};
  cfg.T = 0.05;
  cfg.K = 20;
  cfg.n_bands = 2;
  std::ostringstream log;
  const auto rows = run_gauge_check(cfg, &log);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].rel_discrepancy < 1e-12);
}

TEST_CASE("single-eps convergence study skips rate estimation") {
  auto cfg = preset("ex4");
  cfg.eps_list = {1.0 / 8.0};
  cfg.T = 0.05;
  cfg.K = 20;
  const auto res = run_convergence_study(cfg);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].error < 0.2);
  CHECK(res.rates.pairwise.empty());
}
