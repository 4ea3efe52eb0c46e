#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "starcov/experiments.hpp"

using namespace starcov;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("starcov_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ExperimentConfig tiny_sweep_cfg() {
  ExperimentConfig cfg;
  cfg.base.N = 8;
  cfg.base.M = 2;
  cfg.base.R_star = 2.0;  // see test_optimizer: N=8 needs a relaxed QoS floor
  cfg.sweep_var = SweepVariable::PMax;
  cfg.sweep_values = {1.0, 2.0};
  cfg.realizations = 3;
  cfg.seed = 11;
  cfg.tol.max_alternating = 2;
  cfg.tol.max_dinkelbach = 5;
  cfg.tol.max_penalty = 3;
  cfg.tol.eps_dinkelbach = 1e-4;
  cfg.tol.eps_penalty = 1e-5;
  return cfg;
}

}  // namespace

TEST_CASE("enum names round-trip through their string forms") {
  for (auto v : {SweepVariable::None, SweepVariable::PMax, SweepVariable::Epsilon,
                 SweepVariable::N, SweepVariable::M})
    CHECK(sweep_variable_from_string(to_string(v)) == v);
  for (auto s : {Scheme::StarRis, Scheme::ConventionalRis})
    CHECK(scheme_from_string(to_string(s)) == s);
  CHECK_THROWS_AS(sweep_variable_from_string("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(scheme_from_string("bogus"), std::invalid_argument);
}

TEST_CASE("config files convert dB fields and reject unknown keys") {
  TempDir tmp;
  const fs::path file = tmp.path / "sys.cfg";
  {
    std::ofstream out(file);
    out << "# comment line\n"
        << "M = 4\n"
        << "N = 12\n"
        << "P_max = 3\n"          // dBW
        << "P_j_max = 0\n"        // dBW
        << "sigma_b2 = -140\n"    // dBm
        << "sigma_w2 = -140\n"
        << "rho0 = -20\n"         // dB
        << "phi_sic = -160\n"     // dB
        << "epsilon = 0.05\n"
        << "d_rb = 120\n";
  }
  const SystemConfig c = parse_config_file(file.string());
  CHECK(c.M == 4);
  CHECK(c.N == 12);
  CHECK(c.P_max == doctest::Approx(std::pow(10.0, 0.3)).epsilon(1e-12));
  CHECK(c.P_j_max == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.sigma_b2 == doctest::Approx(1e-17).epsilon(1e-12));
  CHECK(c.rho0 == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(c.phi_sic == doctest::Approx(1e-16).epsilon(1e-12));
  CHECK(c.epsilon == doctest::Approx(0.05));
  CHECK(c.d_rb == doctest::Approx(120.0));
  // Untouched fields keep their defaults.
  CHECK(c.alpha == doctest::Approx(2.6));

  const fs::path bad = tmp.path / "bad.cfg";
  std::ofstream(bad) << "no_such_field = 1\n";
  CHECK_THROWS_AS(parse_config_file(bad.string()), std::runtime_error);
  CHECK_THROWS_AS(parse_config_file((tmp.path / "missing.cfg").string()), std::runtime_error);
}

TEST_CASE("conventional-RIS baseline pins a half/half split on shared channels") {
  SystemConfig cfg;
  cfg.N = 10;
  const BaselineSystem bs = ris_baseline_channels(cfg, 33);
  REQUIRE(bs.frozen_beta_r.size() == cfg.N);
  for (int i = 0; i < cfg.N; ++i)
    CHECK(bs.frozen_beta_r[i] == (i < cfg.N / 2 ? 1.0 : 0.0));
  const ChannelSet direct = generate_channels(cfg, 33);
  CHECK((bs.channels.H_ar - direct.H_ar).norm() == 0.0);
  CHECK((bs.channels.h_rw - direct.h_rw).norm() == 0.0);
}

TEST_CASE("sweeps are deterministic apart from wall time") {
  const ExperimentConfig cfg = tiny_sweep_cfg();
  const auto a = run_sweep(cfg);
  const auto b = run_sweep(cfg);
  REQUIRE(a.size() == cfg.sweep_values.size() * cfg.realizations);
  REQUIRE(a.size() == b.size());
  int feasible = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].scheme == b[i].scheme);
    CHECK(a[i].sweep_value == b[i].sweep_value);
    CHECK(a[i].realization == b[i].realization);
    CHECK(a[i].R_bb == b[i].R_bb);
    CHECK(a[i].feasible == b[i].feasible);
    CHECK(a[i].iterations == b[i].iterations);
    feasible += a[i].feasible;
  }
  CHECK(feasible > 0);
}

TEST_CASE("result tables round-trip through emit and parse") {
  TempDir tmp;
  const ExperimentConfig cfg = tiny_sweep_cfg();
  const auto records = run_sweep(cfg);
  const auto paths = emit_results(records, tmp.path.string());
  REQUIRE(paths.size() >= 2);
  bool has_results = false, has_log = false, has_plot = false;
  for (const auto& p : paths) {
    has_results |= p.ends_with("results.csv");
    has_log |= p.ends_with("run.log");
    has_plot |= p.find("plot_") != std::string::npos;
    CHECK(fs::exists(p));
  }
  CHECK(has_results);
  CHECK(has_log);
  CHECK(has_plot);

  const auto parsed = parse_results_table((tmp.path / "results.csv").string());
  REQUIRE(parsed.size() == records.size());
  for (size_t i = 0; i < records.size(); ++i) {
    CHECK(parsed[i].scheme == records[i].scheme);
    CHECK(parsed[i].sweep_value == doctest::Approx(records[i].sweep_value));
    CHECK(parsed[i].realization == records[i].realization);
    CHECK(parsed[i].R_bb == doctest::Approx(records[i].R_bb).epsilon(1e-12));
    CHECK(parsed[i].feasible == records[i].feasible);
    CHECK(parsed[i].converged == records[i].converged);
    CHECK(parsed[i].iterations == records[i].iterations);
    CHECK(std::isnan(parsed[i].eps_r) == std::isnan(records[i].eps_r));
  }
}

TEST_CASE("bound-tightness verification orders the two error rates") {
  ExperimentConfig cfg = tiny_sweep_cfg();
  cfg.sweep_var = SweepVariable::None;
  cfg.sweep_values.clear();
  const TightnessStats stats = verify_dep_bound_tightness(cfg, 4);
  REQUIRE(stats.successes > 0);
  CHECK(stats.mean_gap >= 0.0);
  for (const auto& r : stats.records) {
    if (!r.feasible) continue;
    CHECK_FALSE(std::isnan(r.eps_r));
    CHECK_FALSE(std::isnan(r.eps_a));
    // The closed form under-estimates the DEP, so eps_a over-estimates the
    // warden's error: eps_r <= eps_a always.
    CHECK(r.eps_r <= r.eps_a + 1e-12);
    CHECK(r.eps_a <= cfg.base.epsilon + 1e-9);
  }
}

TEST_CASE("experiment validation catches inconsistent setups") {
  ExperimentConfig cfg = tiny_sweep_cfg();
  cfg.realizations = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  ExperimentConfig cfg2 = tiny_sweep_cfg();
  cfg2.sweep_values.clear();
  CHECK_THROWS_AS(cfg2.validate(), std::invalid_argument);  // sweep with no values
}
