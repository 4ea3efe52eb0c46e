// Command-line front end: closed-form analytics, verification oracles, a
// single optimization run, and figure-style sweeps.
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "starcov/detection.hpp"
#include "starcov/experiments.hpp"
#include "starcov/optimizer.hpp"
#include "starcov/outage.hpp"
#include "starcov/rng.hpp"

namespace {

using namespace starcov;

struct CommonOpts {
  std::string config_path;
  std::uint64_t seed = 1;
  int realizations = 50;
  std::string out_dir = "out";
  std::string scheme = "star";
  std::string format = "table";
  std::string sweep;
};

SystemConfig load_config(const CommonOpts& o) {
  SystemConfig c;
  if (!o.config_path.empty()) c = parse_config_file(o.config_path);
  c.rng_seed = o.seed;
  return c;
}

void parse_sweep_spec(const std::string& spec, ExperimentConfig& cfg) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos)
    throw CLI::ValidationError("--sweep", "expected <var>=<comma list>");
  cfg.sweep_var = sweep_variable_from_string(spec.substr(0, eq));
  std::stringstream ss(spec.substr(eq + 1));
  std::string tok;
  cfg.sweep_values.clear();
  while (std::getline(ss, tok, ',')) cfg.sweep_values.push_back(std::stod(tok));
  if (cfg.sweep_values.empty())
    throw CLI::ValidationError("--sweep", "empty value list");
}

int cmd_analyze(const CommonOpts& o) {
  const SystemConfig c = load_config(o);
  const ChannelSet ch = generate_channels(c, o.seed);

  // A deterministic reference operating point: uniform splits, random phases,
  // matched-filter beamformers with a 2/3-1/3 power split.
  Rng rng(o.seed, 0x414E41ULL);
  VectorXd phi_r(c.N), phi_t(c.N);
  for (int n = 0; n < c.N; ++n) {
    phi_r[n] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    phi_t[n] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  const StarRisState ris(VectorXd::Constant(c.N, 0.5), phi_r, phi_t);
  const CascadeSet cs = cascade_vectors(ch, ris);
  Beamformers bf;
  bf.w_b = std::sqrt(2.0 * c.P_max / 3.0) * cs.bob_r.adjoint().normalized();
  bf.w_c = std::sqrt(c.P_max / 3.0) * cs.carol_t.adjoint().normalized();

  const DetectionParams dp = DetectionParams::from_system(ch, ris, bf, c);
  const double tau = optimal_threshold(dp);
  const DepProfile prof = dep_profile(tau, dp);
  const AsymptoticParams ap = asymptotic_dep_params(ch, ris, bf);
  const RateBounds rb = rate_bounds(ch, ris, bf, c);
  const SolutionCheck sc = evaluate_solution(ch, ris, bf, c);

  std::printf("detection: lambda=%.6g lambda_tilde=%.6g gamma=%.6g\n", dp.lambda,
              dp.lambda_tilde, dp.gamma);
  std::printf("optimal threshold tau*=%.6g  P_FA=%.6g  P_MD=%.6g  min DEP=%.6g\n", tau,
              prof.p_fa, prof.p_md, min_dep(dp));
  std::printf("asymptotic: lambda_a=%.6g lambda_tilde_a=%.6g lambda_rw=%.6g\n", ap.lambda_a,
              ap.lambda_tilde_a, ap.lambda_rw);
  std::printf("avg min DEP: quadrature=%.8g lower bound=%.8g (requirement %.8g)\n",
              avg_min_dep_quadrature(ap, bf.varpi_b(), bf.varpi_c(), c.P_j_max),
              sc.covert_lb, 1.0 - c.epsilon);
  std::printf("rates: R_bb=%.6g R_cc=%.6g sigma*=%.6g\n", rb.R_bb, rb.R_cc, rb.sigma_star);
  const OutageParams op = outage_params_from_system(ch, ris, bf, c, rb.R_bb, rb.R_cc);
  std::printf("outage at (R_bb, R_cc): delta_AB=%.6g (target iota=%.3g) delta_AC=%.6g "
              "(target kappa=%.3g)\n",
              outage_ab(op), c.iota, outage_ac(op), c.kappa);
  return 0;
}

int cmd_verify(const CommonOpts& o) {
  const SystemConfig c = load_config(o);
  const ChannelSet ch = generate_channels(c, o.seed);
  Rng rng(o.seed, 0x564552ULL);
  VectorXd phi_r(c.N), phi_t(c.N);
  for (int n = 0; n < c.N; ++n) {
    phi_r[n] = rng.uniform(0.0, 2.0 * std::numbers::pi);
    phi_t[n] = rng.uniform(0.0, 2.0 * std::numbers::pi);
  }
  const StarRisState ris(VectorXd::Constant(c.N, 0.5), phi_r, phi_t);
  const CascadeSet cs = cascade_vectors(ch, ris);
  Beamformers bf;
  bf.w_b = std::sqrt(2.0 * c.P_max / 3.0) * cs.bob_r.adjoint().normalized();
  bf.w_c = std::sqrt(c.P_max / 3.0) * cs.carol_t.adjoint().normalized();

  int failures = 0;
  auto report = [&](const char* name, bool ok, double got, double want, double tol) {
    std::printf("%-34s %s  (got %.8g, reference %.8g, tol %.2g)\n", name,
                ok ? "ok" : "FAIL", got, want, tol);
    if (!ok) ++failures;
  };

  const DetectionParams dp = DetectionParams::from_system(ch, ris, bf, c);
  const double tau = optimal_threshold(dp);
  const DepProfile prof = dep_profile(tau, dp);
  const long long trials = 200000LL * std::max(1, o.realizations / 50);
  const EmpiricalRates mc = radiometer_monte_carlo(dp, tau, trials, o.seed);
  report("DEP closed form vs Monte Carlo", std::abs(prof.p_fa - mc.p_fa) < 0.005 &&
                                               std::abs(prof.p_md - mc.p_md) < 0.005,
         mc.p_fa + mc.p_md, prof.p_e, 0.005);

  // Threshold optimality on a coarse grid.
  double best = 2.0;
  const double lo = c.sigma_w2, hi = tau * 3.0;
  for (int i = 0; i <= 20000; ++i)
    best = std::min(best, dep_profile(lo + (hi - lo) * i / 20000.0, dp).p_e);
  report("tau* grid optimality", min_dep(dp) <= best + 1e-6, min_dep(dp), best, 1e-6);

  const AsymptoticParams ap = asymptotic_dep_params(ch, ris, bf);
  const double quad = avg_min_dep_quadrature(ap, bf.varpi_b(), bf.varpi_c(), c.P_j_max);
  const double lb = avg_min_dep_lower_bound(ap, bf.varpi_b(), bf.varpi_c(), c.P_j_max);
  report("avg-DEP lower bound ordering", lb <= quad + 1e-9, lb, quad, 1e-9);

  const RateBounds rb = rate_bounds(ch, ris, bf, c);
  const OutageParams op = outage_params_from_system(ch, ris, bf, c, rb.R_bb, rb.R_cc);
  report("outage_ab at R_bb equals iota", std::abs(outage_ab(op) - c.iota) < 1e-6,
         outage_ab(op), c.iota, 1e-6);
  report("outage_ac at R_cc equals kappa", std::abs(outage_ac(op) - c.kappa) < 1e-6,
         outage_ac(op), c.kappa, 1e-6);

  std::printf(failures == 0 ? "all checks passed\n" : "%d check(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}

int cmd_optimize(const CommonOpts& o) {
  const SystemConfig c = load_config(o);
  const ChannelSet ch = generate_channels(c, o.seed);
  OptimizationResult r;
  if (scheme_from_string(o.scheme) == Scheme::ConventionalRis) {
    const BaselineSystem b = ris_baseline_channels(c, o.seed);
    r = algorithm2_alternating(c, b.channels, Tolerances{}, &b.frozen_beta_r);
  } else {
    r = algorithm2_alternating(c, ch);
  }
  std::printf("iter  R_bb        v           v1          v2          chi         rho\n");
  for (const TraceRecord& t : r.trace)
    std::printf("%4d  %-10.6g  %-10.3g  %-10.3g  %-10.3g  %-10.6g  %-10.3g\n", t.iteration,
                t.R_bb, t.v, t.v1, t.v2, t.chi, t.rho);
  std::printf("status: %s, %s\n", r.message.c_str(), r.feasible ? "feasible" : "infeasible");
  std::printf("R_bb=%.8g  R_cc=%.8g  covert_lb=%.8g (>= %.8g)  power=%.6g/%.6g\n", r.check.R_bb,
              r.check.R_cc, r.check.covert_lb, 1.0 - c.epsilon, r.check.power, c.P_max);
  return r.feasible ? 0 : 1;
}

int cmd_sweep(const CommonOpts& o) {
  ExperimentConfig cfg;
  cfg.base = load_config(o);
  cfg.seed = o.seed;
  cfg.realizations = o.realizations;
  cfg.scheme = scheme_from_string(o.scheme);
  cfg.out_dir = o.out_dir;
  if (!o.sweep.empty()) parse_sweep_spec(o.sweep, cfg);
  const std::vector<ResultRecord> records = run_sweep(cfg);
  const auto files = emit_results(records, cfg.out_dir);
  if (o.format == "log") {
    for (const ResultRecord& r : records)
      std::printf("value=%g realization=%d R_bb=%.6g feasible=%d iterations=%d\n",
                  r.sweep_value, r.realization, r.R_bb, r.feasible ? 1 : 0, r.iterations);
  } else {
    std::printf("%-10s %-12s %-6s %-10s %s\n", "scheme", "value", "real", "R_bb", "feasible");
    for (const ResultRecord& r : records)
      std::printf("%-10s %-12g %-6d %-10.6g %s\n", r.scheme.c_str(), r.sweep_value,
                  r.realization, r.R_bb, r.feasible ? "yes" : "no");
  }
  for (const auto& f : files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"STAR-RIS covert-communication analytics and optimization"};
  app.require_subcommand(1);
  CommonOpts o;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config_path, "flat key=value config file");
    sub->add_option("--seed", o.seed, "base RNG seed");
    sub->add_option("--realizations", o.realizations, "channel realization count");
  };

  auto* analyze = app.add_subcommand("analyze", "closed-form evaluations");
  add_common(analyze);
  auto* verify = app.add_subcommand("verify", "oracle consistency checks");
  add_common(verify);
  auto* optimize = app.add_subcommand("optimize", "single optimization run with trace");
  add_common(optimize);
  optimize->add_option("--scheme", o.scheme, "star | ris");
  auto* sweep = app.add_subcommand("sweep", "figure-style sweep");
  add_common(sweep);
  sweep->add_option("--sweep", o.sweep, "<var>=<comma list>, var in P_max|epsilon|N|M");
  sweep->add_option("--scheme", o.scheme, "star | ris");
  sweep->add_option("--out", o.out_dir, "output directory");
  sweep->add_option("--format", o.format, "table | log")
      ->check(CLI::IsMember({"table", "log"}));

  CLI11_PARSE(app, argc, argv);
  try {
    if (*analyze) return cmd_analyze(o);
    if (*verify) return cmd_verify(o);
    if (*optimize) return cmd_optimize(o);
    if (*sweep) return cmd_sweep(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
