#pragma once

#include <string>
#include <vector>

#include "starcov/channel.hpp"
#include "starcov/types.hpp"

namespace starcov {

/// Loop tolerances and caps of the alternating optimizer.
struct Tolerances {
  double eps_outer = 1e-4;       // Algorithm 2 objective-gap threshold
  double eps_penalty = 1e-8;     // rank-one violation threshold (v1)
  double eps_dinkelbach = 1e-8;  // inner objective-gap threshold (v2)
  double omega = 10.0;           // penalty scaling factor
  double rho_init = 1e-3;        // initial penalty coefficients
  int max_alternating = 50;
  int max_penalty = 12;
  int max_dinkelbach = 30;

  void validate() const;
};

struct TraceRecord {
  int iteration = 0;
  double R_bb = 0.0;
  double v = 0.0;   // squared objective gap of the alternating loop
  double v1 = 0.0;  // rank-one violation after the last passive solve
  double v2 = 0.0;  // last Dinkelbach gap
  double chi = 0.0;
  double rho = 0.0;
};

struct OptimizerState {
  Beamformers bf;
  StarRisState ris;
  MatrixXcd W_b, W_c;  // lifted beamformers (rank-one at acceptance)
  MatrixXcd Q_r, Q_t;  // lifted RIS coefficient matrices
  double chi = 0.0;
  double rho_1 = 0.0, rho_2 = 0.0;
  int iterations = 0;
  std::vector<TraceRecord> trace;
};

/// The covert-bound left side g(varpi_b) = varpi_b * ln(1 + pj/(a*(varpi_b +
/// varpi_c))); the covertness constraint is g <= eps*pj/a. Arguments a and pj
/// are the products l_rw*theta_r and P_j_max*lambda_rw.
double covert_g(double varpi_b, double varpi_c, double a, double pj);

/// First-order Taylor expansion of covert_g around varpi_b_ref: affine in
/// varpi_b, tangent at the reference, and (by concavity) majorizing g.
double taylor_g(double varpi_b, double varpi_b_ref, double varpi_c, double a, double pj);

/// Slope of covert_g at the reference (exposed for constraint assembly).
double taylor_g_slope(double varpi_b_ref, double varpi_c, double a, double pj);

/// Minimum public power making the covert constraint hold at a given varpi_b:
/// C(eps) = pj / (a*(e^{eps*pj/(a*varpi_b)} - 1)) - varpi_b. May be negative
/// (constraint already slack at varpi_c = 0).
double covert_power_cap(double epsilon, double varpi_b, double a, double pj);

/// Threshold on r = lambda_rw/theta_r above which the covert constraint
/// holds; 0 when the constraint is vacuous (eps above the r->0 supremum).
double phi_epsilon(double epsilon, double varpi_b, double varpi_c, double l_rw,
                   double P_j_max);

enum class SubproblemStatus { Updated, Unchanged, Infeasible };

/// Feasibility/objective snapshot of a full solution.
struct SolutionCheck {
  double R_bb = 0.0;
  double R_cc = 0.0;
  double covert_lb = 0.0;  // closed-form average-DEP lower bound
  double power = 0.0;
  bool feasible = false;
};

SolutionCheck evaluate_solution(const ChannelSet& ch, const StarRisState& ris,
                                const Beamformers& bf, const SystemConfig& config);

/// One SDR update of w_b (covert stream): maximizes Bob's signal power under
/// the power budget, the linearized covert constraint and Carol's leakage
/// cap; monotone acceptance on R_bb after rank-one recovery.
SubproblemStatus solve_wb_subproblem(OptimizerState& state, const ChannelSet& ch,
                                     const SystemConfig& config);

/// One SDR update of w_c (public stream): minimizes leakage into Bob under
/// Carol's QoS floor, the covert power floor C(eps) and the power budget.
SubproblemStatus solve_wc_subproblem(OptimizerState& state, const ChannelSet& ch,
                                     const SystemConfig& config);

/// One convex inner problem of the passive loop (Dinkelbach objective with
/// linearized rank-one penalties) plus the chi quotient update. When
/// frozen_beta_r is given, the per-element splits are pinned to it instead of
/// being optimized (conventional-RIS baseline); elements with a zero-size
/// side are dropped from the corresponding lifted variable.
bool passive_inner_step(OptimizerState& state, const ChannelSet& ch,
                        const SystemConfig& config,
                        const VectorXd* frozen_beta_r = nullptr);

struct PassiveResult {
  bool converged = false;  // v1 <= eps_penalty reached
  bool accepted = false;   // recovered RIS improved (or matched) the incumbent
  double v1 = 0.0;
  double v2 = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
};

/// Algorithm 1: penalty outer loop around the Dinkelbach inner loop, followed
/// by rank-one recovery with beta-consistent renormalization and monotone
/// acceptance against the incumbent RIS state.
PassiveResult algorithm1_passive(OptimizerState& state, const ChannelSet& ch,
                                 const SystemConfig& config, const Tolerances& tol,
                                 const VectorXd* frozen_beta_r = nullptr);

struct OptimizationResult {
  bool converged = false;
  bool feasible = false;
  Beamformers bf;
  StarRisState ris{VectorXd(), VectorXd(), VectorXd()};
  double R_bb = 0.0;
  SolutionCheck check;
  double eta_r = 0.0, eta_t = 0.0;  // rank-one gaps backing the final RIS
  int iterations = 0;
  std::vector<TraceRecord> trace;
  std::string message;
};

/// Algorithm 2: alternating w_b / w_c / passive updates until the squared
/// R_bb gap drops below eps_outer. Initialization and feasibility repair per
/// the documented scheme; throws nothing, failures land in the result.
OptimizationResult algorithm2_alternating(const SystemConfig& config, const ChannelSet& ch,
                                          const Tolerances& tol = {},
                                          const VectorXd* frozen_beta_r = nullptr);

}  // namespace starcov
