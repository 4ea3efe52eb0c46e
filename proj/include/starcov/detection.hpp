#pragma once

#include <cstdint>

#include "starcov/channel.hpp"
#include "starcov/types.hpp"

namespace starcov {

/// Scalar parameters feeding the warden's detection-error formulas.
/// lambda is the exponential mean of the public-signal power at Willie,
/// lambda_tilde the corresponding mean when the covert stream is active,
/// gamma the jamming-channel power gain |h_rw^H Theta_t h_rc^*|^2.
struct DetectionParams {
  double lambda = 0.0;
  double lambda_tilde = 0.0;
  double gamma = 0.0;
  double sigma_w2 = 0.0;
  double P_j_max = 0.0;

  static DetectionParams from_system(const ChannelSet& ch, const StarRisState& ris,
                                     const Beamformers& bf, const SystemConfig& config);
  void validate() const;
};

struct DepProfile {
  double p_fa;
  double p_md;
  double p_e;  // p_fa + p_md
};

/// Branch-wise closed forms of FA/MD/DEP at detection threshold tau.
DepProfile dep_profile(double tau, const DetectionParams& p);

/// The threshold minimizing the DEP; always >= sigma_w2 + gamma * P_j_max.
double optimal_threshold(const DetectionParams& p);

/// Minimum DEP, i.e. dep_profile(optimal_threshold(p), p).p_e in closed form.
/// Returns 1 in the degenerate no-covert-signal case lambda_tilde == lambda.
double min_dep(const DetectionParams& p);

/// Large-system substitutes for lambda and lambda_tilde plus the exponential
/// mean of gamma.
struct AsymptoticParams {
  double lambda_a = 0.0;        // l_rw * varpi_c * theta_r
  double lambda_tilde_a = 0.0;  // l_rw * theta_r * (varpi_b + varpi_c)
  double theta_r = 0.0;         // sum of beta_r
  double lambda_rw = 0.0;       // l_rw * ||Theta_t h_rc^*||^2
};

AsymptoticParams asymptotic_dep_params(const ChannelSet& ch, const StarRisState& ris,
                                       const Beamformers& bf);

/// Asymptotic minimum DEP as a function of the (random) jamming gain gamma.
double asymptotic_min_dep(double gamma, const AsymptoticParams& a,
                          double varpi_b, double varpi_c, double P_j_max);

/// Average of the asymptotic minimum DEP over gamma ~ exp(lambda_rw), by
/// adaptive quadrature (absolute tolerance 1e-8). Throws on non-convergence.
double avg_min_dep_quadrature(const AsymptoticParams& a, double varpi_b,
                              double varpi_c, double P_j_max);

/// Closed-form lower bound of avg_min_dep_quadrature; the covert-design
/// constraint is lower_bound >= 1 - epsilon.
double avg_min_dep_lower_bound(const AsymptoticParams& a, double varpi_b,
                               double varpi_c, double P_j_max);

enum class RadiometerMode { Limiting, SampleLevel };

struct EmpiricalRates {
  double p_fa = 0.0;
  double p_md = 0.0;
  double stderr_fa = 0.0;  // binomial standard errors
  double stderr_md = 0.0;
  long long trials = 0;
};

/// Monte-Carlo radiometer oracle. Limiting mode draws the slot-average signal
/// powers from their exact exponential laws; sample-level mode synthesizes
/// samples_per_trial complex samples per trial and averages their powers.
/// Deterministic for a fixed seed regardless of worker count.
EmpiricalRates radiometer_monte_carlo(const DetectionParams& p, double tau,
                                      long long n_trials, std::uint64_t seed,
                                      RadiometerMode mode = RadiometerMode::Limiting,
                                      int samples_per_trial = 0, int workers = 1);

}  // namespace starcov
