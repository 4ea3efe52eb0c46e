#pragma once

#include "starcov/channel.hpp"
#include "starcov/types.hpp"

namespace starcov {

/// Exponential integral Ei(x) for strictly negative arguments (the only range
/// the outage formulas need). Throws std::domain_error for x >= 0.
double exp_integral_ei(double x);

/// Inputs of the outage closed forms. upsilon and gamma_cap are the segment
/// statistics of Bob's and Carol's outage probabilities.
struct OutageParams {
  double upsilon = 0.0;
  double gamma_cap = 0.0;
  double P_j_max = 0.0;
  double phi_sic = 0.0;
  double R_b = 0.0;
  double R_c = 0.0;
};

/// Computes upsilon and gamma_cap from the cascaded channels for target rates
/// (R_b, R_c); single source of truth for both statistics.
OutageParams outage_params_from_system(const ChannelSet& ch, const StarRisState& ris,
                                       const Beamformers& bf, const SystemConfig& config,
                                       double R_b, double R_c);

/// Bob outage probability under uniform jamming power.
double outage_ab(const OutageParams& p);

/// Carol outage probability under uniform jamming power and exponential
/// self-interference.
double outage_ac(const OutageParams& p);

/// The gamma_cap value at which outage_ac equals kappa (unique root, found by
/// bisection to 1e-10 relative tolerance).
double solve_sigma_star(double kappa, double phi_sic, double P_j_max);

/// Outage-equivalent rate upper bounds: R_bb is the optimization objective,
/// R_cc >= R* the Carol QoS test.
struct RateBounds {
  double R_bb;
  double R_cc;
  double sigma_star;
};

RateBounds rate_bounds(const ChannelSet& ch, const StarRisState& ris,
                       const Beamformers& bf, const SystemConfig& config);

}  // namespace starcov
