#pragma once

#include "starcov/types.hpp"

namespace starcov {

/// Large-scale path power gain rho0 * d^(-alpha). Throws on d <= 0.
double path_loss_gain(double d, double rho0, double alpha);

/// Draws one channel realization. Identical (config, seed) gives bit-identical
/// output; each channel uses its own substream.
ChannelSet generate_channels(const SystemConfig& config, std::uint64_t seed);

/// Effective cascaded channels after the diagonalization rewrite
/// h^H Theta H_AR = theta^T Diag(h^*) H_AR.
struct CascadeSet {
  RowVectorXcd bob_r;     // theta_r^T Diag(h_rb^*) H_AR   (1 x M)
  RowVectorXcd carol_t;   // theta_t^T Diag(h_rc^*) H_AR   (1 x M)
  RowVectorXcd willie_r;  // theta_r^T Diag(h_rw^*) H_AR   (1 x M)
  Complex jam_to_bob;     // h_rb^H Theta_t h_rc^*
  Complex jam_to_willie;  // h_rw^H Theta_t h_rc^*
};

CascadeSet cascade_vectors(const ChannelSet& ch, const StarRisState& ris);

/// Channel capacities at Bob and Carol for a given jamming power [bits/use].
struct Capacities {
  double C_b;
  double C_c;
};

Capacities capacities(const ChannelSet& ch, const StarRisState& ris,
                      const Beamformers& bf, double P_j, const SystemConfig& config);

}  // namespace starcov
