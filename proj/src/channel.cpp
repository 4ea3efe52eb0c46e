#include "starcov/channel.hpp"

#include <cmath>

#include "starcov/rng.hpp"

namespace starcov {

double path_loss_gain(double d, double rho0, double alpha) {
  if (!(d > 0.0)) throw std::domain_error("path_loss_gain: distance must be positive");
  return rho0 * std::pow(d, -alpha);
}

namespace {

// Substream ids for the individual channels; fixed so that adding channels
// later cannot silently reshuffle existing draws.
enum Stream : std::uint64_t {
  kStreamHar = 1,
  kStreamHrb = 2,
  kStreamHrc = 3,
  kStreamHrw = 4,
  kStreamHcc = 5,
};

VectorXcd draw_vector(Rng& rng, Eigen::Index n, double variance) {
  VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = rng.cgaussian(variance);
  return v;
}

}  // namespace

ChannelSet generate_channels(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  ChannelSet ch;
  ch.l_ar = path_loss_gain(config.d_ar, config.rho0, config.alpha);
  ch.l_rb = path_loss_gain(config.d_rb, config.rho0, config.alpha);
  ch.l_rc = path_loss_gain(config.d_rc, config.rho0, config.alpha);
  ch.l_rw = path_loss_gain(config.d_rw, config.rho0, config.alpha);

  {
    Rng rng(seed, kStreamHar);
    ch.H_ar.resize(config.N, config.M);
    // Row-major draw order keeps the realization stable across M changes only.
    for (int i = 0; i < config.N; ++i)
      for (int j = 0; j < config.M; ++j) ch.H_ar(i, j) = rng.cgaussian(ch.l_ar);
  }
  {
    Rng rng(seed, kStreamHrb);
    ch.h_rb = draw_vector(rng, config.N, ch.l_rb);
  }
  {
    Rng rng(seed, kStreamHrc);
    ch.h_rc = draw_vector(rng, config.N, ch.l_rc);
  }
  {
    Rng rng(seed, kStreamHrw);
    ch.h_rw = draw_vector(rng, config.N, ch.l_rw);
  }
  {
    Rng rng(seed, kStreamHcc);
    ch.h_cc = rng.cgaussian(config.phi_sic);
  }
  return ch;
}

CascadeSet cascade_vectors(const ChannelSet& ch, const StarRisState& ris) {
  if (ris.size() != ch.h_rb.size())
    throw std::invalid_argument("cascade_vectors: RIS/channel size mismatch");
  const VectorXcd tr = ris.theta_r();
  const VectorXcd tt = ris.theta_t();

  CascadeSet cs;
  cs.bob_r = (tr.array() * ch.h_rb.conjugate().array()).matrix().transpose() * ch.H_ar;
  cs.carol_t = (tt.array() * ch.h_rc.conjugate().array()).matrix().transpose() * ch.H_ar;
  cs.willie_r = (tr.array() * ch.h_rw.conjugate().array()).matrix().transpose() * ch.H_ar;
  cs.jam_to_bob = (ch.h_rb.conjugate().array() * tt.array() * ch.h_rc.conjugate().array()).sum();
  cs.jam_to_willie = (ch.h_rw.conjugate().array() * tt.array() * ch.h_rc.conjugate().array()).sum();
  return cs;
}

Capacities capacities(const ChannelSet& ch, const StarRisState& ris,
                      const Beamformers& bf, double P_j, const SystemConfig& config) {
  if (P_j < 0.0 || P_j > config.P_j_max)
    throw std::invalid_argument("capacities: P_j outside [0, P_j_max]");
  const CascadeSet cs = cascade_vectors(ch, ris);

  const double sig_b = std::norm((cs.bob_r * bf.w_b)(0));
  const double int_b = std::norm((cs.bob_r * bf.w_c)(0)) + std::norm(cs.jam_to_bob) * P_j;
  const double sig_c = std::norm((cs.carol_t * bf.w_c)(0));
  const double int_c = std::norm((cs.carol_t * bf.w_b)(0)) + std::norm(ch.h_cc) * P_j;

  return {std::log2(1.0 + sig_b / (int_b + config.sigma_b2)),
          std::log2(1.0 + sig_c / (int_c + config.sigma_c2))};
}

}  // namespace starcov
