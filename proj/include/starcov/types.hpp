#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace starcov {

using Complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::RowVectorXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

/// Physical and algorithmic scalars of one system instance. All powers are in
/// watts; dB/dBm conversions happen at the config-file boundary only.
struct SystemConfig {
  int M = 3;   // transmit antennas at Alice
  int N = 16;  // STAR-RIS elements

  double P_max = 2.0;          // Alice power budget [W]
  double P_j_max = 1.0;        // max jamming power [W]
  double sigma_b2 = 1e-17;     // noise power at Bob [W]
  double sigma_c2 = 1e-17;     // noise power at Carol [W]
  double sigma_w2 = 1e-17;     // noise power at Willie [W]
  double phi_sic = 1e-16;      // residual self-interference power fraction
  double rho0 = 0.01;          // reference path gain at 1 m
  double alpha = 2.6;          // path-loss exponent
  double d_ar = 500.0;         // Alice -> RIS [m]
  double d_rb = 100.0;         // RIS -> Bob [m]
  double d_rc = 150.0;         // RIS -> Carol [m]
  double d_rw = 80.0;          // RIS -> Willie [m]
  double epsilon = 0.1;        // covertness requirement
  double iota = 0.1;           // Bob outage threshold
  double kappa = 0.1;          // Carol outage threshold
  double R_star = 4.0;         // Carol QoS rate [bits/channel-use]
  std::uint64_t rng_seed = 1;

  void validate() const {
    auto pos = [](double v, const char* name) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    if (M < 1) throw std::invalid_argument("M must be >= 1");
    if (N < 1) throw std::invalid_argument("N must be >= 1");
    pos(P_max, "P_max");
    pos(P_j_max, "P_j_max");
    pos(sigma_b2, "sigma_b2");
    pos(sigma_c2, "sigma_c2");
    pos(sigma_w2, "sigma_w2");
    pos(rho0, "rho0");
    pos(alpha, "alpha");
    pos(d_ar, "d_ar");
    pos(d_rb, "d_rb");
    pos(d_rc, "d_rc");
    pos(d_rw, "d_rw");
    if (!(phi_sic >= 0.0 && phi_sic <= 1.0))
      throw std::invalid_argument("phi_sic must be in [0,1]");
    auto unit = [](double v, const char* name) {
      if (!(v > 0.0 && v < 1.0))
        throw std::invalid_argument(std::string(name) + " must be in (0,1)");
    };
    unit(epsilon, "epsilon");
    unit(iota, "iota");
    unit(kappa, "kappa");
    if (R_star < 0.0) throw std::invalid_argument("R_star must be >= 0");
  }
};

/// One realization of all channels. Vectors h_* already carry the square root
/// of their path gains; immutable after generation.
struct ChannelSet {
  MatrixXcd H_ar;  // N x M, Alice -> RIS
  VectorXcd h_rb;  // N, RIS -> Bob
  VectorXcd h_rc;  // N, RIS -> Carol
  VectorXcd h_rw;  // N, RIS -> Willie
  Complex h_cc;    // Carol self-interference
  double l_ar = 0, l_rb = 0, l_rc = 0, l_rw = 0;  // path power gains
};

/// Energy-splitting STAR-RIS coefficients. beta_r[n] + beta_t[n] = 1 holds for
/// every element; phases wrapped to [0, 2*pi).
class StarRisState {
 public:
  StarRisState(VectorXd beta_r, VectorXd phi_r, VectorXd phi_t)
      : beta_r_(std::move(beta_r)), phi_r_(std::move(phi_r)), phi_t_(std::move(phi_t)) {
    const auto n = beta_r_.size();
    if (phi_r_.size() != n || phi_t_.size() != n)
      throw std::invalid_argument("StarRisState: size mismatch");
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!(beta_r_[i] >= -1e-12 && beta_r_[i] <= 1.0 + 1e-12))
        throw std::invalid_argument("StarRisState: beta_r outside [0,1]");
      beta_r_[i] = std::clamp(beta_r_[i], 0.0, 1.0);
      phi_r_[i] = wrap_phase(phi_r_[i]);
      phi_t_[i] = wrap_phase(phi_t_[i]);
    }
  }

  static StarRisState uniform_split(int n) {
    return StarRisState(VectorXd::Constant(n, 0.5), VectorXd::Zero(n), VectorXd::Zero(n));
  }

  static double wrap_phase(double phi) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    phi = std::fmod(phi, two_pi);
    return phi < 0.0 ? phi + two_pi : phi;
  }

  Eigen::Index size() const { return beta_r_.size(); }
  const VectorXd& beta_r() const { return beta_r_; }
  VectorXd beta_t() const { return VectorXd::Ones(beta_r_.size()) - beta_r_; }
  const VectorXd& phi_r() const { return phi_r_; }
  const VectorXd& phi_t() const { return phi_t_; }

  /// diag(Theta_r): sqrt(beta_r[n]) * exp(i*phi_r[n])
  VectorXcd theta_r() const { return coeffs(beta_r_, phi_r_); }
  /// diag(Theta_t): sqrt(1 - beta_r[n]) * exp(i*phi_t[n])
  VectorXcd theta_t() const { return coeffs(beta_t(), phi_t_); }

  /// theta_r in the paper's scalar sense: sum of reflected energy splits.
  double reflected_energy() const { return beta_r_.sum(); }

 private:
  static VectorXcd coeffs(const VectorXd& beta, const VectorXd& phi) {
    VectorXcd v(beta.size());
    for (Eigen::Index i = 0; i < beta.size(); ++i)
      v[i] = std::sqrt(beta[i]) * std::exp(Complex(0.0, phi[i]));
    return v;
  }

  VectorXd beta_r_, phi_r_, phi_t_;
};

/// Alice's precoding vectors.
struct Beamformers {
  VectorXcd w_b;
  VectorXcd w_c;

  double varpi_b() const { return w_b.squaredNorm(); }
  double varpi_c() const { return w_c.squaredNorm(); }
  double total_power() const { return varpi_b() + varpi_c(); }
};

}  // namespace starcov
