#include "starcov/outage.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace starcov {

namespace {

constexpr double kEulerGamma = 0.5772156649015328606;

// E1(z) for z in (0, 1]: power series around zero.
double e1_series(double z) {
  double sum = 0.0, term = 1.0;
  for (int k = 1; k < 64; ++k) {
    term *= -z / k;
    const double add = -term / k;
    sum += add;
    if (std::abs(add) < 1e-18 * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(z) + sum;
}

// E1(z) for z > 1: continued fraction (modified Lentz).
double e1_continued_fraction(double z) {
  const double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 200; ++i) {
    const double a = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (a * d + b);
    c = b + a / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return h * std::exp(-z);
}

}  // namespace

double exp_integral_ei(double x) {
  if (x >= 0.0) throw std::domain_error("exp_integral_ei: requires x < 0");
  const double z = -x;  // Ei(x) = -E1(-x)
  if (z > 700.0) return 0.0;  // below double underflow of e^{-z}
  return z <= 1.0 ? -e1_series(z) : -e1_continued_fraction(z);
}

OutageParams outage_params_from_system(const ChannelSet& ch, const StarRisState& ris,
                                       const Beamformers& bf, const SystemConfig& config,
                                       double R_b, double R_c) {
  const CascadeSet cs = cascade_vectors(ch, ris);
  const double sig_b = std::norm((cs.bob_r * bf.w_b)(0));
  const double leak_b = std::norm((cs.bob_r * bf.w_c)(0));
  const double jam_b = std::norm(cs.jam_to_bob);
  const double sig_c = std::norm((cs.carol_t * bf.w_c)(0));
  const double leak_c = std::norm((cs.carol_t * bf.w_b)(0));

  OutageParams p;
  p.P_j_max = config.P_j_max;
  p.phi_sic = config.phi_sic;
  p.R_b = R_b;
  p.R_c = R_c;
  const double gb = std::exp2(R_b) - 1.0;
  const double gc = std::exp2(R_c) - 1.0;
  p.upsilon = (sig_b - gb * (leak_b + config.sigma_b2)) / (gb * jam_b);
  p.gamma_cap = (sig_c - gc * (leak_c + config.sigma_c2)) / gc;
  return p;
}

double outage_ab(const OutageParams& p) {
  if (p.upsilon < 0.0) return 1.0;
  if (p.upsilon > p.P_j_max) return 0.0;
  return 1.0 - p.upsilon / p.P_j_max;
}

double outage_ac(const OutageParams& p) {
  if (p.gamma_cap < 0.0) return 1.0;
  const double x = p.gamma_cap / (p.phi_sic * p.P_j_max);
  if (x == 0.0) return 1.0;
  if (x > 700.0) return 0.0;
  const double v = std::exp(-x) + x * exp_integral_ei(-x);
  return std::clamp(v, 0.0, 1.0);
}

double solve_sigma_star(double kappa, double phi_sic, double P_j_max) {
  if (!(kappa > 0.0 && kappa < 1.0))
    throw std::domain_error("solve_sigma_star: kappa must be in (0,1)");
  auto delta_ac = [](double x) {
    if (x <= 0.0) return 1.0;
    if (x > 700.0) return 0.0;
    return std::exp(-x) + x * exp_integral_ei(-x);
  };

  double hi = 1.0;
  while (delta_ac(hi) >= kappa) {
    hi *= 2.0;
    if (hi > 1e12) throw std::runtime_error("solve_sigma_star: bracket failure");
  }
  double lo = 0.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (delta_ac(mid) > kappa ? lo : hi) = mid;
    if (hi - lo <= 1e-10 * hi) break;
  }
  return 0.5 * (lo + hi) * phi_sic * P_j_max;
}

RateBounds rate_bounds(const ChannelSet& ch, const StarRisState& ris,
                       const Beamformers& bf, const SystemConfig& config) {
  const CascadeSet cs = cascade_vectors(ch, ris);
  const double sig_b = std::norm((cs.bob_r * bf.w_b)(0));
  const double leak_b = std::norm((cs.bob_r * bf.w_c)(0));
  const double jam_b = std::norm(cs.jam_to_bob);
  const double sig_c = std::norm((cs.carol_t * bf.w_c)(0));
  const double leak_c = std::norm((cs.carol_t * bf.w_b)(0));

  RateBounds rb;
  rb.sigma_star = solve_sigma_star(config.kappa, config.phi_sic, config.P_j_max);
  rb.R_bb = std::log2(1.0 + sig_b / (leak_b + jam_b * config.P_j_max * (1.0 - config.iota) +
                                     config.sigma_b2));
  rb.R_cc = std::log2(1.0 + sig_c / (leak_c + rb.sigma_star + config.sigma_c2));
  return rb;
}

}  // namespace starcov
