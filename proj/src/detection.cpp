#include "starcov/detection.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>
#include <vector>

#include "starcov/quadrature.hpp"
#include "starcov/rng.hpp"

namespace starcov {

namespace {

// log(exp(x) - 1) without overflow for large x or cancellation for small x.
double log_expm1(double x) {
  if (x > 36.0) return x + std::log1p(-std::exp(-x));
  return std::log(std::expm1(x));
}

constexpr double kDegenerateTol = 0.0;  // exact comparisons by design

}  // namespace

DetectionParams DetectionParams::from_system(const ChannelSet& ch, const StarRisState& ris,
                                             const Beamformers& bf, const SystemConfig& config) {
  const VectorXd beta_r = ris.beta_r();
  double refl = 0.0;
  for (Eigen::Index n = 0; n < ch.h_rw.size(); ++n)
    refl += std::norm(ch.h_rw[n]) * beta_r[n];

  const CascadeSet cs = cascade_vectors(ch, ris);
  DetectionParams p;
  p.lambda = refl * bf.varpi_c();
  p.lambda_tilde = refl * (bf.varpi_b() + bf.varpi_c());
  p.gamma = std::norm(cs.jam_to_willie);
  p.sigma_w2 = config.sigma_w2;
  p.P_j_max = config.P_j_max;
  return p;
}

void DetectionParams::validate() const {
  if (lambda < 0.0 || gamma < 0.0 || sigma_w2 < 0.0 || P_j_max < 0.0)
    throw std::invalid_argument("DetectionParams: negative parameter");
  if (lambda_tilde < lambda)
    throw std::invalid_argument("DetectionParams: lambda_tilde < lambda");
}

DepProfile dep_profile(double tau, const DetectionParams& p) {
  p.validate();
  if (!(p.lambda_tilde > p.lambda) || !(p.lambda > 0.0))
    throw std::domain_error("dep_profile: requires lambda_tilde > lambda > 0");
  const double jp = p.gamma * p.P_j_max;
  if (jp <= kDegenerateTol)
    throw std::domain_error("dep_profile: degenerate jamming (gamma * P_j_max == 0)");

  const double t = tau - p.sigma_w2;
  if (tau < p.sigma_w2) return {1.0, 0.0, 1.0};

  double p_fa, p_md;
  if (tau < p.sigma_w2 + jp) {
    p_fa = 1.0 - (t + p.lambda * std::exp(-t / p.lambda) - p.lambda) / jp;
    p_md = (t + p.lambda_tilde * std::exp(-t / p.lambda_tilde) - p.lambda_tilde) / jp;
  } else {
    // exp(-t/l) * (exp(jp/l) - 1) * l / jp, evaluated in log space
    p_fa = p.lambda / jp * std::exp(-t / p.lambda + log_expm1(jp / p.lambda));
    p_md = 1.0 - p.lambda_tilde / jp *
                     std::exp(-t / p.lambda_tilde + log_expm1(jp / p.lambda_tilde));
  }
  return {p_fa, p_md, p_fa + p_md};
}

double optimal_threshold(const DetectionParams& p) {
  p.validate();
  if (!(p.lambda_tilde > p.lambda) || !(p.lambda > 0.0))
    throw std::domain_error("optimal_threshold: requires lambda_tilde > lambda > 0");
  const double jp = p.gamma * p.P_j_max;
  if (jp <= kDegenerateTol)
    throw std::domain_error("optimal_threshold: degenerate jamming");

  const double log_delta = log_expm1(jp / p.lambda) - log_expm1(jp / p.lambda_tilde);
  return p.lambda_tilde * p.lambda / (p.lambda_tilde - p.lambda) * log_delta + p.sigma_w2;
}

double min_dep(const DetectionParams& p) {
  p.validate();
  if (p.lambda_tilde == p.lambda) return 1.0;  // no covert signal to detect
  if (!(p.lambda > 0.0))
    throw std::domain_error("min_dep: requires lambda > 0");
  const double jp = p.gamma * p.P_j_max;
  if (jp <= kDegenerateTol) throw std::domain_error("min_dep: degenerate jamming");

  const double l = p.lambda, lt = p.lambda_tilde;
  const double log_delta = log_expm1(jp / l) - log_expm1(jp / lt);
  // P_e* = 1 - [lt (e^{jp/lt}-1) D^{l/(l-lt)} - l (e^{jp/l}-1) D^{lt/(l-lt)}] / jp
  const double e1 = std::exp(std::log(lt) + log_expm1(jp / lt) + l / (l - lt) * log_delta);
  const double e2 = std::exp(std::log(l) + log_expm1(jp / l) + lt / (l - lt) * log_delta);
  return 1.0 - (e1 - e2) / jp;
}

AsymptoticParams asymptotic_dep_params(const ChannelSet& ch, const StarRisState& ris,
                                       const Beamformers& bf) {
  AsymptoticParams a;
  a.theta_r = ris.reflected_energy();
  a.lambda_a = ch.l_rw * bf.varpi_c() * a.theta_r;
  a.lambda_tilde_a = ch.l_rw * a.theta_r * (bf.varpi_b() + bf.varpi_c());
  const VectorXcd tt = ris.theta_t();
  double s = 0.0;
  for (Eigen::Index n = 0; n < ch.h_rc.size(); ++n)
    s += std::norm(tt[n]) * std::norm(ch.h_rc[n]);
  a.lambda_rw = ch.l_rw * s;
  return a;
}

double asymptotic_min_dep(double gamma, const AsymptoticParams& a,
                          double varpi_b, double varpi_c, double P_j_max) {
  if (varpi_b <= 0.0) return 1.0;
  const double l_theta = a.lambda_tilde_a / (varpi_b + varpi_c);
  const double la = l_theta * varpi_c;
  const double lta = a.lambda_tilde_a;
  const double jp = gamma * P_j_max;
  if (jp <= 0.0) {
    // gamma -> 0 limit of 1 - (l_theta*varpi_b/jp) * Delta^{-c/b} * (e^{jp/lta}-1)
    return 1.0 - varpi_b / (varpi_b + varpi_c) *
                     std::pow((varpi_b + varpi_c) / varpi_c, -varpi_c / varpi_b);
  }
  const double log_delta = log_expm1(jp / la) - log_expm1(jp / lta);
  const double log_term = std::log(l_theta * varpi_b) - std::log(jp) -
                          varpi_c / varpi_b * log_delta + log_expm1(jp / lta);
  return 1.0 - std::exp(log_term);
}

double avg_min_dep_quadrature(const AsymptoticParams& a, double varpi_b,
                              double varpi_c, double P_j_max) {
  if (!(a.lambda_rw > 0.0) || !(P_j_max > 0.0) || !(varpi_c > 0.0))
    throw std::invalid_argument("avg_min_dep_quadrature: nonpositive parameter");
  if (varpi_b <= 0.0) return 1.0;

  // Integrate in u = gamma / lambda_rw; the exponential tail mass beyond U is
  // below 1e-12 and the integrand tends to 1 there.
  const double U = 40.0;
  auto integrand = [&](double u) {
    return asymptotic_min_dep(u * a.lambda_rw, a, varpi_b, varpi_c, P_j_max) *
           std::exp(-u);
  };
  const QuadratureResult q = integrate_adaptive(integrand, 0.0, U, 1e-8);
  if (!q.converged)
    throw std::runtime_error("avg_min_dep_quadrature: quadrature did not reach 1e-8 (error " +
                             std::to_string(q.error_estimate) + ")");
  return q.value + std::exp(-U);  // analytic tail: P_ea* -> 1 as gamma grows
}

double avg_min_dep_lower_bound(const AsymptoticParams& a, double varpi_b,
                               double varpi_c, double P_j_max) {
  if (varpi_b <= 0.0) return 1.0;
  const double l_theta = a.lambda_tilde_a / (varpi_b + varpi_c);
  const double lta = a.lambda_tilde_a;
  const double pj_lrw = P_j_max * a.lambda_rw;
  // pj_lrw -> 0 limit of the bound (no jamming randomness left).
  if (pj_lrw <= 0.0) return 1.0 - varpi_b / (varpi_b + varpi_c);
  return 1.0 + l_theta * varpi_b * std::log(lta / (lta + pj_lrw)) / pj_lrw;
}

namespace {

struct Counts {
  long long fa = 0;
  long long md = 0;
};

Counts run_chunk(const DetectionParams& p, double tau, long long trials,
                 std::uint64_t seed, std::uint64_t stream, RadiometerMode mode, int K) {
  Rng rng(seed, stream);
  Counts c;
  const double jp_gain = p.gamma;
  for (long long t = 0; t < trials; ++t) {
    double stat0, stat1;
    const double pj0 = rng.uniform(0.0, p.P_j_max);
    const double pj1 = rng.uniform(0.0, p.P_j_max);
    if (mode == RadiometerMode::Limiting) {
      const double x0 = p.lambda > 0.0 ? rng.exponential(p.lambda) : 0.0;
      const double x1 = p.lambda_tilde > 0.0 ? rng.exponential(p.lambda_tilde) : 0.0;
      stat0 = x0 + jp_gain * pj0 + p.sigma_w2;
      stat1 = x1 + jp_gain * pj1 + p.sigma_w2;
    } else {
      // One slot: fixed fading amplitudes, K i.i.d. samples averaged.
      const Complex a0 = rng.cgaussian(p.lambda);
      const Complex a1 = rng.cgaussian(p.lambda_tilde);
      const double j0 = std::sqrt(jp_gain * pj0), j1 = std::sqrt(jp_gain * pj1);
      const double sw = std::sqrt(p.sigma_w2);
      double acc0 = 0.0, acc1 = 0.0;
      for (int k = 0; k < K; ++k) {
        acc0 += std::norm(a0 * rng.cgaussian() + j0 * rng.cgaussian() + sw * rng.cgaussian());
        acc1 += std::norm(a1 * rng.cgaussian() + j1 * rng.cgaussian() + sw * rng.cgaussian());
      }
      stat0 = acc0 / K;
      stat1 = acc1 / K;
    }
    if (stat0 > tau) ++c.fa;
    if (stat1 <= tau) ++c.md;
  }
  return c;
}

}  // namespace

EmpiricalRates radiometer_monte_carlo(const DetectionParams& p, double tau,
                                      long long n_trials, std::uint64_t seed,
                                      RadiometerMode mode, int samples_per_trial,
                                      int workers) {
  p.validate();
  if (n_trials < 1) throw std::invalid_argument("radiometer_monte_carlo: n_trials < 1");
  if (mode == RadiometerMode::SampleLevel && samples_per_trial < 1)
    throw std::invalid_argument("radiometer_monte_carlo: samples_per_trial < 1");

  // Fixed-size chunks with one substream each make the result independent of
  // the worker count.
  const long long chunk = mode == RadiometerMode::Limiting ? 1 << 18 : 64;
  const long long n_chunks = (n_trials + chunk - 1) / chunk;
  std::vector<Counts> counts(static_cast<size_t>(n_chunks));

  auto work = [&](long long begin, long long end) {
    for (long long ci = begin; ci < end; ++ci) {
      const long long lo = ci * chunk;
      const long long hi = std::min(n_trials, lo + chunk);
      counts[static_cast<size_t>(ci)] =
          run_chunk(p, tau, hi - lo, seed, 0x52414449ULL + static_cast<std::uint64_t>(ci),
                    mode, samples_per_trial);
    }
  };

  if (workers <= 1 || n_chunks == 1) {
    work(0, n_chunks);
  } else {
    std::vector<std::thread> pool;
    const long long per = (n_chunks + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const long long lo = w * per, hi = std::min(n_chunks, lo + per);
      if (lo < hi) pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  Counts total;
  for (const Counts& c : counts) {
    total.fa += c.fa;
    total.md += c.md;
  }
  EmpiricalRates r;
  r.trials = n_trials;
  r.p_fa = static_cast<double>(total.fa) / n_trials;
  r.p_md = static_cast<double>(total.md) / n_trials;
  r.stderr_fa = std::sqrt(std::max(r.p_fa * (1.0 - r.p_fa), 0.0) / n_trials);
  r.stderr_md = std::sqrt(std::max(r.p_md * (1.0 - r.p_md), 0.0) / n_trials);
  return r;
}

}  // namespace starcov
