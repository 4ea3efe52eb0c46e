#include "starcov/rank_one.hpp"

#include <cmath>
#include <stdexcept>

#include "starcov/rng.hpp"

namespace starcov {

namespace {

MatrixXcd hermitize(const MatrixXcd& a) { return 0.5 * (a + a.adjoint()); }

}  // namespace

double rank_one_gap(const MatrixXcd& q) {
  if (q.rows() != q.cols()) throw std::domain_error("rank_one_gap: non-square matrix");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(q), Eigen::EigenvaluesOnly);
  const VectorXd ev = es.eigenvalues();
  const double lmax = ev.maxCoeff();
  if (ev.minCoeff() < -1e-8 * std::max(1.0, lmax))
    throw std::domain_error("rank_one_gap: matrix is not PSD");
  return ev.sum() - lmax;
}

SpectralMinorant linearize_spectral_norm(const MatrixXcd& q_ref) {
  if (q_ref.rows() != q_ref.cols())
    throw std::domain_error("linearize_spectral_norm: non-square matrix");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(q_ref));
  const Eigen::Index top = q_ref.rows() - 1;  // eigenvalues sorted ascending
  const VectorXcd u = es.eigenvectors().col(top);
  SpectralMinorant m;
  m.outer = u * u.adjoint();
  // <uu^H, Q_ref> equals lambda_max, so the offset vanishes up to rounding; it
  // is kept so evaluate() is exact at the reference point.
  m.offset = es.eigenvalues()[top] - m.outer.cwiseProduct(q_ref.conjugate()).sum().real();
  return m;
}

RankOneExtraction extract_rank_one(const MatrixXcd& q,
                                   const std::function<double(const VectorXcd&)>& objective,
                                   const std::function<bool(const VectorXcd&)>& feasible,
                                   int n_randomizations, std::uint64_t seed) {
  if (q.rows() != q.cols()) throw std::domain_error("extract_rank_one: non-square matrix");
  if (n_randomizations < 0)
    throw std::invalid_argument("extract_rank_one: n_randomizations < 0");
  const double trace = q.real().diagonal().sum();
  RankOneExtraction best;
  if (!(trace > 0.0)) return best;

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(hermitize(q));
  const VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  const Eigen::Index n = q.rows();
  // Q^{1/2} for the Gaussian rounding step.
  const MatrixXcd root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();

  auto consider = [&](VectorXcd v, int index) {
    const double nn = v.squaredNorm();
    if (!(nn > 0.0)) return;
    v *= std::sqrt(trace / nn);
    if (!feasible(v)) return;
    const double obj = objective(v);
    if (!best.success || obj > best.objective) {
      best = {true, std::move(v), obj, index};
    }
  };

  consider(es.eigenvectors().col(n - 1), 0);
  Rng rng(seed, 0x52414E4BULL);
  for (int k = 1; k <= n_randomizations; ++k) {
    VectorXcd g(n);
    for (Eigen::Index i = 0; i < n; ++i) g[i] = rng.cgaussian();
    consider(root * g, k);
  }
  return best;
}

}  // namespace starcov
