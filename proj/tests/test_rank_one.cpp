#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "starcov/rank_one.hpp"
#include "starcov/rng.hpp"

using namespace starcov;

namespace {

MatrixXcd random_psd(Rng& rng, int n, int rank) {
  MatrixXcd b(n, rank);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < rank; ++j) b(i, j) = rng.cgaussian(1.0);
  return b * b.adjoint();
}

VectorXcd random_vec(Rng& rng, int n) {
  VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.cgaussian(1.0);
  return v;
}

}  // namespace

TEST_CASE("rank-one gap is zero on outer products and positive otherwise") {
  Rng rng(60, 1);
  const VectorXcd v = random_vec(rng, 7);
  CHECK(rank_one_gap(v * v.adjoint()) <= 1e-12 * v.squaredNorm());
  const int n = 6;
  CHECK(rank_one_gap(MatrixXcd::Identity(n, n)) == doctest::Approx(n - 1.0).epsilon(1e-12));
  const MatrixXcd q = random_psd(rng, n, 3);
  CHECK(rank_one_gap(q) > 0.0);
  CHECK(rank_one_gap(q) <= q.trace().real());
  MatrixXcd neg = MatrixXcd::Identity(3, 3);
  neg(2, 2) = -1.0;
  CHECK_THROWS_AS(rank_one_gap(neg), std::domain_error);
}

TEST_CASE("spectral-norm linearization is tangent and a global minorant") {
  Rng rng(61, 2);
  const int n = 8;
  const MatrixXcd q_ref = random_psd(rng, n, n);
  const SpectralMinorant m = linearize_spectral_norm(q_ref);

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(q_ref);
  const double norm_ref = es.eigenvalues().maxCoeff();
  CHECK(m.evaluate(q_ref) == doctest::Approx(norm_ref).epsilon(1e-12));
  CHECK(m.outer.trace().real() == doctest::Approx(1.0).epsilon(1e-12));

  for (int trial = 0; trial < 30; ++trial) {
    const MatrixXcd q = random_psd(rng, n, 1 + trial % n);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> e2(q);
    CHECK(m.evaluate(q) <= e2.eigenvalues().maxCoeff() + 1e-10);
  }
}

TEST_CASE("extraction recovers the vector exactly from a true rank-one input") {
  Rng rng(62, 3);
  const VectorXcd v = random_vec(rng, 5);
  const MatrixXcd q = v * v.adjoint();
  auto objective = [](const VectorXcd& x) { return x.squaredNorm(); };
  const RankOneExtraction r =
      extract_rank_one(q, objective, [](const VectorXcd&) { return true; }, 10, 99);
  REQUIRE(r.success);
  CHECK(r.v.squaredNorm() == doctest::Approx(q.trace().real()).epsilon(1e-10));
  // Equality up to a global phase: |v^H r.v| = ||v|| * ||r.v||.
  CHECK(std::abs(v.dot(r.v)) == doctest::Approx(v.norm() * r.v.norm()).epsilon(1e-10));
}

TEST_CASE("extraction is deterministic and honors the feasibility callback") {
  Rng rng(63, 4);
  const MatrixXcd q = random_psd(rng, 6, 3);
  auto objective = [](const VectorXcd& x) { return std::abs(x[0]); };
  auto feasible = [](const VectorXcd& x) { return std::arg(x[1]) > 0.0; };
  const RankOneExtraction a = extract_rank_one(q, objective, feasible, 25, 7);
  const RankOneExtraction b = extract_rank_one(q, objective, feasible, 25, 7);
  REQUIRE(a.success);
  CHECK(a.candidate_index == b.candidate_index);
  CHECK((a.v - b.v).norm() == 0.0);
  CHECK(a.v.squaredNorm() == doctest::Approx(q.trace().real()).epsilon(1e-10));

  // Rejecting everything must be reported, not papered over.
  const RankOneExtraction none = extract_rank_one(
      q, objective, [](const VectorXcd&) { return false; }, 25, 7);
  CHECK_FALSE(none.success);
}

TEST_CASE("randomized candidates can beat the leading eigenvector") {
  // Objective favoring alignment with the second eigenvector of a rank-two Q:
  // with enough Gaussian draws, some candidate index > 0 should win.
  Rng rng(64, 5);
  const int n = 6;
  VectorXcd u1 = random_vec(rng, n).normalized();
  const VectorXcd w = random_vec(rng, n);
  VectorXcd u2 = (w - u1 * u1.dot(w)).normalized();
  const MatrixXcd q = 3.0 * u1 * u1.adjoint() + 2.0 * u2 * u2.adjoint();
  auto objective = [&u2](const VectorXcd& x) { return std::abs(u2.dot(x)); };
  const RankOneExtraction r =
      extract_rank_one(q, objective, [](const VectorXcd&) { return true; }, 200, 11);
  REQUIRE(r.success);
  CHECK(r.candidate_index > 0);
  const double eig_score = std::abs(u2.dot(std::sqrt(3.0 + 2.0) * u1));
  CHECK(r.objective > eig_score);
}
