#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <complex>

#include "starcov/rng.hpp"
#include "starcov/sdp.hpp"

using namespace starcov;

namespace {

MatrixXcd random_hermitian(Rng& rng, int n) {
  MatrixXcd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = rng.cgaussian();
  return 0.5 * (a + a.adjoint());
}

MatrixXcd random_psd(Rng& rng, int n) {
  MatrixXcd a(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) a(r, c) = rng.cgaussian();
  return a * a.adjoint();
}

double lambda_max(const MatrixXcd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("max Tr(AX) under Tr(X)<=1 equals the largest eigenvalue") {
  Rng rng(7, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 5;
    const MatrixXcd a = random_hermitian(rng, n);
    SdpProblem p;
    p.maximize = true;
    const int x = p.add_variable(n);
    p.add_objective_term(x, a);
    p.add_constraint({{x, MatrixXcd::Identity(n, n)}}, Relation::LessEq, 1.0);
    const SdpSolution sol = solve_sdp(p);
    REQUIRE(sol.status == SdpStatus::Optimal);
    // With a positive top eigenvalue the budget is tight and the optimum is
    // lambda_max; otherwise X = 0 is optimal.
    const double want = std::max(lambda_max(a), 0.0);
    CHECK(sol.objective == doctest::Approx(want).epsilon(1e-6));
    CHECK(sol.max_violation <= 1e-7);
  }
}

TEST_CASE("contradictory trace bounds are flagged infeasible") {
  SdpProblem p;
  const int x = p.add_variable(3);
  const MatrixXcd eye = MatrixXcd::Identity(3, 3);
  p.add_constraint({{x, eye}}, Relation::LessEq, 1.0);
  p.add_constraint({{x, eye}}, Relation::GreaterEq, 2.0);
  const SdpSolution sol = solve_sdp(p);
  CHECK(sol.status == SdpStatus::Infeasible);
}

TEST_CASE("diagonal pinning is honored") {
  Rng rng(11, 2);
  const int n = 6;
  const MatrixXcd a = random_hermitian(rng, n);
  VectorXd d(n);
  for (int i = 0; i < n; ++i) d[i] = 0.25 + 0.1 * i;
  SdpProblem p;
  p.maximize = true;
  const int x = p.add_variable(n);
  p.add_objective_term(x, a);
  p.pin_diagonal(x, d);
  const SdpSolution sol = solve_sdp(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  for (int i = 0; i < n; ++i)
    CHECK(sol.values[x](i, i).real() == doctest::Approx(d[i]).epsilon(1e-7));
  CHECK(sol.max_violation <= 1e-7);
}

TEST_CASE("cross-configuration agreement on a relaxed beamforming instance") {
  // The w_b-style subproblem: maximize Tr(A W) with a trace budget and a
  // leakage cap, solved twice under different data scalings (the solver must
  // agree after undoing the scaling).
  Rng rng(23, 3);
  for (int trial = 0; trial < 5; ++trial) {
    const int m = 3;
    const MatrixXcd a = random_psd(rng, m);
    const MatrixXcd b = random_psd(rng, m);
    const double budget = 2.0, cap = 0.7;

    auto build = [&](double s) {
      SdpProblem p;
      p.maximize = true;
      const int x = p.add_variable(m);
      p.add_objective_term(x, s * a);
      p.add_constraint({{x, s * MatrixXcd::Identity(m, m)}}, Relation::LessEq, s * budget);
      p.add_constraint({{x, s * b}}, Relation::LessEq, s * cap);
      return p;
    };
    const SdpSolution s1 = solve_sdp(build(1.0));
    const SdpSolution s2 = solve_sdp(build(3.7e-9));
    REQUIRE(s1.status == SdpStatus::Optimal);
    REQUIRE(s2.status == SdpStatus::Optimal);
    CHECK(s1.objective == doctest::Approx(s2.objective / 3.7e-9).epsilon(1e-6));
  }
}

TEST_CASE("equality constraints across two variables") {
  // Couple diag(X) + diag(Y) = 1 and maximize a mixed objective; feasibility
  // of the returned point is the contract under test.
  Rng rng(5, 9);
  const int n = 4;
  const MatrixXcd a = random_hermitian(rng, n);
  const MatrixXcd b = random_hermitian(rng, n);
  SdpProblem p;
  p.maximize = true;
  const int x = p.add_variable(n);
  const int y = p.add_variable(n);
  p.add_objective_term(x, a);
  p.add_objective_term(y, b);
  for (int i = 0; i < n; ++i) {
    MatrixXcd ex = MatrixXcd::Zero(n, n), ey = MatrixXcd::Zero(n, n);
    ex(i, i) = 1.0;
    ey(i, i) = 1.0;
    p.add_constraint({{x, ex}, {y, ey}}, Relation::Equal, 1.0);
  }
  const SdpSolution sol = solve_sdp(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(sol.values[x](i, i).real() + sol.values[y](i, i).real() - 1.0) < 1e-7);
  // Optimum bounded by choosing the larger diagonal contribution pointwise
  // plus the off-diagonal freedom; sanity: objective at least the diagonal
  // greedy value.
  double greedy = 0.0;
  for (int i = 0; i < n; ++i) greedy += std::max(a(i, i).real(), b(i, i).real());
  CHECK(sol.objective >= greedy - 1e-6);
}

TEST_CASE("tiny-scale data (physical units) still solves") {
  Rng rng(31, 4);
  const int m = 3;
  const MatrixXcd a = 1e-15 * random_psd(rng, m);
  const MatrixXcd b = 1e-15 * random_psd(rng, m);
  SdpProblem p;
  p.maximize = true;
  const int x = p.add_variable(m);
  p.add_objective_term(x, a);
  p.add_constraint({{x, MatrixXcd::Identity(m, m)}}, Relation::LessEq, 2.0);
  p.add_constraint({{x, b}}, Relation::LessEq, 3e-15);
  const SdpSolution sol = solve_sdp(p);
  REQUIRE(sol.status == SdpStatus::Optimal);
  CHECK(sol.objective > 0.0);
  CHECK(sol.max_violation <= 1e-9);
}

TEST_CASE("debug dump is self-describing") {
  SdpProblem p;
  const int x = p.add_variable(2);
  p.add_objective_term(x, MatrixXcd::Identity(2, 2));
  p.add_constraint({{x, MatrixXcd::Identity(2, 2)}}, Relation::LessEq, 1.0);
  const std::string dump = p.debug_dump();
  CHECK(dump.find("sdp-problem") != std::string::npos);
  CHECK(dump.find("var 0 dim 2") != std::string::npos);
  CHECK(dump.find("rel <=") != std::string::npos);
}
