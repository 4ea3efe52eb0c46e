#pragma once

#include <cstdint>
#include <functional>

#include "starcov/types.hpp"

namespace starcov {

/// Tr(Q) - ||Q||_2 for a PSD matrix; zero iff Q is (numerically) rank one.
/// Throws std::domain_error if Q is not PSD beyond tolerance.
double rank_one_gap(const MatrixXcd& q);

/// Affine minorant of the spectral norm at a reference point: for any
/// Hermitian Q, evaluate(Q) = <qq^H, Q> + offset <= ||Q||_2 with equality at
/// the reference. outer is qq^H for a unit top eigenvector q of the reference.
struct SpectralMinorant {
  MatrixXcd outer;
  double offset = 0.0;

  double evaluate(const MatrixXcd& q) const {
    return offset + outer.cwiseProduct(q.conjugate()).sum().real();
  }
};

SpectralMinorant linearize_spectral_norm(const MatrixXcd& q_ref);

struct RankOneExtraction {
  bool success = false;
  VectorXcd v;
  double objective = 0.0;
  int candidate_index = -1;  // 0 = leading eigenvector, k = k-th randomization
};

/// Recovers a vector from a (near) rank-one PSD solution: the scaled leading
/// eigenvector plus n_randomizations Gaussian candidates, all rescaled so
/// ||v||^2 = Tr(Q). The best feasible candidate by the objective wins; ties
/// break toward the lowest candidate index. success=false when none passes
/// the feasibility callback.
RankOneExtraction extract_rank_one(const MatrixXcd& q,
                                   const std::function<double(const VectorXcd&)>& objective,
                                   const std::function<bool(const VectorXcd&)>& feasible,
                                   int n_randomizations, std::uint64_t seed);

}  // namespace starcov
