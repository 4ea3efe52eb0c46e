#pragma once

#include <string>
#include <vector>

#include "starcov/types.hpp"

namespace starcov {

enum class Relation { LessEq, GreaterEq, Equal };

/// One Re Tr(coeff * X_var) term; coeff must be Hermitian.
struct SdpTerm {
  int var;
  MatrixXcd coeff;
};

struct SdpConstraint {
  std::vector<SdpTerm> terms;
  Relation rel;
  double bound;
};

/// Small complex semidefinite programs in trace form: affine objective and
/// trace-inner-product constraints over Hermitian PSD matrix variables.
struct SdpProblem {
  std::vector<int> dims;
  std::vector<SdpTerm> objective;
  double objective_constant = 0.0;
  bool maximize = false;
  std::vector<SdpConstraint> constraints;

  int add_variable(int dim);
  void add_objective_term(int var, MatrixXcd coeff);
  void add_constraint(std::vector<SdpTerm> terms, Relation rel, double bound);
  /// Pins diag(X_var) to the given real vector (one equality per element).
  void pin_diagonal(int var, const VectorXd& values);

  /// Self-describing text dump for offline reproduction.
  std::string debug_dump() const;
};

enum class SdpStatus { Optimal, Infeasible, NumericFailure };

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericFailure;
  std::vector<MatrixXcd> values;
  double objective = 0.0;  // in the problem's stated sense, constant included
  double max_violation = 0.0;
  int iterations = 0;
  std::string message;
};

/// Primal-dual interior-point solve (Nesterov-Todd scaling). Infeasibility is
/// reported through the status, never as an exception.
SdpSolution solve_sdp(const SdpProblem& p, double tol = 1e-8);

}  // namespace starcov
