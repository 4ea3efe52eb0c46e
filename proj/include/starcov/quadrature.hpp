#pragma once

#include <functional>

namespace starcov {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = false;
};

/// Adaptive Gauss-Kronrod (7-15) integration on a finite interval to the given
/// absolute tolerance.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_subdivisions = 2000);

}  // namespace starcov
