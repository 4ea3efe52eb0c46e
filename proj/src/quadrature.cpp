#include "starcov/quadrature.hpp"

#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace starcov {

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
  double a, b, value, error;
  bool operator<(const Panel& o) const { return error < o.error; }
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double kronrod = 0.0, gauss = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double x = kKronrodNodes[i] * h;
    const double fv = (i == 7) ? f(c) : f(c - x) + f(c + x);
    kronrod += kKronrodWeights[i] * fv;
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * fv;
  }
  kronrod *= h;
  gauss *= h;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f,
                                    double a, double b, double abs_tol,
                                    int max_subdivisions) {
  std::priority_queue<Panel> panels;
  panels.push(evaluate_panel(f, a, b));
  double total = panels.top().value;
  double error = panels.top().error;

  int splits = 0;
  while (error > abs_tol && splits < max_subdivisions) {
    Panel worst = panels.top();
    panels.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    Panel left = evaluate_panel(f, worst.a, mid);
    Panel right = evaluate_panel(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
    ++splits;
  }
  return {total, error, error <= abs_tol};
}

}  // namespace starcov
