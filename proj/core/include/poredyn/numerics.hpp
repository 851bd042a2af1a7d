#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace poredyn {

/// Bernoulli function B(z) = z / (e^z - 1), the exponential-fitting weight.
/// Stable for all finite z: B(0) = 1, B(z) -> 0 for z -> +inf, B(z) ~ -z for z -> -inf.
double bernoulli(double z);

/// Adaptive Simpson quadrature of f over [a, b] to absolute tolerance tol.
/// Recursion depth is capped; intended for smooth integrands.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

/// Monotone cubic (Fritsch-Carlson) interpolant on strictly increasing nodes.
/// Evaluation outside the node range clamps to the end values.
class PchipInterpolant {
public:
  PchipInterpolant() = default;
  PchipInterpolant(std::vector<double> x, std::vector<double> y);

  double operator()(double xq) const;
  bool empty() const { return x_.empty(); }
  double x_front() const { return x_.front(); }
  double x_back() const { return x_.back(); }

private:
  std::vector<double> x_, y_, d_;  // nodes, values, node derivatives
};

/// Solves a tridiagonal system in place. lower[0] and upper[n-1] are unused.
/// Returns false on a vanishing pivot.
bool solve_tridiagonal(std::vector<double>& lower, std::vector<double>& diag,
                       std::vector<double>& upper, std::vector<double>& rhs);

/// Least-squares line y = slope*x + intercept; r2 is the coefficient of determination.
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace poredyn
