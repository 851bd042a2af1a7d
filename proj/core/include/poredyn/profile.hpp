#pragma once

#include <limits>

namespace poredyn {

/// Parameters of the nonlocal pore-density problem
///   df/dt = d/dx( df/dx + (1 - beta/(1+n_f^2) x) f ),   f(0,t) = mu,
/// and of its transport (vanishing-diffusion) limit.
struct ModelParams {
  double beta = 3.0;    // mean-field coupling, > 0
  double mu = 1.0;      // boundary value at x = 0, > 0
  double gamma = 0.25;  // tail parameter, < 1/2 and != -1/2

  void validate() const;  // throws std::invalid_argument on violation
};

/// Long-time self-similar profile F_s(y) of the rescaling f = t^{-3/2} F(x/t, ln t).
/// For gamma != 0:  F_s = c_s (1 + gamma y)^{-theta}, theta = 1 + 1/(2 gamma),
///   restricted to 1 + gamma y > 0 when gamma < 0.
/// For gamma == 0:  F_s = c_s e^{-y/2} and theta is not meaningful (stored +inf).
/// Derived constants: N_s = sqrt(beta/(1-gamma)), c_s = (1-2 gamma) N_s / 4.
struct SelfSimilarProfile {
  double gamma = 0.0;
  double theta = std::numeric_limits<double>::infinity();
  double Ns = 0.0;  // first moment of F_s
  double cs = 0.0;  // boundary amplitude F_s(0)

  double value(double y) const;       // F_s(y), 0 outside the support
  double derivative(double y) const;  // dF_s/dy, analytic
  double support_end() const;         // -1/gamma for gamma < 0, +inf otherwise

  /// Closed-form tail integrals (0 beyond the support end).
  double tail_mass(double r) const;          // int_r^inf F_s dy
  double tail_first_moment(double r) const;  // int_r^inf y F_s dy
  double nu(double r) const;                 // int_r^inf (y - r) F_s dy

  double beta() const { return (1.0 - gamma) * Ns * Ns; }
};

/// Builds the self-similar profile for the given parameters.
SelfSimilarProfile derive_profile(const ModelParams& params);

/// Residual of the steady-state equation (1+gamma y) F_s' + (gamma + 1/2) F_s
/// at y, using the analytic derivative. y must lie inside the support.
double fs_residual(const SelfSimilarProfile& profile, double y);

}  // namespace poredyn
