#pragma once

#include <functional>
#include <vector>

#include "poredyn/field.hpp"
#include "poredyn/grid.hpp"
#include "poredyn/profile.hpp"

namespace poredyn {

/// Affine characteristics map of the mean-field transport operator.
///
/// Physical clock: the drift 1 + x(-beta/n_s^2 + j(t)) generates
///   T(t,t0) phi(x) = m'(t,t0) phi(m'(t,t0) x + m(t,t0)),
///   m'(t,t0) = (t/t0)^{gamma-1} exp(int_{t0}^t j),   m = int_{t0}^t m' dr.
/// Self-similar clock: the drift 1 + (gamma + J(tau)) y generates
///   Ttilde(tau,tau0) Phi(y) = e^{(tau-tau0)/2} M' Phi(M' y + M),
///   M'(tau,tau0) = exp(int_{tau0}^tau (gamma + J)),  M = int M' dr.
/// With zero trace both reduce to closed forms (frozen map).
class CharacteristicsMap {
public:
  enum class Clock { physical, selfsim };

  /// Exact map for a vanishing perturbation trace; valid for all t >= t0.
  static CharacteristicsMap frozen(const SelfSimilarProfile& profile, Clock clock,
                                   double t0);

  /// Map for a given trace (j in the physical clock, J in the self-similar
  /// one), integrated on [t0, t_end] with nested Gauss panels; m and m' carry
  /// relative error well below 1e-10 for smooth traces.
  static CharacteristicsMap build(const SelfSimilarProfile& profile, Clock clock,
                                  double t0, double t_end,
                                  std::function<double(double)> trace);

  double m(double t) const;        // m(t, t0)
  double m_prime(double t) const;  // m'(t, t0)
  double m(double t, double r) const;        // two-time, r <= t
  double m_prime(double t, double r) const;  // m'(t)/m'(r)

  Clock clock() const { return clock_; }
  double t0() const { return t0_; }
  double t_end() const { return t_end_; }
  double gamma() const { return gamma_; }
  double trace(double t) const { return trace_ ? trace_(t) : 0.0; }
  bool is_frozen() const { return !trace_; }

private:
  CharacteristicsMap() = default;
  void check_time(double t) const;
  double integral_I(double t) const;  // int_{t0}^t trace
  std::pair<double, double> segment(double I0, double a, double b) const;

  Clock clock_ = Clock::physical;
  double t0_ = 1.0, t_end_ = 1.0, gamma_ = 0.0;
  std::function<double(double)> trace_;
  struct Node { double t, I, m; };
  std::vector<Node> nodes_;
  double base_log(double t) const;  // ln of the frozen part of m'
};

/// Push-forward T(t,t0) phi0 evaluated on a grid (physical clock).
DensityField apply_T(const CharacteristicsMap& map,
                     const std::function<double(double)>& phi0, double t,
                     const RadialGrid& out_grid);
DensityField apply_T(const CharacteristicsMap& map, const DensityField& phi0,
                     double t);

/// Push-forward Ttilde(tau,tau0) Phi0 (self-similar clock).
DensityField apply_Ttilde(const CharacteristicsMap& map,
                          const std::function<double(double)>& Phi0, double tau,
                          const RadialGrid& out_grid);

/// Pointwise evaluators (no grid).
double eval_T(const CharacteristicsMap& map,
              const std::function<double(double)>& phi0, double x, double t);
double eval_Ttilde(const CharacteristicsMap& map,
                   const std::function<double(double)>& Phi0, double y, double tau);

/// int_0^inf x T(t,r) d/dx(x f_s(x,r)) dx via the exact map,
///   = -(sqrt(r)/m'(t,r)) * int_{m(t,r)/r}^inf y F_s dy.
double moment_T_dxfs(const SelfSimilarProfile& profile,
                     const CharacteristicsMap& map, double t, double r);

/// The same moment scaled by 2 beta / N_s^3. For a frozen map this equals
///   -((1-gamma)/gamma) sqrt(t) (1 - (1-2gamma)(t/r)^{-gamma}).
double scaled_moment_T_dxfs(const SelfSimilarProfile& profile,
                            const CharacteristicsMap& map, double t, double r);

/// Relative defect delta_1 of the scaled moment against its frozen closed
/// form; requires gamma in (0, 1/2).
double kernel_delta1(const SelfSimilarProfile& profile,
                     const CharacteristicsMap& map, double t, double r);

/// Self-similar kernel  int_0^inf y Ttilde(tau,r) d/dy(y F_s) dy
///   = -e^{(tau-r)/2} / M'(tau,r) * int_{M(tau,r)}^inf y F_s dy.
double kernel_Ttilde_dyfs(const SelfSimilarProfile& profile,
                          const CharacteristicsMap& map, double tau, double r);

/// Interpolating evaluator for a gridded field: monotone cubic through the
/// cell centers (plus the origin value when present), zero beyond x_max.
std::function<double(double)> field_evaluator(const DensityField& field);

}  // namespace poredyn
