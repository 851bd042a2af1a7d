#pragma once

#include <functional>
#include <vector>

#include "poredyn/characteristics.hpp"
#include "poredyn/numerics.hpp"
#include "poredyn/parabolic.hpp"
#include "poredyn/profile.hpp"
#include "poredyn/transport.hpp"

namespace poredyn {

/// Quadratic remainder h in the exact splitting of the mean-field coefficient
/// around the stationary moment n_s(t) = N_s sqrt(t),
///   1/(1 + n_f^2) = 1/n_s^2 - 2 n_g / n_s^3 - h(n_g, t),  n_f = n_s + n_g.
double eval_h_hyperbolic(const SelfSimilarProfile& profile, double n_g, double t);

/// Self-similar form H(N_G, tau) = t h(n_g, t) with n_g = N_G sqrt(t),
/// tau = ln t.
double eval_H(const SelfSimilarProfile& profile, double N_G, double tau);

/// Perturbation drift coefficient j = beta (1/n_s^2 - 1/(1+n_f^2))
///   = beta (2 n_g / n_s^3 + h).
double eval_j_hyperbolic(const ModelParams& params, const SelfSimilarProfile& profile,
                         double n_g, double t);

/// Self-similar drift J(N_G, tau) = t j = 2 beta N_G / N_s^3 + beta H.
double eval_J(const ModelParams& params, const SelfSimilarProfile& profile,
              double N_G, double tau);

/// Remainder h for the boundary-layer split n_f = n_s + n_g + n_bl,
///   1/n_s^2 - 1/(1+n_f^2) = 2 n_g / n_s^3 + h.
/// With variant_bl_cross the layer-profile cross term 2 n_bl (n_g + n_s) is
/// bookkept as 2 n_bl (n_g + 2 n_s) instead (alternative splitting; breaks the
/// identity above by O(n_bl n_s) in the numerator).
double eval_h_parabolic(const SelfSimilarProfile& profile, double n_g, double n_bl,
                        double t, bool variant_bl_cross = false);

enum class MomentVariant { hyperbolic, parabolic };

/// Sampled moment decomposition along a run: n_f = n_s + n_g (+ n_bl for the
/// parabolic variant) together with the induced drift, in both the physical
/// and the self-similar clock. By construction H = t h and J = t j.
struct PerturbationTrace {
  MomentVariant variant = MomentVariant::hyperbolic;
  std::vector<double> t, tau;
  std::vector<double> n_g, n_s, n_bl, h, j;
  std::vector<double> N_G, H, J;
};

/// Splits a mean-field trace around the stationary moment (and, for the
/// parabolic variant, the boundary-layer moment supplied via layer).
PerturbationTrace build_perturbation_trace(const MeanFieldTrace& trace,
                                           const ModelParams& params,
                                           const SelfSimilarProfile& profile,
                                           MomentVariant variant,
                                           const BoundaryLayer* layer = nullptr);

struct VolterraOptions {
  double dtau = 0.05;  // product-trapezoid step (<= 0.05 enforced)
  int picard_cap = 50;
  double picard_tol = 1e-12;
  int sweeps = 3;  // map self-consistency rebuilds
  /// Optional moment-independent forcing density integrated alongside the
  /// J-kernel product: adds int extra(tau, r) dr to the right-hand side
  /// (used to bookkeep layer remainders in the parabolic variant).
  std::function<double(double, double)> extra_forcing;
};

struct VolterraResult {
  std::vector<double> tau;
  std::vector<double> N_G;
  std::vector<double> J;       // J(N_G(tau_k), tau_k)
  std::vector<double> Delta2;  // forcing from the initial perturbation
};

/// Solves the closed first-moment equation
///   N_G(tau) = Delta2(tau) + int_{tau0}^tau J(N_G(r), r) Ktilde(tau, r) dr,
/// where Ktilde is the moment kernel of the linear propagator and
///   Delta2(tau) = e^{(tau-tau0)/2} nu_G0(M(tau)) / M'(tau).
/// nu_G0(R) = int_R^inf (y - R) G0(y) dy is supplied by the caller for the
/// full initial perturbation. The propagator map starts frozen and is rebuilt
/// from the computed J trace for `sweeps` self-consistency passes.
VolterraResult solve_NG_volterra(const ModelParams& params,
                                 const SelfSimilarProfile& profile,
                                 const std::function<double(double)>& nu_G0,
                                 double tau0, double tau1,
                                 const VolterraOptions& options = {});

struct XYOptions {
  double dtau = 1e-3;              // fixed RK4 step
  std::size_t record_every = 10;   // keep every k-th node (last always kept)
};

struct XYResult {
  std::vector<double> tau;
  std::vector<double> X;
  std::vector<double> Y;
  std::vector<double> N;  // recovered moment
};

/// Integrates the iterated-moment pair
///   d/dtau (X, Y) = A (X, Y) + b(tau, X, Y),
///   A = [[-(1-g)/g, (1-g)(1-2g)/g], [-(1-g)/g, (1-g)(1-2g)/g - g]],
///   b1 = (Delta2 + H)(1 + Delta1) - ((1-g)/g) Delta1 (X - (1-2g) Y),
///   b2 = Delta2 + H,
/// and recovers N = -((1-g)/g) X + ((1-g)(1-2g)/g) Y + Delta2.
/// Requires gamma in (0, 1/2), eta in (0, 1-gamma), and
/// |Delta1| <= gamma^3 (1 - gamma - eta) / 16 along the trajectory; violations
/// raise std::domain_error naming the bound.
XYResult integrate_xy_system(const SelfSimilarProfile& profile, double eta,
                             const std::function<double(double)>& Delta1,
                             const std::function<double(double)>& Delta2,
                             const std::function<double(double)>& Hterm,
                             double tau0, double tau1, double X0, double Y0,
                             const XYOptions& options = {});

struct DecayFit {
  double rate = 0.0;       // -slope of the ln|v| vs tau line
  double amplitude = 0.0;  // e^{intercept}
  double r2 = 0.0;
};

/// Least-squares line through (tau, ln|v|) for samples with |v| > floor.
/// Throws std::invalid_argument when fewer than 10 samples survive the floor.
DecayFit fit_decay_rate(const std::vector<double>& tau,
                        const std::vector<double>& values, double floor = 1e-14);

}  // namespace poredyn
