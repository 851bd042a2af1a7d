#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "poredyn/characteristics.hpp"
#include "poredyn/field.hpp"
#include "poredyn/grid.hpp"
#include "poredyn/profile.hpp"

namespace poredyn {

/// Initial condition together with its partial mass and first moment,
///   partial_mass(B)   = int_B^inf f0 dx,
///   partial_moment(B) = int_B^inf x f0 dx,
/// which is all the affine solver needs to track the mean field exactly.
struct InitialData {
  std::function<double(double)> value;
  std::function<double(double)> partial_mass;
  std::function<double(double)> partial_moment;
};

/// f_s(x, t0) = t0^{-3/2} F_s(x / t0) with analytic partials.
InitialData initial_from_profile(const SelfSimilarProfile& profile, double t0);

/// Arbitrary initial condition; partials by adaptive quadrature up to x_big,
/// beyond which f0 must be negligible.
InitialData initial_from_function(std::function<double(double)> f0, double x_big);

/// Componentwise sum of two initial conditions.
InitialData combine(const InitialData& a, const InitialData& b);

/// Mean-field history n_f(t) = int_0^inf x f dx recorded at the solver's
/// accepted steps.
struct MeanFieldTrace {
  std::vector<double> t;
  std::vector<double> n_f;
  double tau(std::size_t i) const;  // ln t
  double N_F(std::size_t i) const;  // n_f / sqrt(t)
  /// Monotone-cubic interpolant of n_f over t.
  std::function<double(double)> interpolant() const;
};

struct TransportOptions {
  double dt_rel = 0.05;      // dt <= dt_rel * t
  double dt_max = std::numeric_limits<double>::infinity();
  double picard_tol = 1e-10;
  int picard_cap = 5;
  std::vector<double> snapshot_times;  // physical times, ascending
  std::optional<RadialGrid> snapshot_grid;
  Variables snapshot_variables = Variables::selfsim;
  /// When set, the mean-field coupling is bypassed and the affine map is read
  /// from this prescribed characteristics map (physical clock).
  const CharacteristicsMap* prescribed = nullptr;
};

struct TransportResult {
  MeanFieldTrace trace;
  std::vector<DensityField> snapshots;
  double map_scale = 1.0;  // final composed A in f(x,t) = A f0(A x + B)
  double map_shift = 0.0;  // final composed B
};

/// Solves d/dt f = d/dx((1 - beta/(1+n_f^2) x) f) on x > 0 by composing the
/// exact affine step for the coefficient frozen over each dt, with a Picard
/// loop closing n_f at the midpoint rule in the coefficient. Positivity and
/// the boundary inflow are exact; the only error is the time discretisation
/// of the nonlinear coupling.
TransportResult solve_transport(const InitialData& f0, const ModelParams& params,
                                double t0, double t_end,
                                const TransportOptions& options = {});

struct UpwindOptions {
  double cfl = 0.9;  // rejected above 0.9
  std::vector<double> snapshot_times;
};

struct UpwindResult {
  std::vector<DensityField> snapshots;
  double mass_final = 0.0;
  double mass_initial = 0.0;
  double inflow_minus_outflow = 0.0;  // time-integrated boundary fluxes
};

/// First-order finite-volume upwind oracle for d/dt f = d/dx((1 + a(t) x) f)
/// on the grid of f0, zero-gradient at the outer edge. Independent of the
/// affine solver; used to cross-check it.
UpwindResult upwind_fv_transport(const DensityField& f0,
                                 const std::function<double(double)>& drift_slope,
                                 double t0, double t_end,
                                 const UpwindOptions& options = {});

/// Long-time diagnostics of the frozen self-similar semigroup: for each tau
/// reports M, M', M'/M, nu at M, and the sup distance between Ttilde Phi0 and
/// the stationary profile on [0, y_max].
struct ProfileLimitRow {
  double tau;
  double M;
  double M_prime;
  double ratio;      // M'/M
  double nu_at_M;    // int_M^inf (y - M) F_s dy
  double sup_error;  // sup_y |Ttilde Phi0 - F_s|
};

std::vector<ProfileLimitRow> profile_limit_diagnostics(
    const std::function<double(double)>& Phi0, const SelfSimilarProfile& profile,
    const CharacteristicsMap& selfsim_map, const std::vector<double>& taus,
    double y_max, std::size_t n_eval = 512);

}  // namespace poredyn
