#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "poredyn/field.hpp"
#include "poredyn/grid.hpp"
#include "poredyn/profile.hpp"
#include "poredyn/transport.hpp"

namespace poredyn {

/// Quasi-stationary boundary layer matching the Dirichlet value mu at the
/// origin against the self-similar bulk, f(0,t) = mu with
/// f_s(0,t) = c_s t^{-3/2}.
struct BoundaryLayer {
  double mu = 1.0;
  double cs = 0.0;
  double beta = 3.0;
  double Ns = 2.0;

  /// f_bl(x,t) = (mu - c_s t^{-3/2}) e^{-x}; keeps f_s + f_bl exact at x = 0.
  double value(double x, double t) const;
  /// Same layer in self-similar variables,
  /// F_bl(y,tau) = mu e^{3 tau/2 - y e^tau} - c_s e^{-y e^tau}.
  double selfsim_value(double y, double tau) const;
  /// Layer first moment n_bl(t) = mu - c_s t^{-3/2}.
  double first_moment(double t) const;
  /// First correction capturing the drift tilt of the layer,
  /// (beta mu / 2 N_s^2) (x^2 / t) e^{-x}.
  double refined_term(double x, double t) const;
  /// The layer amplitude is positive for t above (c_s / mu)^{2/3}.
  double positivity_time() const;
};

BoundaryLayer make_boundary_layer(const ModelParams& params,
                                  const SelfSimilarProfile& profile);

/// Defect of the layer ansatz under the parabolic flow,
///   R_bl = beta (1/n_s^2 - j)(mu + c_s t^{-3/2}) d/dx(x e^{-x})
///          - (3/2) c_s t^{-5/2} e^{-x}.
double compute_Rbl(const BoundaryLayer& layer, double j, double x, double t);

struct ParabolicOptions {
  double dt_rel = 0.02;  // dt <= dt_rel * t
  double dt_max = std::numeric_limits<double>::infinity();
  int picard_iters = 2;  // 1 = coefficient lagged, >= 2 midpoint refreshes
  std::vector<double> snapshot_times;
  bool tail_correction = true;  // add the analytic profile tail to n_f
};

struct ParabolicResult {
  MeanFieldTrace trace;
  std::vector<DensityField> snapshots;  // physical variables
};

/// Solves d/dt f = d/dx(d/dx f + (1 - beta x/(1+n_f^2)) f) on (0, x_max) with
/// f(0,t) = mu and f(x_max,t) = 0 by a Scharfetter-Gummel finite-volume flux
/// and backward Euler steps (unconditionally positive). n_f is the midpoint
/// first moment, optionally completed by the analytic tail of `tail` beyond
/// x_max.
ParabolicResult solve_parabolic(const DensityField& f0, const ModelParams& params,
                                const SelfSimilarProfile& tail, double t0,
                                double t_end, const ParabolicOptions& options = {});

/// Same discretisation for the linear flow with a prescribed drift slope,
///   d/dt phi = d/dx(d/dx phi + (1 + a(t) x) phi),
/// homogeneous Dirichlet on both ends. Returns the state at t_end and any
/// requested snapshots.
struct FrozenFlowResult {
  DensityField final_state;
  std::vector<DensityField> snapshots;
};

FrozenFlowResult solve_frozen_flow(const DensityField& phi0,
                                   const std::function<double(double)>& drift_slope,
                                   double t0, double t_end,
                                   const ParabolicOptions& options = {});

/// f minus the self-similar bulk and the boundary layer; the exact cancellation
/// at the origin is asserted to 1e-8 mu.
DensityField subtract_layers(const DensityField& f, const SelfSimilarProfile& profile,
                             const BoundaryLayer& layer);

/// Barrier audit for the diffusive correction: evolves phi0 under the frozen
/// flow (drift slope -(1-gamma)/t + j(t)) and under the pure transport map for
/// the same j, and reports
///   ratio(t) = sup_x |S phi0 - T phi0| /
///              (t^{-3/2} e^{-x/2} + t^{-lambda} (1 + gamma x/t)^{-theta-2}).
/// Requires gamma in (0,1/2) and lambda in [3/2, 3/2 + 2 gamma).
struct BarrierRow {
  double t;
  double ratio;
};

std::vector<BarrierRow> barrier_audit(const ModelParams& params,
                                      const SelfSimilarProfile& profile,
                                      const std::function<double(double)>& phi0,
                                      const std::function<double(double)>& j,
                                      double lambda, double t0, double t_end,
                                      const RadialGrid& grid,
                                      const std::vector<double>& sample_times,
                                      const ParabolicOptions& options = {});

/// Largest admissible amplitude c_j of a drift perturbation
/// |j| <= c_j t0^eta t^{-1-eta} under which the barrier argument closes:
///   min{ 1/(2 N_s^2), (3/2 + 2 gamma - lambda)/(8 beta (theta+2)), gamma/(5 theta) }.
double barrier_cj_bound(const ModelParams& params, const SelfSimilarProfile& profile,
                        double lambda);

}  // namespace poredyn
