#include "poredyn/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "poredyn/characteristics.hpp"
#include "poredyn/numerics.hpp"

namespace poredyn {
namespace {

// Scharfetter-Gummel backward Euler step for
//   d/dt f = d/dx(d/dx f + (1 + a x) f)
// with Dirichlet values left_value at x = 0 and 0 at x_max. The potential is
// Phi(x) = x + a x^2 / 2, so the discrete steady state is exactly e^{-Phi}.
void sg_step(const RadialGrid& grid, std::vector<double>& f, double left_value,
             double a, double dt) {
  const std::size_t n = grid.size();
  // z across a face between points xl < xr
  auto face_z = [a](double xl, double xr) {
    return (xr - xl) * (1.0 + 0.5 * a * (xr + xl));
  };
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(f);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.width(i);
    // left face of cell i
    const double xl = (i == 0) ? 0.0 : grid.center(i - 1);
    const double dl = grid.center(i) - xl;
    const double zl = face_z(xl, grid.center(i));
    diag[i] += dt / w / dl * bernoulli(-zl);
    if (i == 0)
      rhs[0] += dt / w / dl * bernoulli(zl) * left_value;
    else
      lower[i] = -dt / w / dl * bernoulli(zl);
    // right face of cell i
    const double xr = (i + 1 == n) ? grid.x_max() : grid.center(i + 1);
    const double dr = xr - grid.center(i);
    const double zr = face_z(grid.center(i), xr);
    diag[i] += dt / w / dr * bernoulli(zr);
    if (i + 1 < n) upper[i] = -dt / w / dr * bernoulli(-zr);
    diag[i] += 1.0;
  }
  if (!solve_tridiagonal(lower, diag, upper, rhs))
    throw std::runtime_error("sg_step: singular tridiagonal system");
  f = std::move(rhs);
}

double moment_with_tail(const DensityField& f, const SelfSimilarProfile* tail) {
  return tail ? first_moment(f, *tail) : first_moment(f);
}

std::vector<double> checked_times(std::vector<double> times, double t0, double t_end) {
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double s : times)
    if (s < t0 - 1e-12 || s > t_end + 1e-12)
      throw std::invalid_argument("snapshot time outside [t0, t_end]");
  return times;
}

}  // namespace

double BoundaryLayer::value(double x, double t) const {
  return (mu - cs * std::pow(t, -1.5)) * std::exp(-x);
}

double BoundaryLayer::selfsim_value(double y, double tau) const {
  return mu * std::exp(1.5 * tau - y * std::exp(tau)) -
         cs * std::exp(-y * std::exp(tau));
}

double BoundaryLayer::first_moment(double t) const {
  return mu - cs * std::pow(t, -1.5);
}

double BoundaryLayer::refined_term(double x, double t) const {
  return 0.5 * beta * mu / (Ns * Ns) * x * x / t * std::exp(-x);
}

double BoundaryLayer::positivity_time() const {
  return std::pow(cs / mu, 2.0 / 3.0);
}

BoundaryLayer make_boundary_layer(const ModelParams& params,
                                  const SelfSimilarProfile& profile) {
  params.validate();
  return BoundaryLayer{params.mu, profile.cs, params.beta, profile.Ns};
}

double compute_Rbl(const BoundaryLayer& layer, double j, double x, double t) {
  const double ns2 = layer.Ns * layer.Ns * t;
  const double amp = layer.mu + layer.cs * std::pow(t, -1.5);
  return layer.beta * (1.0 / ns2 - j) * amp * (1.0 - x) * std::exp(-x) -
         1.5 * layer.cs * std::pow(t, -2.5) * std::exp(-x);
}

ParabolicResult solve_parabolic(const DensityField& f0, const ModelParams& params,
                                const SelfSimilarProfile& tail, double t0,
                                double t_end, const ParabolicOptions& options) {
  params.validate();
  if (!(t0 > 0.0) || !(t_end > t0))
    throw std::invalid_argument("solve_parabolic: need 0 < t0 < t_end");
  if (f0.variables != Variables::physical)
    throw std::invalid_argument("solve_parabolic: physical variables expected");
  if (options.picard_iters < 1)
    throw std::invalid_argument("solve_parabolic: picard_iters >= 1");
  const std::vector<double> snaps = checked_times(options.snapshot_times, t0, t_end);
  const RadialGrid& grid = f0.grid;
  const double beta = params.beta, mu = params.mu;
  const SelfSimilarProfile* tail_ptr = options.tail_correction ? &tail : nullptr;

  std::vector<double> f = f0.values;
  double t = t0;
  auto current_field = [&]() {
    return DensityField{grid, f, Variables::physical, t, false,
                        std::optional<double>(mu)};
  };
  double n = moment_with_tail(current_field(), tail_ptr);

  ParabolicResult result;
  result.trace.t.push_back(t);
  result.trace.n_f.push_back(n);
  std::size_t next_snap = 0;
  auto emit_due = [&]() {
    while (next_snap < snaps.size() && snaps[next_snap] <= t * (1.0 + 1e-13)) {
      result.snapshots.push_back(current_field());
      ++next_snap;
    }
  };
  emit_due();

  while (t < t_end * (1.0 - 1e-14)) {
    double dt = std::min(options.dt_rel * t, options.dt_max);
    double stop = t_end;
    if (next_snap < snaps.size()) stop = std::min(stop, snaps[next_snap]);
    if (t + dt >= stop - 1e-12 * stop) dt = stop - t;

    double a = -beta / (1.0 + n * n);
    std::vector<double> f_new;
    double n_new = n;
    for (int it = 0; it < options.picard_iters; ++it) {
      f_new = f;
      sg_step(grid, f_new, mu, a, dt);
      const double n_next = moment_with_tail(
          DensityField{grid, f_new, Variables::physical, t + dt, false,
                       std::optional<double>(mu)},
          tail_ptr);
      a = -0.5 * beta * (1.0 / (1.0 + n * n) + 1.0 / (1.0 + n_next * n_next));
      n_new = n_next;
    }
    f = std::move(f_new);
    n = n_new;
    t += dt;
    result.trace.t.push_back(t);
    result.trace.n_f.push_back(n);
    emit_due();
  }
  return result;
}

FrozenFlowResult solve_frozen_flow(const DensityField& phi0,
                                   const std::function<double(double)>& drift_slope,
                                   double t0, double t_end,
                                   const ParabolicOptions& options) {
  if (!(t0 > 0.0) || !(t_end > t0))
    throw std::invalid_argument("solve_frozen_flow: need 0 < t0 < t_end");
  if (phi0.variables != Variables::physical)
    throw std::invalid_argument("solve_frozen_flow: physical variables expected");
  const std::vector<double> snaps = checked_times(options.snapshot_times, t0, t_end);
  const RadialGrid& grid = phi0.grid;

  std::vector<double> f = phi0.values;
  double t = t0;
  std::vector<DensityField> snapshots;
  std::size_t next_snap = 0;
  auto emit_due = [&]() {
    while (next_snap < snaps.size() && snaps[next_snap] <= t * (1.0 + 1e-13)) {
      snapshots.push_back(DensityField{grid, f, Variables::physical, t,
                                       phi0.is_signed,
                                       std::optional<double>(0.0)});
      ++next_snap;
    }
  };
  emit_due();

  while (t < t_end * (1.0 - 1e-14)) {
    double dt = std::min(options.dt_rel * t, options.dt_max);
    double stop = t_end;
    if (next_snap < snaps.size()) stop = std::min(stop, snaps[next_snap]);
    if (t + dt >= stop - 1e-12 * stop) dt = stop - t;
    // midpoint value of the prescribed slope over the step
    sg_step(grid, f, 0.0, drift_slope(t + 0.5 * dt), dt);
    t += dt;
    emit_due();
  }
  return FrozenFlowResult{DensityField{grid, f, Variables::physical, t,
                                       phi0.is_signed, std::optional<double>(0.0)},
                          std::move(snapshots)};
}

DensityField subtract_layers(const DensityField& f, const SelfSimilarProfile& profile,
                             const BoundaryLayer& layer) {
  if (f.variables != Variables::physical)
    throw std::invalid_argument("subtract_layers: physical variables expected");
  const double t = f.time;
  if (!(t > 0.0)) throw std::invalid_argument("subtract_layers: field time > 0");
  DensityField g = f;
  g.is_signed = true;
  const double s32 = std::pow(t, -1.5);
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    const double x = g.grid.center(i);
    g.values[i] -= s32 * profile.value(x / t) + layer.value(x, t);
  }
  if (f.boundary_value) {
    const double b = *f.boundary_value - s32 * profile.value(0.0) - layer.value(0.0, t);
    if (std::abs(b) > 1e-8 * layer.mu)
      throw std::runtime_error(
          "subtract_layers: origin values of bulk and layer do not cancel");
    g.boundary_value = b;
  }
  return g;
}

std::vector<BarrierRow> barrier_audit(const ModelParams& params,
                                      const SelfSimilarProfile& profile,
                                      const std::function<double(double)>& phi0,
                                      const std::function<double(double)>& j,
                                      double lambda, double t0, double t_end,
                                      const RadialGrid& grid,
                                      const std::vector<double>& sample_times,
                                      const ParabolicOptions& options) {
  params.validate();
  const double g = profile.gamma;
  if (!(g > 0.0 && g < 0.5))
    throw std::invalid_argument("barrier_audit: gamma in (0, 1/2)");
  if (!(lambda >= 1.5 && lambda < 1.5 + 2.0 * g))
    throw std::invalid_argument(
        "barrier_audit: lambda must lie in [3/2, 3/2 + 2 gamma)");

  DensityField start = sample_field(grid, phi0, Variables::physical, t0);
  start.boundary_value = 0.0;
  auto slope = [&](double t) { return -(1.0 - g) / t + j(t); };
  ParabolicOptions opts = options;
  opts.snapshot_times = sample_times;
  FrozenFlowResult diff = solve_frozen_flow(start, slope, t0, t_end, opts);

  CharacteristicsMap map = CharacteristicsMap::build(
      profile, CharacteristicsMap::Clock::physical, t0, t_end, j);

  std::vector<BarrierRow> rows;
  rows.reserve(diff.snapshots.size());
  for (const DensityField& snap : diff.snapshots) {
    const double t = snap.time;
    const double mp = map.m_prime(t), mm = map.m(t);
    double sup = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.center(i);
      const double transported = mp * phi0(mp * x + mm);
      const double denom =
          std::pow(t, -1.5) * std::exp(-0.5 * x) +
          std::pow(t, -lambda) * std::pow(1.0 + g * x / t, -(profile.theta + 2.0));
      sup = std::max(sup, std::abs(snap.values[i] - transported) / denom);
    }
    rows.push_back({t, sup});
  }
  return rows;
}

double barrier_cj_bound(const ModelParams& params, const SelfSimilarProfile& profile,
                        double lambda) {
  const double g = profile.gamma;
  if (!(g > 0.0 && g < 0.5))
    throw std::invalid_argument("barrier_cj_bound: gamma in (0, 1/2)");
  const double b1 = 0.5 / (profile.Ns * profile.Ns);
  const double b2 = (1.5 + 2.0 * g - lambda) / (8.0 * params.beta * (profile.theta + 2.0));
  const double b3 = g / (5.0 * profile.theta);
  return std::min({b1, b2, b3});
}

}  // namespace poredyn
