#include "poredyn/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "poredyn/numerics.hpp"

namespace poredyn {
namespace {

double mean_field_of(const InitialData& f0, double A, double B) {
  return (f0.partial_moment(B) - B * f0.partial_mass(B)) / A;
}

std::vector<double> clean_snapshot_times(std::vector<double> times, double t0,
                                         double t_end) {
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  for (double s : times)
    if (s < t0 - 1e-12 || s > t_end + 1e-12)
      throw std::invalid_argument("snapshot time outside [t0, t_end]");
  return times;
}

DensityField render_affine(const InitialData& f0, double A, double B, double t,
                           const RadialGrid& grid, Variables variables) {
  DensityField out{grid, std::vector<double>(grid.size(), 0.0), variables, t,
                   false, std::nullopt};
  if (variables == Variables::physical) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      out.values[i] = A * f0.value(A * grid.center(i) + B);
    out.boundary_value = A * f0.value(B);
  } else {
    const double pre = std::pow(t, 1.5);
    for (std::size_t i = 0; i < grid.size(); ++i)
      out.values[i] = pre * A * f0.value(A * t * grid.center(i) + B);
    out.boundary_value = pre * A * f0.value(B);
    out.time = std::log(t);
  }
  return out;
}

}  // namespace

InitialData initial_from_profile(const SelfSimilarProfile& profile, double t0) {
  if (!(t0 > 0.0)) throw std::invalid_argument("initial_from_profile: t0 > 0");
  const SelfSimilarProfile p = profile;
  const double s32 = std::pow(t0, -1.5), s12 = std::sqrt(t0);
  return InitialData{
      [p, t0, s32](double x) { return s32 * p.value(x / t0); },
      [p, t0, s12](double B) { return p.tail_mass(B / t0) / s12; },
      [p, t0, s12](double B) { return s12 * p.tail_first_moment(B / t0); }};
}

InitialData initial_from_function(std::function<double(double)> f0, double x_big) {
  if (!(x_big > 0.0)) throw std::invalid_argument("initial_from_function: x_big > 0");
  auto fn = std::make_shared<std::function<double(double)>>(std::move(f0));
  return InitialData{
      [fn](double x) { return (*fn)(x); },
      [fn, x_big](double B) {
        return B >= x_big ? 0.0 : integrate([&](double x) { return (*fn)(x); }, B, x_big);
      },
      [fn, x_big](double B) {
        return B >= x_big ? 0.0
                          : integrate([&](double x) { return x * (*fn)(x); }, B, x_big);
      }};
}

InitialData combine(const InitialData& a, const InitialData& b) {
  return InitialData{
      [a, b](double x) { return a.value(x) + b.value(x); },
      [a, b](double B) { return a.partial_mass(B) + b.partial_mass(B); },
      [a, b](double B) { return a.partial_moment(B) + b.partial_moment(B); }};
}

double MeanFieldTrace::tau(std::size_t i) const { return std::log(t.at(i)); }
double MeanFieldTrace::N_F(std::size_t i) const {
  return n_f.at(i) / std::sqrt(t.at(i));
}

std::function<double(double)> MeanFieldTrace::interpolant() const {
  auto spline = std::make_shared<PchipInterpolant>(t, n_f);
  return [spline](double s) { return (*spline)(s); };
}

TransportResult solve_transport(const InitialData& f0, const ModelParams& params,
                                double t0, double t_end,
                                const TransportOptions& options) {
  params.validate();
  if (!(t0 > 0.0) || !(t_end > t0))
    throw std::invalid_argument("solve_transport: need 0 < t0 < t_end");
  if (!options.snapshot_times.empty() && !options.snapshot_grid)
    throw std::invalid_argument("solve_transport: snapshots need a grid");
  if (options.prescribed &&
      options.prescribed->clock() != CharacteristicsMap::Clock::physical)
    throw std::invalid_argument("solve_transport: prescribed map must be physical");
  const std::vector<double> snaps =
      clean_snapshot_times(options.snapshot_times, t0, t_end);

  const double beta = params.beta;
  double A = 1.0, B = 0.0, t = t0;
  double n = mean_field_of(f0, A, B);

  TransportResult result;
  result.trace.t.push_back(t);
  result.trace.n_f.push_back(n);

  std::size_t next_snap = 0;
  auto emit_due = [&]() {
    while (next_snap < snaps.size() && snaps[next_snap] <= t * (1.0 + 1e-13)) {
      result.snapshots.push_back(render_affine(f0, A, B, snaps[next_snap],
                                               *options.snapshot_grid,
                                               options.snapshot_variables));
      ++next_snap;
    }
  };
  emit_due();

  while (t < t_end * (1.0 - 1e-14)) {
    double dt = std::min(options.dt_rel * t, options.dt_max);
    double stop = t_end;
    if (next_snap < snaps.size()) stop = std::min(stop, snaps[next_snap]);
    if (t + dt >= stop - 1e-12 * stop) dt = stop - t;
    const double t_new = t + dt;

    double A1, B1, n1;
    if (options.prescribed) {
      A1 = options.prescribed->m_prime(t_new);
      B1 = options.prescribed->m(t_new);
      n1 = mean_field_of(f0, A1, B1);
    } else {
      double c = beta / (1.0 + n * n);
      A1 = A;
      B1 = B;
      n1 = n;
      for (int it = 0; it < std::max(1, options.picard_cap); ++it) {
        const double ap = std::exp(-c * dt);
        const double bp = -std::expm1(-c * dt) / c;
        A1 = A * ap;
        B1 = A * bp + B;
        const double n_prev = n1;
        n1 = mean_field_of(f0, A1, B1);
        // midpoint closure of the frozen coefficient
        c = 0.5 * beta * (1.0 / (1.0 + n * n) + 1.0 / (1.0 + n1 * n1));
        if (std::abs(n1 - n_prev) <= options.picard_tol * std::max(1.0, std::abs(n1)))
          break;
      }
    }

    A = A1;
    B = B1;
    n = n1;
    t = t_new;
    result.trace.t.push_back(t);
    result.trace.n_f.push_back(n);
    emit_due();
  }

  result.map_scale = A;
  result.map_shift = B;
  return result;
}

UpwindResult upwind_fv_transport(const DensityField& f0,
                                 const std::function<double(double)>& drift_slope,
                                 double t0, double t_end,
                                 const UpwindOptions& options) {
  if (options.cfl > 0.9 || !(options.cfl > 0.0))
    throw std::invalid_argument("upwind_fv_transport: cfl must lie in (0, 0.9]");
  if (!(t_end > t0)) throw std::invalid_argument("upwind_fv_transport: t_end > t0");
  if (f0.variables != Variables::physical)
    throw std::invalid_argument("upwind_fv_transport: physical variables expected");
  const RadialGrid& grid = f0.grid;
  const std::size_t n = grid.size();
  const std::vector<double> snaps =
      clean_snapshot_times(options.snapshot_times, t0, t_end);

  std::vector<double> f = f0.values;
  const double w_min = *std::min_element(grid.widths().begin(), grid.widths().end());

  UpwindResult result;
  for (std::size_t i = 0; i < n; ++i) result.mass_initial += f[i] * grid.width(i);

  double t = t0;
  std::size_t next_snap = 0;
  auto emit_due = [&]() {
    while (next_snap < snaps.size() && snaps[next_snap] <= t * (1.0 + 1e-13)) {
      result.snapshots.push_back(DensityField{grid, f, Variables::physical, t,
                                              false, std::nullopt});
      ++next_snap;
    }
  };
  emit_due();

  std::vector<double> flux(n + 1, 0.0);
  while (t < t_end - 1e-14 * t_end) {
    const double a = drift_slope(t);
    double u_max = 0.0;
    for (std::size_t e = 0; e <= n; ++e)
      u_max = std::max(u_max, std::abs(1.0 + a * grid.edge(e)));
    double dt = options.cfl * w_min / std::max(u_max, 1e-300);
    double stop = t_end;
    if (next_snap < snaps.size()) stop = std::min(stop, snaps[next_snap]);
    if (t + dt >= stop - 1e-12 * std::max(1.0, stop)) dt = stop - t;

    // flux[e] stores v f* at edge e; the wave speed of f is -v.
    for (std::size_t e = 0; e <= n; ++e) {
      const double v = 1.0 + a * grid.edge(e);
      double fstar;
      if (e == 0)
        fstar = f[0];  // speed -v = -1 < 0 pulls from the first cell
      else if (e == n)
        fstar = f[n - 1];  // zero-gradient ghost
      else
        fstar = (-v > 0.0) ? f[e - 1] : f[e];
      flux[e] = v * fstar;
    }
    for (std::size_t i = 0; i < n; ++i)
      f[i] += dt / grid.width(i) * (flux[i + 1] - flux[i]);
    result.inflow_minus_outflow += dt * (flux[n] - flux[0]);
    t += dt;
    emit_due();
  }

  for (std::size_t i = 0; i < n; ++i) result.mass_final += f[i] * grid.width(i);
  return result;
}

std::vector<ProfileLimitRow> profile_limit_diagnostics(
    const std::function<double(double)>& Phi0, const SelfSimilarProfile& profile,
    const CharacteristicsMap& selfsim_map, const std::vector<double>& taus,
    double y_max, std::size_t n_eval) {
  if (selfsim_map.clock() != CharacteristicsMap::Clock::selfsim)
    throw std::invalid_argument("profile_limit_diagnostics: self-similar map expected");
  if (n_eval < 2) throw std::invalid_argument("profile_limit_diagnostics: n_eval >= 2");
  std::vector<ProfileLimitRow> rows;
  rows.reserve(taus.size());
  for (double tau : taus) {
    ProfileLimitRow row;
    row.tau = tau;
    row.M = selfsim_map.m(tau);
    row.M_prime = selfsim_map.m_prime(tau);
    row.ratio = row.M > 0.0 ? row.M_prime / row.M
                            : std::numeric_limits<double>::infinity();
    row.nu_at_M = profile.nu(row.M);
    double sup = 0.0;
    for (std::size_t k = 0; k < n_eval; ++k) {
      const double y = y_max * static_cast<double>(k) / (n_eval - 1);
      sup = std::max(sup, std::abs(eval_Ttilde(selfsim_map, Phi0, y, tau) -
                                   profile.value(y)));
    }
    row.sup_error = sup;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace poredyn
