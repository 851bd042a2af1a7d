#include "poredyn/full_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "poredyn/characteristics.hpp"
#include "poredyn/numerics.hpp"
#include "poredyn/parabolic.hpp"

namespace poredyn {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

double FullModelParams::rplus() const { return 1.0 / (2.0 * kPi * sigma_l); }

double FullModelParams::Tstar() const { return std::exp(Estar / kBT) / D; }

void FullModelParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) {
      std::ostringstream msg;
      msg << "FullModelParams: " << name << " must be > 0, got " << v;
      throw std::invalid_argument(msg.str());
    }
  };
  positive(D, "D");
  positive(kBT, "kBT");
  positive(a0, "a0");
  positive(sigma_l, "sigma_l");
  positive(sigma_c, "sigma_c");
  positive(S_m, "S_m");
  positive(Ctilde_m, "Ctilde_m");
  positive(L, "L");
  positive(Estar, "Estar");
  positive(E0, "E0");
  positive(rstar, "rstar");
  positive(r0, "r0");
  if (source_amp < 0.0)
    throw std::invalid_argument("FullModelParams: source_amp must be >= 0");
  if (C_m < 0.0) throw std::invalid_argument("FullModelParams: C_m must be >= 0");
  if (Vext < 0.0) throw std::invalid_argument("FullModelParams: Vext must be >= 0");
  if (!(r0 > rstar))
    throw std::invalid_argument("FullModelParams: need r0 > rstar");
  if (!(E0 < Estar))
    throw std::invalid_argument("FullModelParams: need E0 < Estar");
  if (!(rplus() > r0))
    throw std::invalid_argument(
        "FullModelParams: need rplus = 1/(2 pi sigma_l) > r0");
}

PoreEnergy::PoreEnergy(const FullModelParams& params)
    : rstar_(params.rstar),
      Estar_(params.Estar),
      r0_(params.r0),
      E0_(params.E0),
      slope_(2.0 * kPi * params.sigma_l),
      ctilde_(params.Ctilde_m),
      amp_(params.source_amp) {
  params.validate();
  // descending cubic W = Estar + (r-rstar)^2 (a + b (r-rstar)) pinned by
  // W(r0) = E0 and W'(r0) = slope
  const double d = r0_ - rstar_;
  const double bd = slope_ / d - 2.0 * (E0_ - Estar_) / (d * d);
  cub_b_ = bd / d;
  cub_a_ = (E0_ - Estar_) / (d * d) - bd;
}

double PoreEnergy::W_pore(double r) const {
  if (r < 0.0) throw std::invalid_argument("PoreEnergy: r >= 0");
  if (r <= rstar_) {
    const double u = r / rstar_;
    return Estar_ * u * u * (3.0 - 2.0 * u);
  }
  if (r <= r0_) {
    const double u = r - rstar_;
    return Estar_ + u * u * (cub_a_ + cub_b_ * u);
  }
  return E0_ + slope_ * (r - r0_);
}

double PoreEnergy::dW_pore(double r) const {
  if (r < 0.0) throw std::invalid_argument("PoreEnergy: r >= 0");
  if (r <= rstar_) {
    const double u = r / rstar_;
    return 6.0 * Estar_ / rstar_ * u * (1.0 - u);
  }
  if (r <= r0_) {
    const double u = r - rstar_;
    return u * (2.0 * cub_a_ + 3.0 * cub_b_ * u);
  }
  return slope_;
}

double PoreEnergy::source(double r) const {
  if (r < 0.0 || r >= rstar_) return 0.0;
  const double u = 1.0 - (r / rstar_) * (r / rstar_);
  return amp_ * u * u;
}

double PoreEnergy::W(double r, double Vm) const {
  return W_pore(r) - ctilde_ * r * r * Vm * Vm;
}

double compute_a1(const FullModelParams& params, const PoreEnergy& energy) {
  const double scale = 2.0 * params.L * params.r0 * params.r0 * params.a0;
  return scale * integrate(
                     [&](double y) {
                       return y * std::exp(-energy.W_pore(y * params.r0) /
                                           params.kBT);
                     },
                     0.0, 1.0, 1e-14);
}

double quasi_static_vm(const FullModelParams& params, double pore_moment,
                       double Vext) {
  return Vext / ((params.L / params.sigma_c) * params.S_m + 1.0 +
                 2.0 * params.L * pore_moment);
}

std::vector<double> sg_face_fluxes(const FullModelParams& params,
                                   const PoreEnergy& energy,
                                   const RadialGrid& grid,
                                   const std::vector<double>& values,
                                   double Vm) {
  const std::size_t n = grid.size();
  if (values.size() != n)
    throw std::invalid_argument("sg_face_fluxes: values size mismatch");
  std::vector<double> flux(n + 1, 0.0);
  for (std::size_t e = 1; e < n; ++e) {
    const double cl = grid.center(e - 1), cr = grid.center(e);
    const double delta = cr - cl;
    const double z = (energy.W(cr, Vm) - energy.W(cl, Vm)) / params.kBT;
    // flux in +r direction: -D (dn/dr + (dW/dr/kBT) n) exponentially fitted
    flux[e] = params.D / delta *
              (bernoulli(z) * values[e - 1] - bernoulli(-z) * values[e]);
  }
  return flux;
}

namespace {

// backward Euler drift-diffusion step with zero-flux boundaries; conserves
// total mass exactly and keeps e^{-W/kBT} stationary to machine precision
void full_sg_step(const FullModelParams& params, const PoreEnergy& energy,
                  const RadialGrid& grid, std::vector<double>& n_values,
                  double Vm, double dt) {
  const std::size_t n = grid.size();
  std::vector<double> lower(n, 0.0), diag(n, 0.0), upper(n, 0.0),
      rhs(n_values);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = grid.width(i);
    if (i > 0) {
      const double delta = grid.center(i) - grid.center(i - 1);
      const double z =
          (energy.W(grid.center(i), Vm) - energy.W(grid.center(i - 1), Vm)) /
          params.kBT;
      const double k = dt * params.D / (w * delta);
      diag[i] += k * bernoulli(-z);
      lower[i] = -k * bernoulli(z);
    }
    if (i + 1 < n) {
      const double delta = grid.center(i + 1) - grid.center(i);
      const double z =
          (energy.W(grid.center(i + 1), Vm) - energy.W(grid.center(i), Vm)) /
          params.kBT;
      const double k = dt * params.D / (w * delta);
      diag[i] += k * bernoulli(z);
      upper[i] = -k * bernoulli(-z);
    }
    diag[i] += 1.0;
  }
  if (!solve_tridiagonal(lower, diag, upper, rhs))
    throw std::runtime_error("solve_full_model: singular transport system");
  n_values = rhs;
}

double pore_moment_of(const RadialGrid& grid, const std::vector<double>& n) {
  double m = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    m += grid.center(i) * n[i] * grid.width(i);
  return m;
}

}  // namespace

FullModelResult solve_full_model(const FullModelParams& params,
                                 const std::function<double(double)>& n_init,
                                 double Vm_init, double t_end,
                                 const FullModelOptions& options) {
  params.validate();
  if (!(t_end > 0.0))
    throw std::invalid_argument("solve_full_model: t_end must be > 0");
  if (!n_init) throw std::invalid_argument("solve_full_model: empty n_init");
  if (!(options.dt_min > 0.0) || !(options.dt_rel > 0.0) ||
      !(options.dt_max >= options.dt_min))
    throw std::invalid_argument("solve_full_model: bad step controls");

  const PoreEnergy energy(params);
  const RadialGrid grid =
      options.grid ? *options.grid
                   : RadialGrid::uniform(params.r0 + 5.0 * params.rplus(),
                                         options.default_cells);

  std::vector<double> n(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) n[i] = n_init(grid.center(i));

  auto vext_at = [&](double t) {
    return options.Vext_of_t ? options.Vext_of_t(t) : params.Vext;
  };

  std::vector<double> snaps = options.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
  for (double s : snaps)
    if (!(s > 0.0) || s > t_end * (1.0 + 1e-12))
      throw std::invalid_argument(
          "solve_full_model: snapshot times must lie in (0, t_end]");
  std::size_t next_snap = 0;

  FullModelResult out;
  double t = 0.0;
  double Vm = options.quasi_static_vm
                  ? quasi_static_vm(params, pore_moment_of(grid, n), vext_at(0.0))
                  : Vm_init;
  auto record = [&]() {
    out.t.push_back(t);
    out.Vm.push_back(Vm);
    out.pore_moment.push_back(pore_moment_of(grid, n));
  };
  record();

  while (t < t_end * (1.0 - 1e-12)) {
    double dt = std::clamp(options.dt_rel * t, options.dt_min, options.dt_max);
    dt = std::min(dt, t_end - t);
    if (next_snap < snaps.size()) dt = std::min(dt, snaps[next_snap] - t);
    const double t_new = t + dt;

    full_sg_step(params, energy, grid, n, Vm, dt);
    // exact relaxation of the defect source toward a0 e^{-W_pore/kBT}
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double s = energy.source(grid.center(i));
      if (s > 0.0) {
        const double neq =
            params.a0 * std::exp(-energy.W_pore(grid.center(i)) / params.kBT);
        n[i] = neq + (n[i] - neq) * std::exp(-s * dt);
      }
    }
    const double mom = pore_moment_of(grid, n);
    if (options.quasi_static_vm || params.C_m == 0.0) {
      Vm = quasi_static_vm(params, mom, vext_at(t_new));
    } else {
      const double drain =
          params.S_m + params.sigma_c / params.L + 2.0 * params.sigma_c * mom;
      Vm = (params.C_m / dt * Vm +
            params.sigma_c / params.L * vext_at(t_new)) /
           (params.C_m / dt + drain);
    }
    t = t_new;

    bool finite = std::isfinite(Vm);
    for (double v : n) finite = finite && std::isfinite(v);
    if (!finite) {
      std::ostringstream msg;
      msg << "solve_full_model: non-finite state at t = " << t
          << "; retry with dt_max <= " << dt / 10.0;
      throw std::runtime_error(msg.str());
    }

    record();
    if (next_snap < snaps.size() && t >= snaps[next_snap] * (1.0 - 1e-12)) {
      out.snapshots.push_back(
          DensityField{grid, n, Variables::physical, t, false, std::nullopt});
      ++next_snap;
    }
  }
  return out;
}

ReductionReport reduction_report(const FullModelParams& params,
                                 const ReductionOptions& options) {
  params.validate();
  const double rp = params.rplus();
  if (rp / params.r0 < 5.0) {
    std::ostringstream msg;
    msg << "reduction_report: rplus/r0 = " << rp / params.r0
        << " < 5; no scale separation to validate";
    throw std::invalid_argument(msg.str());
  }

  const PoreEnergy energy(params);
  ReductionReport rep;
  rep.a1 = compute_a1(params, energy);
  rep.denominator =
      (params.L / params.sigma_c) * params.S_m + 1.0 + rep.a1;
  rep.beta_eff = 2.0 * rp * rp * params.Ctilde_m / (rep.denominator * rep.denominator);
  rep.mu_eff = 2.0 * params.L * rp * rp / rep.denominator * params.a0 *
               std::exp(-params.E0 / params.kBT);
  // independent route through the algebraic voltage at the equilibrium
  // interior moment a1 / (2L)
  {
    const double vext = params.Vext > 0.0 ? params.Vext : 1.0;
    const double vqs =
        quasi_static_vm(params, rep.a1 / (2.0 * params.L), vext) / vext;
    rep.beta_check = 2.0 * rp * rp * params.Ctilde_m * vqs * vqs;
    rep.mu_check = 2.0 * params.L * rp * rp * params.a0 *
                   std::exp(-params.E0 / params.kBT) * vqs;
  }
  rep.Tstar = params.Tstar();
  rep.t_interior = options.relax_multiples * rep.Tstar;

  // The reduced exterior problem pins its boundary at mu_eff, which the full
  // model only supplies once the interior has relaxed; the comparison window
  // therefore starts after t_interior, measured in the exterior clock
  // s = D t / rplus^2.
  const double s_base = rep.t_interior * params.D / (rp * rp);
  const double s0 = s_base + options.compare_s0;
  const double s1 = s_base + options.compare_s1;
  const double t_s0 = s0 * rp * rp / params.D;
  const double t_s1 = s1 * rp * rp / params.D;
  const double t_end = t_s1;

  FullModelOptions fopts;
  fopts.grid = RadialGrid::uniform(params.r0 + options.r_max_factor * rp,
                                   options.cells);
  fopts.dt_rel = options.dt_rel;
  fopts.quasi_static_vm = true;
  fopts.snapshot_times = {t_s0, t_s1, rep.t_interior};
  rep.run = solve_full_model(
      params, [](double) { return 0.0; }, 0.0, t_end, fopts);

  auto snapshot_at = [&](double t_want) -> const DensityField& {
    for (const auto& s : rep.run.snapshots)
      if (std::abs(s.time - t_want) <= 1e-9 * std::max(1.0, t_want)) return s;
    throw std::logic_error("reduction_report: missing snapshot");
  };

  // interior error against the pure pore-energy equilibrium
  {
    const DensityField& s = snapshot_at(rep.t_interior);
    double num = 0.0, den = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      const double r = s.grid.center(i);
      if (r >= params.r0) break;
      const double neq =
          params.a0 * std::exp(-energy.W_pore(r) / params.kBT);
      num += std::abs(s.values[i] - neq) * s.grid.width(i);
      den += neq * s.grid.width(i);
      sup = std::max(sup, std::abs(s.values[i] - neq) / neq);
    }
    rep.interior_error_l1 = num / den;
    rep.interior_error_sup = sup;
  }

  // exterior comparison in the rescaled variables
  {
    const double scale = 2.0 * params.L * rp * rp / rep.denominator;
    const double x_max = options.r_max_factor;  // (r_max - r0) / rplus
    const RadialGrid xgrid = RadialGrid::uniform(x_max, options.reduced_cells);

    auto rescale = [&](const DensityField& s, double s_clock) {
      auto n_of = field_evaluator(s);
      DensityField f = sample_field(
          xgrid, [&](double x) { return scale * n_of(params.r0 + rp * x); },
          Variables::physical, s_clock);
      f.boundary_value = rep.mu_eff;
      return f;
    };
    const DensityField f_start = rescale(snapshot_at(t_s0), s0);
    DensityField f_end = rescale(snapshot_at(t_s1), s1);

    ModelParams red;
    red.beta = rep.beta_eff * params.Vext * params.Vext;
    red.mu = rep.mu_eff;
    red.gamma = 0.25;  // branch label only; the tail correction is off
    if (!(red.beta > 0.0))
      throw std::invalid_argument(
          "reduction_report: Vext = 0 leaves no drift coupling to compare");
    ParabolicOptions popts;
    popts.dt_rel = options.reduced_dt_rel;
    popts.tail_correction = false;
    popts.snapshot_times = {s1};
    ParabolicResult reduced =
        solve_parabolic(f_start, red, derive_profile(red), s0, s1, popts);
    if (reduced.snapshots.empty())
      throw std::logic_error("reduction_report: reduced run lost its snapshot");

    auto f_full = field_evaluator(f_end);
    auto f_red = field_evaluator(reduced.snapshots.back());
    double sup = 0.0;
    const std::size_t n_eval = 400;
    for (std::size_t k = 0; k <= n_eval; ++k) {
      const double x = options.compare_x_max * static_cast<double>(k) /
                       static_cast<double>(n_eval);
      sup = std::max(sup, std::abs(f_full(x) - f_red(x)));
    }
    rep.exterior_error = sup / rep.mu_eff;
    rep.exterior_full = std::move(f_end);
    rep.exterior_reduced = reduced.snapshots.back();
  }
  return rep;
}

}  // namespace poredyn
