#include "poredyn/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>

#include "poredyn/numerics.hpp"

namespace poredyn {
namespace {

// 7-point Gauss-Legendre rule on [-1, 1].
constexpr int kGaussN = 7;
constexpr double kGaussX[kGaussN] = {
    -0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
    0.0,
    0.4058451513773972,  0.7415311855993945,  0.9491079123427585};
constexpr double kGaussW[kGaussN] = {
    0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
    0.4179591836734694,
    0.3818300505051189, 0.2797053914892766, 0.1294849661688697};

double gauss7(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (int q = 0; q < kGaussN; ++q) s += kGaussW[q] * f(mid + half * kGaussX[q]);
  return half * s;
}

}  // namespace

double CharacteristicsMap::base_log(double t) const {
  const double d = (clock_ == Clock::physical) ? (gamma_ - 1.0) * std::log(t / t0_)
                                               : gamma_ * (t - t0_);
  return d;
}

CharacteristicsMap CharacteristicsMap::frozen(const SelfSimilarProfile& profile,
                                              Clock clock, double t0) {
  if (clock == Clock::physical && !(t0 > 0.0))
    throw std::invalid_argument("frozen map: physical clock needs t0 > 0");
  CharacteristicsMap map;
  map.clock_ = clock;
  map.t0_ = t0;
  map.t_end_ = std::numeric_limits<double>::infinity();
  map.gamma_ = profile.gamma;
  return map;
}

CharacteristicsMap CharacteristicsMap::build(const SelfSimilarProfile& profile,
                                             Clock clock, double t0, double t_end,
                                             std::function<double(double)> trace) {
  if (!(t_end > t0)) throw std::invalid_argument("build map: need t_end > t0");
  if (clock == Clock::physical && !(t0 > 0.0))
    throw std::invalid_argument("build map: physical clock needs t0 > 0");
  if (!trace) throw std::invalid_argument("build map: empty trace");
  CharacteristicsMap map;
  map.clock_ = clock;
  map.t0_ = t0;
  map.t_end_ = t_end;
  map.gamma_ = profile.gamma;
  map.trace_ = std::move(trace);

  map.nodes_.push_back({t0, 0.0, 0.0});
  double t = t0;
  while (t < t_end) {
    const double h = (clock == Clock::physical)
                         ? std::min(0.01 * t, t_end - t)
                         : std::min(0.01, t_end - t);
    const double t_next = (t_end - t <= h * (1.0 + 1e-12)) ? t_end : t + h;
    const Node& last = map.nodes_.back();
    auto [dI, dm] = map.segment(last.I, t, t_next);
    map.nodes_.push_back({t_next, last.I + dI, last.m + dm});
    t = t_next;
  }
  return map;
}

// Integrates (trace, base * e^I) over [a, b] with one Gauss panel, building the
// running values of I at the quadrature nodes from nested sub-panels. Returns
// the increments of I and m. I0 is I(a) relative to t0.
std::pair<double, double> CharacteristicsMap::segment(double I0, double a,
                                                      double b) const {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double I_at[kGaussN];
  double prev = a, run = 0.0;
  for (int q = 0; q < kGaussN; ++q) {
    const double u = mid + half * kGaussX[q];
    run += gauss7(trace_, prev, u);
    I_at[q] = run;
    prev = u;
  }
  const double dI = run + gauss7(trace_, prev, b);
  double dm = 0.0;
  for (int q = 0; q < kGaussN; ++q) {
    const double u = mid + half * kGaussX[q];
    dm += kGaussW[q] * std::exp(base_log(u) + I0 + I_at[q]);
  }
  return {dI, half * dm};
}

void CharacteristicsMap::check_time(double t) const {
  const double slack = 1e-9 * std::max(1.0, std::abs(t_end_));
  if (t < t0_ - slack || (!is_frozen() && t > t_end_ + slack))
    throw std::out_of_range("characteristics map queried outside [t0, t_end]");
}

double CharacteristicsMap::integral_I(double t) const {
  if (is_frozen()) return 0.0;
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                             [](double v, const Node& n) { return v < n.t; });
  const Node& base = *std::prev(it == nodes_.begin() ? std::next(it) : it);
  if (t <= base.t) return base.I;
  return base.I + segment(base.I, base.t, t).first;
}

double CharacteristicsMap::m_prime(double t) const {
  check_time(t);
  t = std::clamp(t, t0_, t_end_);
  return std::exp(base_log(t) + integral_I(t));
}

double CharacteristicsMap::m(double t) const {
  check_time(t);
  t = std::clamp(t, t0_, t_end_);
  if (is_frozen()) {
    if (clock_ == Clock::physical) {
      if (gamma_ == 0.0) return t0_ * std::log(t / t0_);
      return (t0_ / gamma_) * (std::pow(t / t0_, gamma_) - 1.0);
    }
    if (gamma_ == 0.0) return t - t0_;
    return std::expm1(gamma_ * (t - t0_)) / gamma_;
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t,
                             [](double v, const Node& n) { return v < n.t; });
  const Node& base = *std::prev(it == nodes_.begin() ? std::next(it) : it);
  if (t <= base.t) return base.m;
  return base.m + segment(base.I, base.t, t).second;
}

double CharacteristicsMap::m_prime(double t, double r) const {
  if (!(r <= t)) throw std::invalid_argument("two-time map needs r <= t");
  if (is_frozen()) {
    if (clock_ == Clock::physical) return std::pow(t / r, gamma_ - 1.0);
    return std::exp(gamma_ * (t - r));
  }
  return m_prime(t) / m_prime(r);
}

double CharacteristicsMap::m(double t, double r) const {
  if (!(r <= t)) throw std::invalid_argument("two-time map needs r <= t");
  if (is_frozen()) {
    if (clock_ == Clock::physical) {
      if (gamma_ == 0.0) return r * std::log(t / r);
      return (r / gamma_) * (std::pow(t / r, gamma_) - 1.0);
    }
    if (gamma_ == 0.0) return t - r;
    return std::expm1(gamma_ * (t - r)) / gamma_;
  }
  return (m(t) - m(r)) / m_prime(r);
}

double eval_T(const CharacteristicsMap& map,
              const std::function<double(double)>& phi0, double x, double t) {
  if (map.clock() != CharacteristicsMap::Clock::physical)
    throw std::invalid_argument("eval_T needs a physical-clock map");
  const double mp = map.m_prime(t);
  return mp * phi0(mp * x + map.m(t));
}

double eval_Ttilde(const CharacteristicsMap& map,
                   const std::function<double(double)>& Phi0, double y,
                   double tau) {
  if (map.clock() != CharacteristicsMap::Clock::selfsim)
    throw std::invalid_argument("eval_Ttilde needs a self-similar-clock map");
  const double Mp = map.m_prime(tau);
  return std::exp(0.5 * (tau - map.t0())) * Mp * Phi0(Mp * y + map.m(tau));
}

DensityField apply_T(const CharacteristicsMap& map,
                     const std::function<double(double)>& phi0, double t,
                     const RadialGrid& out_grid) {
  const double mp = map.m_prime(t), mm = map.m(t);
  DensityField out{out_grid, std::vector<double>(out_grid.size(), 0.0),
                   Variables::physical, t, false,
                   std::optional<double>(mp * phi0(mm))};
  for (std::size_t i = 0; i < out_grid.size(); ++i)
    out.values[i] = mp * phi0(mp * out_grid.center(i) + mm);
  return out;
}

DensityField apply_T(const CharacteristicsMap& map, const DensityField& phi0,
                     double t) {
  if (phi0.variables != Variables::physical)
    throw std::invalid_argument("apply_T: initial field must use physical variables");
  return apply_T(map, field_evaluator(phi0), t, phi0.grid);
}

DensityField apply_Ttilde(const CharacteristicsMap& map,
                          const std::function<double(double)>& Phi0, double tau,
                          const RadialGrid& out_grid) {
  const double Mp = map.m_prime(tau), MM = map.m(tau);
  const double pre = std::exp(0.5 * (tau - map.t0()));
  DensityField out{out_grid, std::vector<double>(out_grid.size(), 0.0),
                   Variables::selfsim, tau, false,
                   std::optional<double>(pre * Mp * Phi0(MM))};
  for (std::size_t i = 0; i < out_grid.size(); ++i)
    out.values[i] = pre * Mp * Phi0(Mp * out_grid.center(i) + MM);
  return out;
}

double moment_T_dxfs(const SelfSimilarProfile& profile,
                     const CharacteristicsMap& map, double t, double r) {
  if (map.clock() != CharacteristicsMap::Clock::physical)
    throw std::invalid_argument("moment_T_dxfs needs a physical-clock map");
  return -std::sqrt(r) / map.m_prime(t, r) *
         profile.tail_first_moment(map.m(t, r) / r);
}

double scaled_moment_T_dxfs(const SelfSimilarProfile& profile,
                            const CharacteristicsMap& map, double t, double r) {
  const double Ns = profile.Ns;
  return 2.0 * profile.beta() / (Ns * Ns * Ns) * moment_T_dxfs(profile, map, t, r);
}

double kernel_delta1(const SelfSimilarProfile& profile,
                     const CharacteristicsMap& map, double t, double r) {
  const double g = profile.gamma;
  if (!(g > 0.0 && g < 0.5))
    throw std::invalid_argument("kernel_delta1 needs gamma in (0, 1/2)");
  const double lead = -((1.0 - g) / g) * std::sqrt(t);
  return scaled_moment_T_dxfs(profile, map, t, r) / lead - 1.0 +
         (1.0 - 2.0 * g) * std::pow(t / r, -g);
}

double kernel_Ttilde_dyfs(const SelfSimilarProfile& profile,
                          const CharacteristicsMap& map, double tau, double r) {
  if (map.clock() != CharacteristicsMap::Clock::selfsim)
    throw std::invalid_argument("kernel_Ttilde_dyfs needs a self-similar-clock map");
  return -std::exp(0.5 * (tau - r)) / map.m_prime(tau, r) *
         profile.tail_first_moment(map.m(tau, r));
}

std::function<double(double)> field_evaluator(const DensityField& field) {
  std::vector<double> xs, vs;
  xs.reserve(field.grid.size() + 1);
  vs.reserve(field.grid.size() + 1);
  if (field.boundary_value) {
    xs.push_back(0.0);
    vs.push_back(*field.boundary_value);
  }
  for (std::size_t i = 0; i < field.grid.size(); ++i) {
    xs.push_back(field.grid.center(i));
    vs.push_back(field.values[i]);
  }
  auto spline = std::make_shared<PchipInterpolant>(xs, vs);
  const double cut = field.grid.x_max();
  return [spline, cut](double x) { return x >= cut ? 0.0 : (*spline)(x); };
}

}  // namespace poredyn
