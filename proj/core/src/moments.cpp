#include "poredyn/moments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

namespace poredyn {

double eval_h_hyperbolic(const SelfSimilarProfile& profile, double n_g, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("eval_h_hyperbolic: t > 0");
  const double ns = profile.Ns * std::sqrt(t);
  const double ns2 = ns * ns;
  const double num =
      1.0 + n_g * n_g - 2.0 * n_g / ns * (1.0 + 2.0 * n_g * ns + n_g * n_g);
  const double den = ns2 * ns2 * (1.0 + (2.0 * n_g * ns + n_g * n_g + 1.0) / ns2);
  return num / den;
}

double eval_H(const SelfSimilarProfile& profile, double N_G, double tau) {
  const double Ns = profile.Ns, e = std::exp(-tau);
  const double Ns2 = Ns * Ns;
  const double q = e + 2.0 * Ns * N_G + N_G * N_G;
  const double num = e + N_G * N_G - 2.0 * N_G / Ns * q;
  const double den = Ns2 * Ns2 * (1.0 + q / Ns2);
  return num / den;
}

double eval_j_hyperbolic(const ModelParams& params, const SelfSimilarProfile& profile,
                         double n_g, double t) {
  const double ns = profile.Ns * std::sqrt(t);
  return params.beta *
         (2.0 * n_g / (ns * ns * ns) + eval_h_hyperbolic(profile, n_g, t));
}

double eval_J(const ModelParams& params, const SelfSimilarProfile& profile,
              double N_G, double tau) {
  const double Ns = profile.Ns;
  return 2.0 * params.beta * N_G / (Ns * Ns * Ns) +
         params.beta * eval_H(profile, N_G, tau);
}

double eval_h_parabolic(const SelfSimilarProfile& profile, double n_g, double n_bl,
                        double t, bool variant_bl_cross) {
  if (!(t > 0.0)) throw std::invalid_argument("eval_h_parabolic: t > 0");
  const double ns = profile.Ns * std::sqrt(t);
  const double ns2 = ns * ns;
  const double cross = variant_bl_cross ? 2.0 * n_bl * (n_g + 2.0 * ns)
                                        : 2.0 * n_bl * (n_g + ns);
  const double expand = 1.0 + n_g * n_g + n_bl * n_bl + cross + 2.0 * ns * n_g;
  const double num =
      1.0 + n_g * n_g + n_bl * n_bl + cross - 2.0 * n_g / ns * expand;
  const double den = ns2 * ns2 * (1.0 + expand / ns2);
  return num / den;
}

PerturbationTrace build_perturbation_trace(const MeanFieldTrace& trace,
                                           const ModelParams& params,
                                           const SelfSimilarProfile& profile,
                                           MomentVariant variant,
                                           const BoundaryLayer* layer) {
  if (variant == MomentVariant::parabolic && layer == nullptr)
    throw std::invalid_argument(
        "build_perturbation_trace: parabolic variant needs a boundary layer");
  PerturbationTrace out;
  out.variant = variant;
  const std::size_t n = trace.t.size();
  out.t = trace.t;
  out.tau.resize(n);
  out.n_g.resize(n);
  out.n_s.resize(n);
  out.n_bl.assign(n, 0.0);
  out.h.resize(n);
  out.j.resize(n);
  out.N_G.resize(n);
  out.H.resize(n);
  out.J.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = trace.t[i];
    const double rt = std::sqrt(t);
    out.tau[i] = std::log(t);
    out.n_s[i] = profile.Ns * rt;
    if (variant == MomentVariant::parabolic) out.n_bl[i] = layer->first_moment(t);
    out.n_g[i] = trace.n_f[i] - out.n_s[i] - out.n_bl[i];
    out.h[i] = variant == MomentVariant::parabolic
                   ? eval_h_parabolic(profile, out.n_g[i], out.n_bl[i], t)
                   : eval_h_hyperbolic(profile, out.n_g[i], t);
    out.j[i] = params.beta *
               (2.0 * out.n_g[i] / (out.n_s[i] * out.n_s[i] * out.n_s[i]) + out.h[i]);
    out.N_G[i] = out.n_g[i] / rt;
    out.H[i] = t * out.h[i];
    out.J[i] = t * out.j[i];
  }
  return out;
}

VolterraResult solve_NG_volterra(const ModelParams& params,
                                 const SelfSimilarProfile& profile,
                                 const std::function<double(double)>& nu_G0,
                                 double tau0, double tau1,
                                 const VolterraOptions& options) {
  params.validate();
  if (!(tau1 > tau0)) throw std::invalid_argument("solve_NG_volterra: tau1 > tau0");
  if (!(options.dtau > 0.0) || options.dtau > 0.05 + 1e-15)
    throw std::invalid_argument("solve_NG_volterra: dtau must lie in (0, 0.05]");
  if (!nu_G0) throw std::invalid_argument("solve_NG_volterra: empty nu_G0");

  // uniform nodes, last one clipped to tau1
  std::vector<double> tau;
  for (double s = tau0; s < tau1 - 1e-12; s += options.dtau)
    tau.push_back(s);
  tau.push_back(tau1);
  const std::size_t n = tau.size();

  VolterraResult out;
  out.tau = tau;
  out.N_G.assign(n, 0.0);
  out.J.assign(n, 0.0);
  out.Delta2.assign(n, 0.0);

  CharacteristicsMap map =
      CharacteristicsMap::frozen(profile, CharacteristicsMap::Clock::selfsim, tau0);

  for (int sweep = 0; sweep <= std::max(0, options.sweeps); ++sweep) {
    if (sweep > 0) {
      // rebuild the propagator from the previous J trace
      auto spline = std::make_shared<PchipInterpolant>(out.tau, out.J);
      map = CharacteristicsMap::build(
          profile, CharacteristicsMap::Clock::selfsim, tau0, tau1,
          [spline](double s) { return (*spline)(s); });
    }
    for (std::size_t k = 0; k < n; ++k) {
      const double tk = tau[k];
      out.Delta2[k] =
          std::exp(0.5 * (tk - tau0)) * nu_G0(map.m(tk)) / map.m_prime(tk);
      double known = out.Delta2[k];
      double K_self = 0.0;
      for (std::size_t i = 0; i + 1 <= k; ++i) {
        const double h = tau[i + 1] - tau[i];
        const double Ka = kernel_Ttilde_dyfs(profile, map, tk, tau[i]);
        const double Kb = (i + 1 == k) ? -profile.Ns
                                       : kernel_Ttilde_dyfs(profile, map, tk, tau[i + 1]);
        known += 0.5 * h * Ka * out.J[i];
        if (i + 1 == k)
          K_self = 0.5 * h * Kb;  // weight of the implicit endpoint
        else
          known += 0.5 * h * Kb * out.J[i + 1];
        if (options.extra_forcing)
          known += 0.5 * h * (options.extra_forcing(tk, tau[i]) +
                              options.extra_forcing(tk, tau[i + 1]));
      }
      double N = (k == 0) ? out.Delta2[0] : out.N_G[k - 1];
      for (int it = 0; it < options.picard_cap; ++it) {
        const double N_new = known + K_self * eval_J(params, profile, N, tk);
        if (std::abs(N_new - N) <= options.picard_tol * std::max(1.0, std::abs(N_new))) {
          N = N_new;
          break;
        }
        N = N_new;
      }
      out.N_G[k] = N;
      out.J[k] = eval_J(params, profile, N, tk);
    }
  }
  return out;
}

XYResult integrate_xy_system(const SelfSimilarProfile& profile, double eta,
                             const std::function<double(double)>& Delta1,
                             const std::function<double(double)>& Delta2,
                             const std::function<double(double)>& Hterm,
                             double tau0, double tau1, double X0, double Y0,
                             const XYOptions& options) {
  const double g = profile.gamma;
  if (!(g > 0.0 && g < 0.5))
    throw std::invalid_argument("integrate_xy_system: gamma in (0, 1/2)");
  if (!(eta > 0.0 && eta < 1.0 - g)) {
    std::ostringstream msg;
    msg << "integrate_xy_system: eta = " << eta << " outside (0, " << 1.0 - g << ")";
    throw std::domain_error(msg.str());
  }
  if (!(tau1 > tau0)) throw std::invalid_argument("integrate_xy_system: tau1 > tau0");
  if (!(options.dtau > 0.0)) throw std::invalid_argument("integrate_xy_system: dtau > 0");

  const double d1_bound = g * g * g * (1.0 - g - eta) / 16.0;
  auto check_d1 = [&](double tau) {
    const double d = Delta1(tau);
    if (std::abs(d) > d1_bound) {
      std::ostringstream msg;
      msg << "integrate_xy_system: |Delta1(" << tau << ")| = " << std::abs(d)
          << " exceeds the admissible bound gamma^3 (1 - gamma - eta) / 16 = "
          << d1_bound;
      throw std::domain_error(msg.str());
    }
    return d;
  };

  const double a11 = -(1.0 - g) / g;
  const double a12 = (1.0 - g) * (1.0 - 2.0 * g) / g;
  const double a21 = a11;
  const double a22 = a12 - g;

  auto rhs = [&](double tau, double X, double Y, double& dX, double& dY) {
    const double d1 = check_d1(tau);
    const double f = Delta2(tau) + Hterm(tau);
    dX = a11 * X + a12 * Y + f * (1.0 + d1) +
         a11 * d1 * (X - (1.0 - 2.0 * g) * Y);
    dY = a21 * X + a22 * Y + f;
  };

  XYResult out;
  auto record = [&](double tau, double X, double Y) {
    out.tau.push_back(tau);
    out.X.push_back(X);
    out.Y.push_back(Y);
    out.N.push_back(a11 * X + a12 * Y + Delta2(tau));
  };

  double tau = tau0, X = X0, Y = Y0;
  record(tau, X, Y);
  std::size_t step = 0;
  const std::size_t every = std::max<std::size_t>(1, options.record_every);
  while (tau < tau1 - 1e-14) {
    const double h = std::min(options.dtau, tau1 - tau);
    double k1x, k1y, k2x, k2y, k3x, k3y, k4x, k4y;
    rhs(tau, X, Y, k1x, k1y);
    rhs(tau + 0.5 * h, X + 0.5 * h * k1x, Y + 0.5 * h * k1y, k2x, k2y);
    rhs(tau + 0.5 * h, X + 0.5 * h * k2x, Y + 0.5 * h * k2y, k3x, k3y);
    rhs(tau + h, X + h * k3x, Y + h * k3y, k4x, k4y);
    X += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    Y += h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y);
    tau += h;
    ++step;
    if (step % every == 0 || tau >= tau1 - 1e-14) record(tau, X, Y);
  }
  return out;
}

DecayFit fit_decay_rate(const std::vector<double>& tau,
                        const std::vector<double>& values, double floor) {
  if (tau.size() != values.size())
    throw std::invalid_argument("fit_decay_rate: size mismatch");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    if (std::abs(values[i]) > floor) {
      xs.push_back(tau[i]);
      ys.push_back(std::log(std::abs(values[i])));
    }
  }
  if (xs.size() < 10) {
    std::ostringstream msg;
    msg << "fit_decay_rate: degenerate window, only " << xs.size()
        << " samples above the floor " << floor << " (need 10)";
    throw std::invalid_argument(msg.str());
  }
  const LineFit line = fit_line(xs, ys);
  return DecayFit{-line.slope, std::exp(line.intercept), line.r2};
}

}  // namespace poredyn
