#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "poredyn/parabolic.hpp"

using namespace poredyn;

namespace {
const ModelParams kParams{3.0, 1.0, 0.25};
const SelfSimilarProfile kProfile = derive_profile(kParams);
}

TEST_CASE("boundary layer closed forms") {
  const BoundaryLayer layer = make_boundary_layer(kParams, kProfile);
  CHECK(layer.mu == 1.0);
  CHECK(layer.cs == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(layer.value(0.0, 1.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(layer.value(2.0, 1.0) ==
        doctest::Approx(0.75 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(layer.first_moment(1.0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(layer.first_moment(4.0) ==
        doctest::Approx(1.0 - 0.25 / 8.0).epsilon(1e-14));
  CHECK(layer.positivity_time() ==
        doctest::Approx(std::pow(0.25, 2.0 / 3.0)).epsilon(1e-14));
  CHECK(layer.refined_term(2.0, 4.0) ==
        doctest::Approx(0.375 * std::exp(-2.0)).epsilon(1e-14));

  // self-similar expression agrees with the physical one at tau = ln t
  for (double t : {1.0, 3.0}) {
    for (double x : {0.0, 0.5, 2.0}) {
      CHECK(layer.selfsim_value(x / t, std::log(t)) ==
            doctest::Approx(std::pow(t, 1.5) * layer.value(x, t))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("layer defect pinned value and uniform envelope") {
  const BoundaryLayer layer = make_boundary_layer(kParams, kProfile);
  CHECK(compute_Rbl(layer, 0.0, 0.0, 1.0) ==
        doctest::Approx(0.5625).epsilon(1e-12));

  // |R_bl| <= C t^{-1} e^{-x/2} with one constant for all t >= 1
  const double C_bar = 0.76;
  for (double t : {1.0, 10.0, 100.0}) {
    double sup = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      const double x = 40.0 * i / 2000.0;
      sup = std::max(sup,
                     std::abs(compute_Rbl(layer, 0.0, x, t)) * t *
                         std::exp(0.5 * x));
    }
    CHECK(sup <= C_bar);
    // the envelope is tight at the origin, not vacuous
    if (t == 1.0) CHECK(sup >= 0.5);
  }
}

TEST_CASE("layer subtraction cancels at the origin") {
  const double t = 2.0;
  const BoundaryLayer layer = make_boundary_layer(kParams, kProfile);
  const RadialGrid g = RadialGrid::uniform(40.0, 256);
  DensityField f = sample_field(
      g,
      [&](double x) {
        return std::pow(t, -1.5) * kProfile.value(x / t) + layer.value(x, t);
      },
      Variables::physical, t);
  f.boundary_value = kParams.mu;

  const DensityField diff = subtract_layers(f, kProfile, layer);
  CHECK(diff.is_signed);
  REQUIRE(diff.boundary_value.has_value());
  CHECK(std::abs(*diff.boundary_value) <= 1e-12);
  for (double v : diff.values) CHECK(std::abs(v) <= 1e-13);

  DensityField off = f;
  off.boundary_value = kParams.mu + 0.1;
  CHECK_THROWS_AS(subtract_layers(off, kProfile, layer), std::runtime_error);
}

TEST_CASE("drift-diffusion step is second order in space") {
  // exact mode of d/dt phi = d/dx(d/dx phi + phi) on [0, 20]:
  //   phi = e^{-x/2} sin(pi x / 20) e^{-lambda (t - 1)},
  //   lambda = (pi/20)^2 + 1/4
  const double L = 20.0, t0 = 1.0, t1 = 1.1;
  const double k = std::numbers::pi / L;
  const double lambda = k * k + 0.25;
  const auto exact = [&](double x, double t) {
    return std::exp(-0.5 * x) * std::sin(k * x) *
           std::exp(-lambda * (t - t0));
  };
  const auto zero_slope = [](double) { return 0.0; };

  std::vector<double> errs;
  for (std::size_t n : {256u, 512u}) {
    const RadialGrid g = RadialGrid::uniform(L, n);
    DensityField phi0 = sample_field(
        g, [&](double x) { return exact(x, t0); }, Variables::physical, t0,
        true);
    phi0.boundary_value = 0.0;
    ParabolicOptions opts;
    opts.dt_rel = 2e-5;
    const FrozenFlowResult run =
        solve_frozen_flow(phi0, zero_slope, t0, t1, opts);
    CHECK(run.final_state.time == doctest::Approx(t1).epsilon(1e-12));
    double err = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      err = std::max(err,
                     std::abs(run.final_state.values[i] -
                              exact(g.center(i), t1)));
    errs.push_back(err);
  }
  CHECK(errs[0] / errs[1] >= 3.5);
  CHECK(errs[1] < 1e-4);
}

TEST_CASE("frozen flow snapshots carry the homogeneous boundary") {
  const RadialGrid g = RadialGrid::uniform(20.0, 64);
  DensityField phi0 = sample_field(
      g, [](double x) { return x * std::exp(-x); }, Variables::physical, 1.0);
  phi0.boundary_value = 0.0;
  ParabolicOptions opts;
  opts.snapshot_times = {1.5, 2.0};
  const FrozenFlowResult run =
      solve_frozen_flow(phi0, [](double) { return -0.5; }, 1.0, 2.0, opts);
  REQUIRE(run.snapshots.size() == 2);
  for (const auto& s : run.snapshots) {
    REQUIRE(s.boundary_value.has_value());
    CHECK(*s.boundary_value == 0.0);
    CHECK(s.variables == Variables::physical);
  }
  CHECK(run.snapshots[0].time == doctest::Approx(1.5).epsilon(1e-12));

  DensityField wrong = phi0;
  wrong.variables = Variables::selfsim;
  CHECK_THROWS_AS(solve_frozen_flow(wrong, [](double) { return 0.0; }, 1.0, 2.0),
                  std::invalid_argument);
  ParabolicOptions bad;
  bad.snapshot_times = {5.0};
  CHECK_THROWS_AS(solve_frozen_flow(phi0, [](double) { return 0.0; }, 1.0, 2.0,
                                    bad),
                  std::invalid_argument);
}

TEST_CASE("nonlinear solve keeps the Dirichlet value and positivity") {
  const BoundaryLayer layer = make_boundary_layer(kParams, kProfile);
  const double t0 = 1.0, t_end = 4.0;
  const RadialGrid g = RadialGrid::with_first_width(
      default_x_max(t_end, kParams.gamma), 1024, 0.05);
  DensityField f0 = sample_field(
      g,
      [&](double x) {
        return std::pow(t0, -1.5) * kProfile.value(x / t0) +
               layer.value(x, t0);
      },
      Variables::physical, t0);
  f0.boundary_value = kParams.mu;

  ParabolicOptions opts;
  opts.snapshot_times = {2.0, 4.0};
  const ParabolicResult run =
      solve_parabolic(f0, kParams, kProfile, t0, t_end, opts);

  REQUIRE(run.snapshots.size() == 2);
  for (const auto& s : run.snapshots) {
    REQUIRE(s.boundary_value.has_value());
    CHECK(*s.boundary_value == kParams.mu);
    for (double v : s.values) CHECK(v >= 0.0);
  }
  CHECK(run.snapshots[0].time == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(run.snapshots[1].time == doctest::Approx(4.0).epsilon(1e-12));

  REQUIRE(run.trace.t.size() > 5);
  CHECK(run.trace.t.front() == doctest::Approx(t0).epsilon(1e-14));
  CHECK(run.trace.t.back() == doctest::Approx(t_end).epsilon(1e-12));
  CHECK(run.trace.n_f.front() ==
        doctest::Approx(first_moment(f0, kProfile)).epsilon(1e-10));
  for (double v : run.trace.n_f) CHECK(v > 0.0);

  CHECK_THROWS_AS(solve_parabolic(f0, kParams, kProfile, 4.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("diffusive barrier audit bookkeeping") {
  const auto phi0 = [&](double x) { return kProfile.value(x); };
  const auto j = [](double) { return 0.0; };
  const RadialGrid g = RadialGrid::with_first_width(2000.0, 512, 0.05);
  const std::vector<double> samples = {1.0, 1.5, 2.2, 3.0, 4.0};
  const auto rows = barrier_audit(kParams, kProfile, phi0, j, 1.75, 1.0, 4.0,
                                  g, samples);
  REQUIRE(rows.size() == samples.size());
  CHECK(rows[0].t == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rows[0].ratio == doctest::Approx(0.0).epsilon(1e-12));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(std::isfinite(rows[i].ratio));
    CHECK(rows[i].ratio >= 0.0);
    if (i > 0) CHECK(rows[i].t > rows[i - 1].t);
  }

  CHECK_THROWS_AS(barrier_audit(kParams, kProfile, phi0, j, 2.1, 1.0, 4.0, g,
                                samples),
                  std::invalid_argument);
  CHECK_THROWS_AS(barrier_audit(kParams, kProfile, phi0, j, 1.4, 1.0, 4.0, g,
                                samples),
                  std::invalid_argument);
}

TEST_CASE("admissible drift amplitude for the barrier argument") {
  // min of 1/(2 N_s^2) = 0.125, (3/2 + 2g - lambda)/(8 beta (theta+2)) = 1/480,
  // g/(5 theta) = 1/60 at lambda = 7/4
  const double bound = barrier_cj_bound(kParams, kProfile, 1.75);
  CHECK(bound == doctest::Approx(0.25 / 120.0).epsilon(1e-13));
  CHECK(bound > 0.0);

  const ModelParams diffusive{4.0, 1.0, 0.0};
  const SelfSimilarProfile flat = derive_profile(diffusive);
  CHECK_THROWS_AS(barrier_cj_bound(diffusive, flat, 1.5),
                  std::invalid_argument);
}
