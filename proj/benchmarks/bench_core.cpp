#include <benchmark/benchmark.h>

#include <cmath>

#include "poredyn/characteristics.hpp"
#include "poredyn/field.hpp"
#include "poredyn/grid.hpp"
#include "poredyn/moments.hpp"
#include "poredyn/parabolic.hpp"
#include "poredyn/profile.hpp"

namespace {

using namespace poredyn;

const ModelParams kParams{};
const SelfSimilarProfile kProfile = derive_profile(kParams);

void BM_profile_value(benchmark::State& state) {
  double y = 0.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kProfile.value(y));
    y = y < 50.0 ? y + 1e-3 : 0.0;
  }
}
BENCHMARK(BM_profile_value);

void BM_first_moment(benchmark::State& state) {
  const RadialGrid grid = RadialGrid::stretched(1e4, state.range(0));
  const DensityField field = sample_field(
      grid, [](double y) { return kProfile.value(y); }, Variables::selfsim, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(first_moment(field, kProfile));
}
BENCHMARK(BM_first_moment)->Arg(1024)->Arg(4096);

void BM_apply_T(benchmark::State& state) {
  const CharacteristicsMap map = CharacteristicsMap::frozen(
      kProfile, CharacteristicsMap::Clock::physical, 1.0);
  const auto phi0 = [](double x) { return std::exp(-x); };
  const RadialGrid grid = RadialGrid::uniform(40.0, 1024);
  std::vector<double> out(grid.size());
  for (auto _ : state) {
    for (std::size_t i = 0; i < grid.size(); ++i)
      out[i] = eval_T(map, phi0, grid.center(i), 16.0);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_apply_T);

void BM_diffusive_step(benchmark::State& state) {
  const RadialGrid grid = RadialGrid::with_first_width(1e5, state.range(0), 0.05);
  const DensityField phi0 = sample_field(
      grid, [](double x) { return std::exp(-0.5 * x); }, Variables::physical,
      1.0);
  ParabolicOptions opts;
  opts.dt_rel = 0.05;
  const auto slope = [](double t) { return -0.75 / t; };
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solve_frozen_flow(phi0, slope, 1.0, 1.1, opts).final_state.values.data());
  }
}
BENCHMARK(BM_diffusive_step)->Arg(1024)->Arg(4096);

void BM_volterra(benchmark::State& state) {
  const auto nu = [](double r) { return std::exp(-0.5 * r); };
  for (auto _ : state) {
    const VolterraResult res =
        solve_NG_volterra(kParams, kProfile, nu, 0.0, 2.0);
    benchmark::DoNotOptimize(res.N_G.data());
  }
}
BENCHMARK(BM_volterra);

}  // namespace

BENCHMARK_MAIN();
