#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "poredyn/field.hpp"
#include "poredyn/grid.hpp"
#include "poredyn/profile.hpp"

using namespace poredyn;
namespace fs = std::filesystem;

namespace {

void check_grid_invariants(const RadialGrid& g, std::size_t n, double x_max) {
  CHECK(g.size() == n);
  CHECK(g.edges().size() == n + 1);
  CHECK(g.edge(0) == 0.0);
  CHECK(g.x_max() == doctest::Approx(x_max).epsilon(1e-12));
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(g.edge(i + 1) > g.edge(i));
    CHECK(g.width(i) == doctest::Approx(g.edge(i + 1) - g.edge(i)).epsilon(1e-14));
    CHECK(g.center(i) ==
          doctest::Approx(0.5 * (g.edge(i) + g.edge(i + 1))).epsilon(1e-14));
  }
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

fs::path temp_file(const char* stem) {
  return fs::temp_directory_path() / stem;
}

}  // namespace

TEST_CASE("grid constructors satisfy the edge invariants") {
  check_grid_invariants(RadialGrid::uniform(40.0, 64), 64, 40.0);
  check_grid_invariants(RadialGrid::geometric(40.0, 64, 1.1), 64, 40.0);
  check_grid_invariants(RadialGrid::stretched(1e4, 256), 256, 1e4);
  check_grid_invariants(RadialGrid::with_first_width(1e5, 512, 0.05), 512, 1e5);

  const RadialGrid u = RadialGrid::uniform(40.0, 64);
  for (std::size_t i = 0; i < u.size(); ++i)
    CHECK(u.width(i) == doctest::Approx(40.0 / 64).epsilon(1e-13));

  const RadialGrid geo = RadialGrid::geometric(40.0, 64, 1.1);
  for (std::size_t i = 0; i + 1 < geo.size(); ++i)
    CHECK(geo.width(i + 1) / geo.width(i) == doctest::Approx(1.1).epsilon(1e-9));
}

TEST_CASE("stretched grid caps the last cell") {
  const RadialGrid g = RadialGrid::stretched(1e4, 256, 0.02);
  CHECK(g.width(g.size() - 1) <= 0.02 * 1e4 * (1.0 + 1e-12));
  // still genuinely graded: first cell far smaller than uniform spacing
  CHECK(g.width(0) < 1e4 / 256.0);
}

TEST_CASE("with_first_width hits the requested width or falls back to uniform") {
  const RadialGrid g = RadialGrid::with_first_width(1e5, 4096, 0.05);
  CHECK(g.width(0) == doctest::Approx(0.05).epsilon(1e-9));
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    CHECK(g.width(i + 1) >= g.width(i) * (1.0 - 1e-12));

  // first_width >= x_max / n cannot grade upward; expect the uniform grid
  const RadialGrid flat = RadialGrid::with_first_width(40.0, 64, 1.0);
  for (std::size_t i = 0; i < flat.size(); ++i)
    CHECK(flat.width(i) == doctest::Approx(40.0 / 64).epsilon(1e-13));
}

TEST_CASE("refined splits every cell in two") {
  const RadialGrid g = RadialGrid::stretched(100.0, 32);
  const RadialGrid r = g.refined();
  CHECK(r.size() == 2 * g.size());
  CHECK(r.x_max() == doctest::Approx(g.x_max()).epsilon(1e-15));
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(r.edge(2 * i) == doctest::Approx(g.edge(i)).epsilon(1e-15));
    CHECK(r.edge(2 * i + 1) ==
          doctest::Approx(g.center(i)).epsilon(1e-15));
  }
}

TEST_CASE("edge vector validation") {
  std::vector<double> too_few(16);
  for (std::size_t i = 0; i < too_few.size(); ++i) too_few[i] = double(i);
  CHECK_THROWS_AS((RadialGrid(too_few)), std::invalid_argument);

  std::vector<double> shifted(33);
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = 0.1 + double(i);
  CHECK_THROWS_AS((RadialGrid(shifted)), std::invalid_argument);

  std::vector<double> stalled(33);
  for (std::size_t i = 0; i < stalled.size(); ++i) stalled[i] = double(i);
  stalled[20] = stalled[19];
  CHECK_THROWS_AS((RadialGrid(stalled)), std::invalid_argument);

  CHECK_THROWS_AS(RadialGrid::uniform(-1.0, 64), std::invalid_argument);
  CHECK_THROWS_AS(RadialGrid::geometric(10.0, 64, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(RadialGrid::with_first_width(10.0, 64, 0.0),
                  std::invalid_argument);
}

TEST_CASE("midpoint mass and moment on an exponential") {
  const RadialGrid g = RadialGrid::uniform(40.0, 4096);
  const DensityField f = sample_field(
      g, [](double x) { return std::exp(-x); }, Variables::physical, 1.0);
  CHECK(total_mass(f) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(first_moment(f) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK_FALSE(f.is_signed);
  CHECK(f.time == 1.0);
}

TEST_CASE("tail-corrected moment of the stationary profile") {
  const SelfSimilarProfile p = derive_profile(ModelParams{3.0, 1.0, 0.25});
  const RadialGrid g = RadialGrid::stretched(1e4, 4096);
  const DensityField F = sample_field(
      g, [&](double y) { return p.value(y); }, Variables::selfsim, 0.0);
  CHECK(tail_moment_correction(F, p) ==
        doctest::Approx(p.tail_first_moment(1e4)).epsilon(1e-13));
  CHECK(std::abs(first_moment(F, p) - p.Ns) < 1e-6);

  // physical variant: correction = sqrt(t) * tailM1(x_max / t)
  const double t = 4.0;
  const DensityField f = sample_field(
      g, [&](double x) { return std::pow(t, -1.5) * p.value(x / t); },
      Variables::physical, t);
  CHECK(tail_moment_correction(f, p) ==
        doctest::Approx(std::sqrt(t) * p.tail_first_moment(1e4 / t))
            .epsilon(1e-13));

  DensityField bad = f;
  bad.time = 0.0;
  CHECK_THROWS_AS(tail_moment_correction(bad, p), std::invalid_argument);
}

TEST_CASE("selfsim transform round trip and moment identity") {
  const SelfSimilarProfile p = derive_profile(ModelParams{3.0, 1.0, 0.25});
  const double t = 9.0;
  const RadialGrid g = RadialGrid::stretched(1e3, 128);
  DensityField f = sample_field(
      g, [&](double x) { return std::pow(t, -1.5) * p.value(x / t); },
      Variables::physical, t);
  f.boundary_value = 2.0;

  const DensityField F = to_selfsim(f, t);
  CHECK(F.variables == Variables::selfsim);
  CHECK(F.time == doctest::Approx(std::log(t)).epsilon(1e-15));
  CHECK(F.grid.x_max() == doctest::Approx(1e3 / t).epsilon(1e-14));
  REQUIRE(F.boundary_value.has_value());
  CHECK(*F.boundary_value ==
        doctest::Approx(2.0 * std::pow(t, 1.5)).epsilon(1e-14));
  for (std::size_t i = 0; i < F.grid.size(); ++i)
    CHECK(F.values[i] ==
          doctest::Approx(p.value(F.grid.center(i))).epsilon(1e-12));

  // discrete moment identity is exact, not just consistent
  CHECK(first_moment(f) ==
        doctest::Approx(std::sqrt(t) * first_moment(F)).epsilon(1e-14));

  const DensityField back = from_selfsim(F, t);
  CHECK(back.variables == Variables::physical);
  CHECK(back.time == doctest::Approx(t).epsilon(1e-15));
  REQUIRE(back.boundary_value.has_value());
  CHECK(*back.boundary_value == doctest::Approx(2.0).epsilon(1e-14));
  for (std::size_t i = 0; i < back.grid.size(); ++i) {
    CHECK(back.grid.center(i) == doctest::Approx(g.center(i)).epsilon(1e-14));
    CHECK(back.values[i] == doctest::Approx(f.values[i]).epsilon(1e-14));
  }

  CHECK_THROWS_AS(to_selfsim(f, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(to_selfsim(F, t), std::invalid_argument);
  CHECK_THROWS_AS(from_selfsim(f, t), std::invalid_argument);
}

TEST_CASE("csv round trip and byte determinism") {
  const RadialGrid g = RadialGrid::uniform(20.0, 64);
  const DensityField f = sample_field(
      g, [](double x) { return std::exp(-0.3 * x) * std::cos(x); },
      Variables::selfsim, 1.75, true);

  const fs::path a = temp_file("poredyn_field_a.csv");
  const fs::path b = temp_file("poredyn_field_b.csv");
  write_field_csv(f, a.string());
  write_field_csv(f, b.string());
  CHECK(slurp(a) == slurp(b));

  const std::string text = slurp(a);
  CHECK(text.rfind("# variables=selfsim time=1.75", 0) == 0);

  const DensityField r = read_field_csv(a.string());
  CHECK(r.variables == Variables::selfsim);
  CHECK(r.time == doctest::Approx(1.75).epsilon(1e-15));
  REQUIRE(r.grid.size() == f.grid.size());
  for (std::size_t i = 0; i < r.grid.size(); ++i) {
    CHECK(r.grid.center(i) ==
          doctest::Approx(f.grid.center(i)).epsilon(1e-13));
    const double want = f.values[i];
    if (std::abs(want) > 1e-300)
      CHECK(r.values[i] == doctest::Approx(want).epsilon(1e-14));
  }
  std::remove(a.string().c_str());
  std::remove(b.string().c_str());
}

TEST_CASE("format_g15 keeps 15 significant digits") {
  CHECK(format_g15(0.25) == "0.25");
  CHECK(format_g15(1.0 / 3.0) == "0.333333333333333");
  CHECK(std::stod(format_g15(std::exp(1.0))) ==
        doctest::Approx(std::exp(1.0)).epsilon(1e-14));
}

TEST_CASE("default truncation radius") {
  CHECK(default_x_max(100.0, 0.25) == doctest::Approx(8e4).epsilon(1e-13));
  CHECK(default_x_max(10.0, 2.0) == doctest::Approx(2000.0).epsilon(1e-13));
}
