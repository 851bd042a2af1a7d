#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "poredyn/numerics.hpp"
#include "poredyn/profile.hpp"

using namespace poredyn;

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((ModelParams{3.0, 1.0, 0.5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{3.0, 1.0, 0.7}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{3.0, 1.0, -0.5}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{0.0, 1.0, 0.25}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{-1.0, 1.0, 0.25}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((ModelParams{3.0, 0.0, 0.25}).validate(), std::invalid_argument);
  CHECK_NOTHROW((ModelParams{3.0, 1.0, 0.25}).validate());
  CHECK_NOTHROW((ModelParams{2.0, 1.0, -1.0}).validate());
  CHECK_NOTHROW((ModelParams{4.0, 1.0, 0.0}).validate());
}

TEST_CASE("derived constants at reference parameter points") {
  {
    const SelfSimilarProfile p = derive_profile(ModelParams{3.0, 1.0, 0.25});
    CHECK(p.theta == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(p.Ns == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.cs == doctest::Approx(0.25).epsilon(1e-15));
  }
  {
    const SelfSimilarProfile p = derive_profile(ModelParams{4.0, 1.0, 0.0});
    CHECK(p.Ns == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(p.cs == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(std::isinf(p.theta));
    CHECK(p.value(2.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-15));
    CHECK(std::isinf(p.support_end()));
  }
  {
    const SelfSimilarProfile p = derive_profile(ModelParams{2.0, 1.0, -1.0});
    CHECK(p.Ns == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(p.cs == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(p.theta == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p.support_end() == doctest::Approx(1.0).epsilon(1e-15));
    // F_s = 0.75 (1 - y)^{-1/2} inside [0, 1), zero outside
    CHECK(p.value(0.75) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(p.value(1.5) == 0.0);
  }
}

TEST_CASE("closed-form identities across the parameter range") {
  for (double g : {-1.0, -0.3, 0.0, 0.1, 0.25, 0.4, 0.49}) {
    for (double beta : {0.5, 2.0, 3.0, 7.0}) {
      const SelfSimilarProfile p = derive_profile(ModelParams{beta, 1.0, g});
      CHECK(p.beta() == doctest::Approx(beta).epsilon(1e-13));
      CHECK(p.cs == doctest::Approx((1.0 - 2.0 * g) * p.Ns / 4.0).epsilon(1e-13));
      if (g > 0.0)
        CHECK(p.cs == doctest::Approx(p.Ns * g * g * (p.theta - 1.0) *
                                      (p.theta - 2.0))
                          .epsilon(1e-13));
    }
  }
}

TEST_CASE("stationary equation residual and derivative") {
  for (double g : {-0.5 + 1e-3, 0.0, 0.25, 0.45}) {
    const SelfSimilarProfile p = derive_profile(ModelParams{3.0, 1.0, g});
    const double y_hi = g < 0.0 ? 0.9 * p.support_end() : 50.0;
    for (int k = 0; k <= 20; ++k) {
      const double y = y_hi * k / 20.0;
      CHECK(std::abs(fs_residual(p, y)) <= 1e-14);
      const double h = 1e-6 * (1.0 + y);
      const double fd = (p.value(y + h) - p.value(y - h)) / (2.0 * h);
      CHECK(p.derivative(y) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("tail integrals against quadrature") {
  const SelfSimilarProfile p = derive_profile(ModelParams{3.0, 1.0, 0.25});
  for (double r : {0.0, 0.5, 2.0, 10.0, 100.0}) {
    const double mass_q =
        integrate([&](double y) { return p.value(y); }, r, 1e6, 1e-12);
    const double mom_q =
        integrate([&](double y) { return y * p.value(y); }, r, 1e6, 1e-10);
    // quadrature truncated at 1e6; closed forms carry the remainder
    CHECK(p.tail_mass(r) == doctest::Approx(mass_q).epsilon(1e-6));
    CHECK(p.tail_first_moment(r) == doctest::Approx(mom_q).epsilon(1e-4));
    CHECK(p.nu(r) ==
          doctest::Approx(p.tail_first_moment(r) - r * p.tail_mass(r))
              .epsilon(1e-13));
  }
  // gamma = 1/4 collapses nu to an elementary form: nu(r) = 2 / (1 + r/4)
  for (double r : {0.0, 1.0, 4.0, 40.0, 1e4}) {
    CHECK(p.nu(r) == doctest::Approx(2.0 / (1.0 + 0.25 * r)).epsilon(1e-12));
  }
  CHECK(1e4 * p.nu(1e4) == doctest::Approx(8.0).epsilon(2e-3));
}

TEST_CASE("tail integrals for the exponential branch") {
  const SelfSimilarProfile p = derive_profile(ModelParams{4.0, 1.0, 0.0});
  for (double r : {0.0, 1.0, 5.0}) {
    CHECK(p.tail_mass(r) ==
          doctest::Approx(2.0 * p.cs * std::exp(-0.5 * r)).epsilon(1e-13));
    CHECK(p.tail_first_moment(r) ==
          doctest::Approx(2.0 * p.cs * (r + 2.0) * std::exp(-0.5 * r))
              .epsilon(1e-13));
  }
  CHECK(p.tail_first_moment(0.0) == doctest::Approx(p.Ns).epsilon(1e-14));
}

TEST_CASE("tail integrals vanish beyond a compact support") {
  const SelfSimilarProfile p = derive_profile(ModelParams{2.0, 1.0, -1.0});
  CHECK(p.tail_mass(1.0) == 0.0);
  CHECK(p.tail_first_moment(2.0) == 0.0);
  CHECK(p.nu(1.5) == 0.0);
  // stop short of the inverse-square-root edge; the closed form supplies it
  const double edge = 1.0 - 1e-6;
  const double mom_q =
      integrate([&](double y) { return y * p.value(y); }, 0.0, edge, 1e-11);
  CHECK(p.tail_first_moment(0.0) - p.tail_first_moment(edge) ==
        doctest::Approx(mom_q).epsilon(1e-8));
}
