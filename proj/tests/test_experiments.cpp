#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "poredyn/experiments.hpp"

using namespace poredyn;
namespace fs = std::filesystem;

namespace {

const SelfSimilarProfile kProfile = derive_profile(ModelParams{3.0, 1.0, 0.25});

ExperimentConfig base_config(Scenario s) {
  ExperimentConfig c;
  c.scenario = s;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& stem)
      : path(fs::temp_directory_path() / stem) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("scenario names round trip") {
  const Scenario all[] = {
      Scenario::selfsimilar_audit,  Scenario::hyperbolic_stability,
      Scenario::parabolic_stability, Scenario::volterra_vs_sim,
      Scenario::barrier_audit,      Scenario::xy_system,
      Scenario::full_reduction,
  };
  for (Scenario s : all) {
    const std::string n = scenario_name(s);
    CHECK(scenario_from_name(n) == s);
    CHECK(n.find(' ') == std::string::npos);
  }
  CHECK(scenario_name(Scenario::barrier_audit) == "barrier-audit");
  CHECK_THROWS_AS(scenario_from_name("no-such-scenario"),
                  std::invalid_argument);
}

TEST_CASE("config validation cites its admissibility windows") {
  {
    ExperimentConfig c = base_config(Scenario::hyperbolic_stability);
    c.epsilon = 3.1;  // >= (1 - gamma)/gamma = 3
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  {
    ExperimentConfig c = base_config(Scenario::parabolic_stability);
    c.epsilon = 2.1;  // > 1/(2 gamma) = 2
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  {
    ExperimentConfig c = base_config(Scenario::xy_system);
    c.eta = 0.8;  // >= 1 - gamma
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  {
    ExperimentConfig c = base_config(Scenario::barrier_audit);
    c.lambda = 2.0;  // >= 3/2 + 2 gamma
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  {
    ExperimentConfig c = base_config(Scenario::hyperbolic_stability);
    c.c0 = -0.01;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  }
  CHECK_NOTHROW(base_config(Scenario::hyperbolic_stability).validate());
  CHECK_NOTHROW(base_config(Scenario::full_reduction).validate());
}

TEST_CASE("unmodulated perturbation takes its closed-form values") {
  ExperimentConfig c = base_config(Scenario::hyperbolic_stability);
  const Perturbation p = build_perturbation(c, true, false);
  // G0(y) = c0 (1 + y/4)^{-4} at epsilon = 1
  CHECK(p.G0(0.0) == doctest::Approx(0.01).epsilon(1e-15));
  CHECK(p.G0(4.0) == doctest::Approx(0.000625).epsilon(1e-14));
  // hat component vanishes at the origin and is positive after
  CHECK(p.Ghat0(0.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(p.Ghat0(1e-4) > 0.0);

  // physical and self-similar versions are the same object
  const double t0 = std::exp(c.tau0);
  for (double x : {0.0, 0.5, 3.0}) {
    CHECK(p.g0(x) ==
          doctest::Approx(std::pow(t0, -1.5) * p.G0(x / t0)).epsilon(1e-12));
    CHECK(p.ghat0(x) ==
          doctest::Approx(std::pow(t0, -1.5) * p.Ghat0(x / t0))
              .epsilon(1e-11));
  }

  // curvature envelope: exact sup c0 q (q+1) gamma^2 = 1.25 c0 at q = 4
  CHECK(p.d2_sup == doctest::Approx(0.0125).epsilon(1e-5));
  CHECK(p.d2_bound == doctest::Approx(envelope_kappa(kProfile, 1.0) * 0.01)
                          .epsilon(1e-13));
  CHECK(envelope_kappa(kProfile, 1.0) == doctest::Approx(2.5).epsilon(1e-13));
  CHECK(p.d2_sup <= p.d2_bound);

  // closed-form first moment: c0 / (gamma^2 (q-2)(q-1)) at q = theta + eps
  // plus c0 (32/9) e^{-eps gamma tau0} from the hat component
  const double mass_ref = 0.01 * 16.0 / 6.0 +
                          0.01 * (32.0 / 9.0) * std::exp(-0.25 * c.tau0);
  CHECK(p.measured_mass == doctest::Approx(mass_ref).epsilon(1e-6));
  CHECK(p.measured_mass <= p.mass_bound);
}

TEST_CASE("seeded perturbation is deterministic and admissible") {
  ExperimentConfig c = base_config(Scenario::hyperbolic_stability);
  const Perturbation a = build_perturbation(c, true);
  const Perturbation b = build_perturbation(c, true);
  CHECK(a.u1 == b.u1);
  CHECK(a.u2 == b.u2);
  CHECK(a.measured_mass == b.measured_mass);
  CHECK(a.G0(1.3) == b.G0(1.3));

  c.seed = 777;
  const Perturbation d = build_perturbation(c, false);
  CHECK(d.u1 != a.u1);

  CHECK(a.u1 >= 0.0);
  CHECK(a.u1 < 1.0);
  CHECK(a.u2 >= 0.0);
  CHECK(a.u2 < 1.0);

  // the cosine modulation can push the signed mass anywhere inside the
  // bound, including below zero; only the bound itself is structural
  CHECK(std::abs(a.measured_mass) <= a.mass_bound);
  CHECK(a.measured_mass != 0.0);
  const Perturbation flat = build_perturbation(c, true, false);
  CHECK(a.measured_mass != flat.measured_mass);
  CHECK(a.d2_sup <= a.d2_bound);
}

TEST_CASE("curvature envelope helper flags a violating shape") {
  // (1+gamma y)^{-theta-eps} alone has weighted curvature q(q+1) g^2 = 1.25;
  // dividing by gamma^2 pushes it far above kappa = 2.5
  const auto spiky = [&](double y) {
    return 20.0 * std::pow(1.0 + 0.25 * y, -4.0);
  };
  const double sup = envelope_weighted_d2_sup(spiky, kProfile, 1.0);
  CHECK(sup == doctest::Approx(20.0 * 1.25).epsilon(1e-4));
  CHECK(sup > envelope_kappa(kProfile, 1.0) * 1.0);
}

TEST_CASE("audit scenario runs, passes, and is byte-deterministic") {
  TempDir tmp("poredyn_test_audit");
  ExperimentConfig c = base_config(Scenario::selfsimilar_audit);
  c.out_dir = (tmp.path / "a").string();
  const ScenarioReport report = run_scenario(c);
  CHECK(report.name == "selfsimilar-audit");
  CHECK(report.pass);
  REQUIRE(!report.criteria.empty());
  for (const auto& crit : report.criteria) CHECK(crit.pass);

  const CriterionResult* moment = find_criterion(report, "moment_identity");
  REQUIRE(moment != nullptr);
  CHECK(moment->value <= moment->threshold);
  CHECK(find_criterion(report, "not-a-criterion") == nullptr);

  const fs::path dir = tmp.path / "a" / "selfsimilar-audit";
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "rates.json"));
  CHECK(fs::exists(dir / "moments.csv"));
  CHECK(fs::is_directory(dir / "profiles"));

  // rerun into a second directory: identical bytes everywhere
  c.out_dir = (tmp.path / "b").string();
  run_scenario(c);
  const fs::path dir2 = tmp.path / "b" / "selfsimilar-audit";
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), dir);
    CHECK(slurp(entry.path()) == slurp(dir2 / rel));
  }
}

TEST_CASE("xy scenario meets its criteria quickly") {
  TempDir tmp("poredyn_test_xy");
  ExperimentConfig c = base_config(Scenario::xy_system);
  c.out_dir = tmp.path.string();
  const ScenarioReport report = run_scenario(c);
  CHECK(report.pass);
  const CriterionResult* rate = find_criterion(report, "forced_decay_rate_error");
  REQUIRE(rate != nullptr);
  CHECK(rate->value <= rate->threshold);
}
