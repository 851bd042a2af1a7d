#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "poredyn/full_model.hpp"
#include "poredyn/moments.hpp"
#include "poredyn/parabolic.hpp"
#include "poredyn/profile.hpp"
#include "poredyn/transport.hpp"

namespace poredyn {

/// Named desk-scale experiments. Each one writes a self-contained directory
/// (moments.csv, profiles/, rates.json, report.json, plus vm.csv for the
/// full model) and reports pass/fail per criterion it touches.
enum class Scenario {
  selfsimilar_audit,    // profile identities, moment and residual checks
  hyperbolic_stability, // transport run: moment decay and profile convergence
  parabolic_stability,  // diffusive run: layer-subtracted decay, weighted ratio
  volterra_vs_sim,      // closed moment equation against the simulated moment
  barrier_audit,        // diffusive correction under the decay barrier
  xy_system,             // iterated-moment linear system: eigenpairs, forced decay
  full_reduction,       // pore-scale model: detailed balance, reduction match
};

std::string scenario_name(Scenario s);          // kebab-case directory name
Scenario scenario_from_name(const std::string& name);  // inverse, throws

struct ExperimentConfig {
  Scenario scenario = Scenario::selfsimilar_audit;
  ModelParams params{};     // reduced-problem parameters
  FullModelParams full{};   // pore-scale parameters (full_reduction only)
  double epsilon = 1.0;     // initial-tail steepening exponent
  double c0 = 0.01;         // perturbation amplitude, >= 0
  double tau0 = std::log(100.0);  // start of the self-similar clock
  double efolds = 0.0;      // run length past tau0; 0 picks the scenario default
  double lambda = 1.75;     // barrier exponent, in [3/2, 3/2 + 2 gamma)
  double eta = 0.2;         // forcing decay rate for the xy scenario
  double barrier_t0 = 1.0;  // barrier audit start time
  std::size_t cells = 4096;
  double x_max = 0.0;   // truncation radius; 0 picks the scenario default
  double dt_rel = 0.0;  // relative time step; 0 picks the scenario default
  unsigned long long seed = 2026;
  std::string out_dir = "out";

  void validate() const;  // throws std::invalid_argument citing the bound
};

/// Seeded admissible initial perturbation in self-similar variables at tau0,
///   G0(y)    = c0 w(y) (1 + gamma y)^{-theta - epsilon},
///   w(y)     = cos(2 pi u1 + (1/4 + u2/2) y / (1 + y)),
///   Ghat0(y) = c0 e^{(2 - eps gamma) tau0} (e^{-y e^{tau0}/2} - e^{-3 y e^{tau0}/2}),
/// together with the physical-variable pair g0(x) = t0^{-3/2} G0(x/t0),
/// ghat0(x) = c0 t0^{1/2 - eps gamma} (e^{-x/2} - e^{-3x/2}), t0 = e^{tau0}.
struct Perturbation {
  std::function<double(double)> G0, Ghat0;  // self-similar, at tau0
  std::function<double(double)> g0, ghat0;  // physical, at t0
  double u1 = 0.0, u2 = 0.0;                // seeded phases
  double measured_mass = 0.0;               // int_0^inf y (G0 + Ghat0) dy
  double mass_bound = 0.0;    // c0 / (g^2 (th-2)(th-1)) + 4 e^{-eps g tau0}
  double d2_sup = 0.0;        // weighted curvature sup of G0 (when checked)
  double d2_bound = 0.0;      // kappa c0
};

/// Curvature envelope constant kappa = 2 max(1, q (q+1) gamma^2), q = theta+eps.
double envelope_kappa(const SelfSimilarProfile& profile, double epsilon);

/// sup over y in [0, 50] of |fn''(y)| (1 + gamma y)^{theta + epsilon + 2},
/// second derivative by central differences with h proportional to 1 + y.
double envelope_weighted_d2_sup(const std::function<double(double)>& fn,
                                const SelfSimilarProfile& profile,
                                double epsilon);

/// Builds the seeded perturbation, verifies the initial-moment bound, and
/// (when check_second_derivative is set) the curvature envelope; violations
/// throw std::invalid_argument naming the measured value and the bound.
/// modulated = false freezes w to 1 (deterministic reference shape).
Perturbation build_perturbation(const ExperimentConfig& config,
                                bool check_second_derivative,
                                bool modulated = true);

struct CriterionResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  std::string comparison;  // "<=", "<", ">=" relating value to threshold
  bool pass = false;
};

struct ScenarioReport {
  std::string name;
  std::vector<CriterionResult> criteria;
  bool pass = false;  // conjunction of the criteria
};

/// nullptr when no criterion of that name was recorded.
const CriterionResult* find_criterion(const ScenarioReport& report,
                                      const std::string& name);

/// Runs one scenario, writing its outputs under out_dir/<scenario-name>/.
/// All output bytes are functions of the config alone (fixed seed included).
ScenarioReport run_scenario(const ExperimentConfig& config);

/// Runs every scenario in declaration order with the shared config.
std::vector<ScenarioReport> run_all(const ExperimentConfig& config);

}  // namespace poredyn
