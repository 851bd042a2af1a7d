#include <cstdio>
#include <exception>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "poredyn/experiments.hpp"

using poredyn::ExperimentConfig;
using poredyn::Scenario;
using poredyn::ScenarioReport;

namespace {

void add_model_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--gamma", cfg.params.gamma, "tail parameter, < 1/2")
      ->capture_default_str();
  cmd->add_option("--beta", cfg.params.beta, "mean-field coupling, > 0")
      ->capture_default_str();
  cmd->add_option("--mu", cfg.params.mu, "boundary value at x = 0, > 0")
      ->capture_default_str();
  cmd->add_option("--epsilon", cfg.epsilon, "initial-tail steepening exponent")
      ->capture_default_str();
  cmd->add_option("--c0", cfg.c0, "perturbation amplitude, >= 0")
      ->capture_default_str();
  cmd->add_option("--tau0", cfg.tau0, "start of the self-similar clock")
      ->capture_default_str();
  cmd->add_option("--efolds", cfg.efolds,
                  "run length past tau0 (0 = scenario default)");
  cmd->add_option("--cells", cfg.cells, "grid cells")->capture_default_str();
  cmd->add_option("--x-max", cfg.x_max, "truncation radius (0 = default)");
  cmd->add_option("--dt-rel", cfg.dt_rel, "relative time step (0 = default)");
}

void add_full_options(CLI::App* cmd, ExperimentConfig& cfg) {
  cmd->add_option("--vext", cfg.full.Vext, "applied voltage")
      ->capture_default_str();
  cmd->add_option("--ctilde-m", cfg.full.Ctilde_m,
                  "electrostatic well curvature coefficient")
      ->capture_default_str();
  cmd->add_option("--estar", cfg.full.Estar, "energy barrier height")
      ->capture_default_str();
  cmd->add_option("--e0", cfg.full.E0, "energy at the matching radius")
      ->capture_default_str();
  cmd->add_option("--rstar", cfg.full.rstar, "barrier peak radius")
      ->capture_default_str();
  cmd->add_option("--r0", cfg.full.r0, "matching radius")->capture_default_str();
  cmd->add_option("--sigma-l", cfg.full.sigma_l, "line tension")
      ->capture_default_str();
  cmd->add_option("--sigma-c", cfg.full.sigma_c, "bath conductivity")
      ->capture_default_str();
  cmd->add_option("--sm", cfg.full.S_m, "membrane surface conductance")
      ->capture_default_str();
  cmd->add_option("--cm", cfg.full.C_m, "membrane capacitance")
      ->capture_default_str();
  cmd->add_option("--length", cfg.full.L, "electrode half-distance")
      ->capture_default_str();
  cmd->add_option("--source-amp", cfg.full.source_amp,
                  "pore creation rate amplitude")
      ->capture_default_str();
}

int print_reports(const std::vector<ScenarioReport>& reports) {
  bool all_pass = true;
  for (const ScenarioReport& report : reports)
    for (const poredyn::CriterionResult& c : report.criteria) {
      std::printf("[%s] %s/%s: %.6g %s %.6g\n", c.pass ? "PASS" : "FAIL",
                  report.name.c_str(), c.name.c_str(), c.value,
                  c.comparison.c_str(), c.threshold);
      all_pass = all_pass && c.pass;
    }
  std::printf("%s\n", all_pass ? "all criteria passed" : "some criteria FAILED");
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pore-density model experiments"};
  app.set_config("--config", "", "INI file; sections name the subcommands");
  app.require_subcommand(1);

  ExperimentConfig cfg;
  app.add_option("--out", cfg.out_dir, "output directory")->capture_default_str();
  app.add_option("--seed", cfg.seed, "perturbation phase seed")
      ->capture_default_str();

  const std::vector<std::pair<std::string, Scenario>> scenarios = {
      {"audit", Scenario::selfsimilar_audit},
      {"transport", Scenario::hyperbolic_stability},
      {"parabolic", Scenario::parabolic_stability},
      {"volterra", Scenario::volterra_vs_sim},
      {"barrier", Scenario::barrier_audit},
      {"xy", Scenario::xy_system},
      {"full", Scenario::full_reduction},
  };
  const std::vector<std::string> descriptions = {
      "self-similar profile identities and quadrature checks",
      "transport-limit stability run",
      "diffusive stability run with boundary layer",
      "closed moment equation against the simulated moment",
      "diffusive correction decay barrier",
      "iterated-moment linear system checks",
      "pore-scale model and its reduction",
  };

  std::vector<std::pair<CLI::App*, Scenario>> commands;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    CLI::App* cmd =
        app.add_subcommand(scenarios[i].first, descriptions[i]);
    add_model_options(cmd, cfg);
    commands.emplace_back(cmd, scenarios[i].second);
  }
  // scenario-specific knobs
  commands[4].first->add_option("--lambda", cfg.lambda,
                                "barrier exponent in [3/2, 3/2 + 2 gamma)")
      ->capture_default_str();
  commands[4].first->add_option("--t0", cfg.barrier_t0, "audit start time")
      ->capture_default_str();
  commands[5].first->add_option("--eta", cfg.eta,
                                "forcing decay rate in (0, 1 - gamma)")
      ->capture_default_str();
  add_full_options(commands[6].first, cfg);

  CLI::App* all_cmd =
      app.add_subcommand("all", "run every scenario with the shared settings");
  add_model_options(all_cmd, cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    std::vector<ScenarioReport> reports;
    if (all_cmd->parsed()) {
      reports = run_all(cfg);
    } else {
      for (const auto& [cmd, scenario] : commands)
        if (cmd->parsed()) {
          cfg.scenario = scenario;
          reports.push_back(run_scenario(cfg));
        }
    }
    return print_reports(reports);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
