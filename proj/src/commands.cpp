#include "epiwelfare/commands.hpp"

#include <chrono>
#include <iostream>

#include "CLI11.hpp"
#include "epiwelfare/format.hpp"
#include "epiwelfare/output.hpp"

namespace epiwelfare {

namespace {

void log_line(const std::string& msg) { std::cerr << "[epiwelfare] " << msg << '\n'; }

}  // namespace

OutputSet solve_outputs(const RunConfig& config) {
  log_line("R0 = beta/gamma = " + format_csv(basic_reproduction_number(config.params)));
  const Solution sol = solve_value_function(config.params, config.grid, config.solver_options());
  log_line("solved " + std::to_string(config.grid.n_S) + "x" + std::to_string(config.grid.n_I) +
           " grid, residual " + format_csv(sol.stats.residual));

  const io::KeyValues summary = {
      {"R0", format_csv(basic_reproduction_number(config.params))},
      {"column_sweeps", std::to_string(sol.stats.sweeps)},
      {"bellman_residual", format_csv(sol.stats.residual)},
      {"value_at_state0", format_csv(sol.value.interpolate(config.S0, config.I0))},
      {"policy_at_state0", format_csv(sol.policy.lockdown(config.S0, config.I0, config.params.L_bar))},
  };
  return {
      {"value.csv", io::field_csv(sol.value, sol.policy)},
      {"policy.csv", io::policy_csv(sol.policy)},
      {"solve_summary", io::key_values(summary)},
  };
}

OutputSet simulate_outputs(const RunConfig& config, const SimulateFlags& flags) {
  PlannerParams params = config.params;
  if (flags.tau) params.tau = *flags.tau;
  log_line("R0 = beta/gamma = " + format_csv(basic_reproduction_number(params)));

  ScenarioRun run = flags.no_control
                        ? simulate_uncontrolled(params, config.state0(), config.horizon, config.dt,
                                                config.output_stride)
                        : simulate_optimal(params, config.grid, config.state0(), config.horizon, config.dt,
                                           config.solver_options(), config.output_stride);
  return {
      {"trajectory.csv", io::trajectory_csv(run.trajectory)},
      {"summary", io::summary_text(run.summary)},
  };
}

OutputSet ethics_outputs(const RunConfig& config) {
  using namespace ethics;
  std::vector<AxiomReport> reports;
  std::string conclusions;
  for (const auto& crit : config.criteria) {
    for (int a = 1; a <= 8; ++a) {
      reports.push_back(check_axiom(crit, static_cast<Axiom>(a), config.samples, config.seed, config.universe));
    }
    const std::string label = crit.label();
    const auto rc = repugnant_witness(crit, Allocation{config.repugnant_base}, config.repugnant_epsilon,
                                      config.repugnant_n_max);
    conclusions += label + ".repugnant=" +
                   (rc ? "witness n=" + std::to_string(rc->n) + " clones_value=" + format_csv(rc->clones_value) +
                             " base_value=" + format_csv(rc->base_value)
                       : std::string("none within n_max=") + std::to_string(config.repugnant_n_max)) +
                   "\n";
    const auto vs = very_sadistic_witness(crit, config.sadistic_n_max);
    conclusions += label + ".very_sadistic=" +
                   (vs ? "witness positive=" + format_exact(vs->positive.levels()[0]) + "x" +
                             std::to_string(vs->positive.size()) + " (value " + format_csv(vs->positive_value) +
                             ") negative=" + format_exact(vs->negative.levels()[0]) + "x" +
                             std::to_string(vs->negative.size()) + " (value " + format_csv(vs->negative_value) + ")"
                       : std::string("none within n_max=") + std::to_string(config.sadistic_n_max)) +
                   "\n";
  }

  MatrixOptions mopt;
  mopt.budget = config.samples;
  mopt.seed = config.seed;
  mopt.universe = config.universe;
  mopt.repugnant_base = config.repugnant_base;
  mopt.repugnant_epsilon = config.repugnant_epsilon;
  mopt.repugnant_n_max = config.repugnant_n_max;
  const auto cells = property_matrix(config.criteria, mopt);

  return {
      {"axioms.csv", io::axiom_csv(reports)},
      {"axioms.txt", io::axiom_table(reports)},
      {"matrix.csv", io::matrix_csv(cells)},
      {"matrix.txt", io::matrix_table(cells)},
      {"conclusions", conclusions},
  };
}

OutputSet sensitivity_outputs(const RunConfig& config) {
  const SensitivitySetup setup = config.sensitivity_setup();
  const SensitivityReport report = run_sensitivity(setup, config.criteria, config.reference_pop, config.victim);
  const SensitivityReport ladder = run_ladder(setup, config.ladder);
  for (const auto* rep : {&report, &ladder}) {
    for (const auto& row : rep->rows) {
      if (!row.ok) log_line("row " + row.label + " failed: " + row.error);
    }
  }
  return {
      {"sensitivity.csv", io::sensitivity_csv(report)},
      {"policy_diff.csv", io::policy_difference_csv(report)},
      {"ladder.csv", io::sensitivity_csv(ladder)},
      {"ladder_policy_diff.csv", io::policy_difference_csv(ladder)},
  };
}

std::string run_manifest(const RunConfig& config, std::string_view subcommand, const OutputSet& files) {
  // The output location does not affect results, so it is left out of the hash.
  RunConfig hashed = config;
  hashed.out_dir.clear();
  io::KeyValues kv = {
      {"tool", "epiwelfare"},
      {"version", std::string(kVersion)},
      {"subcommand", std::string(subcommand)},
      {"config_hash", io::hex64(io::fnv1a64(serialize_config(hashed)))},
      {"seed", std::to_string(config.seed)},
  };
  for (const auto& [name, contents] : files) kv.emplace_back("file." + name, io::hex64(io::fnv1a64(contents)));
  return io::key_values(kv);
}

void emit_outputs(const RunConfig& config, std::string_view subcommand, const OutputSet& files) {
  const std::filesystem::path dir(config.out_dir);
  for (const auto& [name, contents] : files) io::write_file(dir / name, contents);
  io::write_file(dir / "run_manifest", run_manifest(config, subcommand, files));
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Epidemic lockdown planner and population-ethics toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "key=value configuration file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "random seed");

  auto* solve = app.add_subcommand("solve", "solve the planner's Bellman equation and export V and L");
  auto* simulate = app.add_subcommand("simulate", "closed-loop trajectory under the optimal policy");
  SimulateFlags sim_flags;
  simulate->add_option("--tau", sim_flags.tau, "testing regime override")->check(CLI::IsMember({0, 1}));
  simulate->add_flag("--no-control", sim_flags.no_control, "simulate with L = 0");
  auto* ethics_cmd = app.add_subcommand("ethics", "axiom suite, property matrix and conclusion witnesses");
  std::vector<std::string> criteria;
  std::optional<std::size_t> samples;
  ethics_cmd->add_option("--criterion", criteria, "criterion, e.g. RDCLU(beta=0.9,c=1); repeatable");
  ethics_cmd->add_option("--samples", samples, "random samples per axiom");
  auto* sens = app.add_subcommand("sensitivity", "death-valuation criterion sweep and cost ladder");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  const auto started = std::chrono::steady_clock::now();
  try {
    RunConfig config = config_path.empty() ? RunConfig{} : load_config(config_path);
    if (out_dir) config.out_dir = *out_dir;
    if (seed) config.seed = *seed;
    if (samples) config.samples = *samples;
    if (!criteria.empty()) {
      config.criteria.clear();
      for (const auto& c : criteria) config.criteria.push_back(ethics::parse_criterion(c));
    }
    validate_config(config);

    std::string name;
    OutputSet files;
    if (*solve) {
      name = "solve";
      files = solve_outputs(config);
    } else if (*simulate) {
      name = "simulate";
      files = simulate_outputs(config, sim_flags);
    } else if (*ethics_cmd) {
      name = "ethics";
      files = ethics_outputs(config);
    } else if (*sens) {
      name = "sensitivity";
      files = sensitivity_outputs(config);
    }
    emit_outputs(config, name, files);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    log_line(name + " wrote " + std::to_string(files.size() + 1) + " files to " + config.out_dir + " in " +
             format_csv(secs) + " s");
    return 0;
  } catch (const ConfigError& e) {
    log_line("config error: " + std::string(e.what()));
    return 1;
  } catch (const std::invalid_argument& e) {
    log_line("invalid input: " + std::string(e.what()));
    return 1;
  } catch (const SolverError& e) {
    log_line("solver failure: " + std::string(e.what()));
    return 2;
  } catch (const std::exception& e) {
    log_line("error: " + std::string(e.what()));
    return 3;
  }
}

}  // namespace epiwelfare
