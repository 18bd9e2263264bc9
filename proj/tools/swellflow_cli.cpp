// Command line front end: thermo evaluation, identity verification, flow-law
// comparison, column scenarios, and parameter sweeps.  All results land as
// CSV in the configured output directory; exit codes: 0 success, 1 domain or
// solver error, 2 usage/config error.
#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "swellflow/config.hpp"
#include "swellflow/csv.hpp"
#include "swellflow/errors.hpp"
#include "swellflow/identities.hpp"
#include "swellflow/scenarios.hpp"
#include "swellflow/simulator.hpp"
#include "swellflow/thermo.hpp"

namespace {

using namespace swellflow;

namespace fs = std::filesystem;

std::string out_path(const std::string& dir, const std::string& name) {
  fs::create_directories(dir);
  return (fs::path(dir) / name).string();
}

int cmd_thermo_eval(const std::string& preset, const std::string& state_file,
                    const std::string& out_dir) {
  RunConfig cfg = load_config(state_file);
  if (!preset.empty()) cfg.model.preset = preset;
  auto model = cfg.make_model();
  const MixtureState& s = cfg.state;

  CsvWriter csv(out_path(out_dir.empty() ? cfg.output.directory : out_dir, "thermo_eval.csv"));
  csv.comment("seed=" + std::to_string(cfg.output.seed));
  csv.row({"quantity", "species", "value"});
  auto put = [&](const std::string& q, const std::string& sp, double v) {
    csv.row({q, sp, format_double(v)});
  };
  put("psi", "", model->psi(s));
  put("p_l", "", thermo::liquid_pressure(*model, s));
  const auto dec = thermo::pressure_decomposition(*model, s);
  put("classical_pressure", "", dec.classical_pressure);
  put("pi_l", "", dec.swelling_pressure);
  put("gibbs", "", thermo::gibbs_potential(*model, s));
  for (std::size_t j = 0; j < model->species_count(); ++j) {
    const auto& name = model->species()[j].name;
    put("mu", name, thermo::chemical_potential(*model, s, j));
    put("mu_tilde", name, thermo::electrochemical_potential(*model, s, j));
  }
  if (model->bulk_reference()) {
    const auto bs = thermo::bulk_equilibrium_map(*model, s);
    put("p_B", "", bs.pressure);
    for (std::size_t j = 0; j < model->species_count(); ++j) {
      put("a_B", model->species()[j].name, bs.activities[j]);
    }
    put("feasible", "", bs.feasible ? 1.0 : 0.0);
  }
  std::cout << "thermo-eval: wrote thermo_eval.csv\n";
  return 0;
}

int cmd_verify(const std::string& preset, std::size_t states, std::uint64_t seed,
               const std::string& out_dir) {
  RunConfig cfg = default_config();
  cfg.species = default_species_table(3);
  cfg.model.incompressible.reference_potentials.assign(3, 0.0);
  cfg.state.partial_densities.assign(3, 300.0);
  cfg.model.preset = preset;
  auto model = cfg.make_model();
  const auto sample = identities::sample_states(*model, states, seed);

  CsvWriter csv(out_path(out_dir, "identities.csv"));
  csv.comment("seed=" + std::to_string(seed));
  csv.comment("model=" + preset);
  csv.row({"identity_id", "states_tested", "max_rel_error", "pass"});
  bool all_pass = true;
  for (auto id : identities::all_identities()) {
    if (!identities::identity_applicable(id, *model)) {
      csv.row({identities::identity_name(id), "0", "0", "inapplicable"});
      continue;
    }
    const auto rep = identities::verify_identity(id, *model, sample);
    all_pass = all_pass && rep.pass;
    csv.row({identities::identity_name(id), std::to_string(rep.states_tested),
             format_double(rep.max_rel_error), rep.pass ? "true" : "false"});
    std::cout << (rep.pass ? "PASS " : "FAIL ") << identities::identity_name(id)
              << " max_rel_error=" << format_double(rep.max_rel_error) << "\n";
  }
  return all_pass ? 0 : 1;
}

int cmd_flow_compare(const std::string& config_file) {
  RunConfig cfg = load_config(config_file);
  auto model = cfg.make_model();
  const auto path = scenarios::synthetic_path(cfg.state, cfg.path);
  const double h = cfg.path.fd_step * cfg.path.wavelength;
  const auto bulk = model->bulk_reference();

  CsvWriter csv(out_path(cfg.output.directory, "flow_compare.csv"));
  csv.comment("seed=" + std::to_string(cfg.output.seed));
  csv.row({"formulation", "term", "component", "value"});
  const char* axes = "xyz";
  auto emit = [&](const std::string& form, const std::string& term,
                  const flowlaws::Vec3& v) {
    for (int c = 0; c < 3; ++c) {
      csv.row({form, term, std::string(1, axes[c]), format_double(v[c])});
    }
  };

  for (std::size_t k = 0; k < cfg.path.eval_points; ++k) {
    const double x =
        cfg.path.wavelength * static_cast<double>(k + 1) /
        static_cast<double>(cfg.path.eval_points + 1);
    const MixtureState s = path(x);
    const auto grads = flowlaws::gradients_from_state_path(*model, path, x, h,
                                                           bulk ? &*bulk : nullptr);
    for (auto f : {flowlaws::Formulation::Pressure, flowlaws::Formulation::Gibbs,
                   flowlaws::Formulation::Potential}) {
      const auto force = flowlaws::rhs(f, *model, s, grads, cfg.flow);
      const std::string name = flowlaws::formulation_name(f) + "@x=" + format_double(x);
      emit(name, "total", force.total);
      emit(name, "pressure", force.pressure);
      emit(name, "swelling", force.swelling);
      emit(name, "lorentz", force.lorentz);
      emit(name, "hydration", force.hydration);
      emit(name, "concentration", force.concentration);
    }
  }
  std::cout << "flow-compare: wrote flow_compare.csv\n";
  return 0;
}

int cmd_simulate(const std::string& scenario, const std::string& config_file, bool plot_data) {
  RunConfig cfg = load_config(config_file);
  if (!scenario.empty()) cfg.scenario.id = scenario;
  cfg.output.plot_data = cfg.output.plot_data || plot_data;
  auto model = cfg.make_model();
  const auto result = scenarios::run_scenario(cfg.scenario.id, cfg, *model);
  const auto files = scenarios::write_scenario_output(result, cfg, *model);
  std::cout << "simulate " << cfg.scenario.id << ": final max |flux| "
            << format_double(result.final_max_velocity) << " m/s (reference "
            << format_double(result.reference_velocity) << "), " << files.size()
            << " file(s) in " << cfg.output.directory << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_file, const std::string& param,
              const std::vector<std::string>& values) {
  if (values.empty()) throw UsageError("sweep: at least one value required");
  const auto dot = param.find('.');
  if (dot == std::string::npos) {
    throw UsageError("sweep: parameter must be section.key, e.g. scenario.overburden_gradient");
  }
  RunConfig base = load_config(config_file);
  CsvWriter csv(out_path(base.output.directory, "sweep_summary.csv"));
  csv.comment("seed=" + std::to_string(base.output.seed));
  csv.comment("param=" + param);
  csv.row({"value", "final_max_flux", "reference_velocity"});
  for (std::size_t i = 0; i < values.size(); ++i) {
    RunConfig cfg = base;
    const std::string key = param.substr(dot + 1);
    const double value = std::stod(values[i]);
    if (param.substr(0, dot) != "scenario") {
      throw UsageError("sweep: only scenario.* parameters are sweepable");
    }
    if (key == "overburden_gradient") cfg.scenario.overburden_gradient = value;
    else if (key == "bulk_pressure_raise") cfg.scenario.bulk_pressure_raise = value;
    else if (key == "eps_initial") cfg.scenario.eps_initial = value;
    else if (key == "eps_reference") cfg.scenario.eps_reference = value;
    else if (key == "eps_saturation") cfg.scenario.eps_saturation = value;
    else if (key == "length") cfg.scenario.length = value;
    else if (key == "duration") cfg.scenario.duration = value;
    else throw UsageError("sweep: unsupported parameter '" + param + "'");
    cfg.output.directory =
        (fs::path(base.output.directory) / (param.substr(dot + 1) + "_" + values[i])).string();
    auto model = cfg.make_model();
    const auto result = scenarios::run_scenario(cfg.scenario.id, cfg, *model);
    scenarios::write_scenario_output(result, cfg, *model);
    csv.row({values[i], format_double(result.final_max_velocity),
             format_double(result.reference_velocity)});
  }
  std::cout << "sweep: " << values.size() << " run(s) complete\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"chemical-potential flow in swelling porous media"};
  app.require_subcommand(0, 1);

  std::string preset = "P3";
  std::string state_file;
  std::string out_dir;
  auto* thermo_cmd = app.add_subcommand("thermo-eval", "evaluate potentials at a state");
  thermo_cmd->add_option("--model", preset, "model preset (P1, P2, P3)");
  thermo_cmd->add_option("--state", state_file, "config file with [state]")->required();
  thermo_cmd->add_option("--output", out_dir, "output directory override");

  std::string v_preset = "P1";
  std::size_t v_states = 100;
  std::uint64_t v_seed = 42;
  std::string v_out = "out";
  auto* verify_cmd = app.add_subcommand("verify", "run the identity suite");
  verify_cmd->add_option("--model", v_preset, "model preset (P1, P2, P3)");
  verify_cmd->add_option("--states", v_states, "number of sampled states");
  verify_cmd->add_option("--seed", v_seed, "sampling seed");
  verify_cmd->add_option("--output", v_out, "output directory");

  std::string fc_config;
  auto* fc_cmd = app.add_subcommand("flow-compare", "evaluate all flow formulations on a path");
  fc_cmd->add_option("--config", fc_config, "config file")->required();

  std::string sim_scenario;
  std::string sim_config;
  bool sim_plot = false;
  auto* sim_cmd = app.add_subcommand("simulate", "run a column scenario");
  sim_cmd->add_option("--scenario", sim_scenario, "fig5a|fig5b|fig5c|threshold_sweep")
      ->required();
  sim_cmd->add_option("--config", sim_config, "config file")->required();
  sim_cmd->add_flag("--plot-data", sim_plot, "additionally emit x/y series files");

  std::string sw_config, sw_param;
  std::vector<std::string> sw_values;
  auto* sw_cmd = app.add_subcommand("sweep", "run a scenario over parameter values");
  sw_cmd->add_option("--config", sw_config, "config file")->required();
  sw_cmd->add_option("--param", sw_param, "section.key to vary")->required();
  sw_cmd->add_option("--values", sw_values, "comma separated list")->required()->delimiter(',');

  bool print_cfg = false;
  app.add_flag("--print-config", print_cfg, "print the effective default configuration");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (print_cfg && app.get_subcommands().empty()) {
      std::cout << print_config(default_config());
      return 0;
    }
    if (thermo_cmd->parsed()) return cmd_thermo_eval(preset, state_file, out_dir);
    if (verify_cmd->parsed()) return cmd_verify(v_preset, v_states, v_seed, v_out);
    if (fc_cmd->parsed()) return cmd_flow_compare(fc_config);
    if (sim_cmd->parsed()) return cmd_simulate(sim_scenario, sim_config, sim_plot);
    if (sw_cmd->parsed()) return cmd_sweep(sw_config, sw_param, sw_values);
    std::cerr << "error: a subcommand is required (see --help)\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n" << e.history();
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
