#include "swellflow/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "swellflow/csv.hpp"
#include "swellflow/errors.hpp"
#include "swellflow/presets.hpp"

namespace swellflow::scenarios {

namespace {

double base_overburden(const ScenarioConfig& sc, const ConstitutiveModel& m) {
  if (sc.overburden_base > 0.0) return sc.overburden_base;
  if (auto ref = m.bulk_reference()) return ref->reference_pressure;
  return kStandardPressure;
}

sim::SimOptions sim_options(const RunConfig& cfg, double p_base, double gradient) {
  sim::SimOptions opts;
  opts.overburden = [p_base, gradient](double x) { return p_base + gradient * x; };
  opts.electroneutrality = cfg.solver.electroneutrality;
  opts.newton_tolerance = cfg.solver.newton_tolerance;
  opts.newton_max_iterations = cfg.solver.newton_max_iterations;
  opts.max_step_rejections = cfg.solver.max_step_rejections;
  return opts;
}

sim::TimeMode time_mode(const RunConfig& cfg) {
  return cfg.solver.mode == "explicit" ? sim::TimeMode::Explicit : sim::TimeMode::Implicit;
}

std::string time_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "t%012.6f", t);
  return buf;
}

const ExponentialSwellingModel& require_swelling(const ConstitutiveModel& m,
                                                 const std::string& scenario) {
  const auto* p3 = dynamic_cast<const ExponentialSwellingModel*>(&m);
  if (p3 == nullptr) {
    throw PreconditionError("scenario '" + scenario + "' needs the swelling preset P3");
  }
  return *p3;
}

}  // namespace

MixtureState state_at_pressure_eps(const ConstitutiveModel& m, double temperature,
                                   const std::vector<double>& conc, double eps, double pressure,
                                   double phi) {
  auto make = [&](double rho) {
    MixtureState s;
    s.temperature = temperature;
    s.volume_fraction = eps;
    s.partial_densities.resize(conc.size());
    for (std::size_t j = 0; j < conc.size(); ++j) s.partial_densities[j] = conc[j] * rho;
    s.electric_potential = phi;
    return s;
  };
  double rho = 0.0;
  for (std::size_t j = 0; j < conc.size(); ++j) {
    rho += conc[j] * m.species()[j].specific_density;
  }
  const double p_scale = std::max(std::abs(pressure), 1e4);
  for (int it = 0; it < 60; ++it) {
    const double f = thermo::liquid_pressure(m, make(rho)) - pressure;
    if (std::abs(f) < 1e-13 * p_scale) break;
    const double h = std::max(1e-7 * rho, 1e-9);
    const double slope = (thermo::liquid_pressure(m, make(rho + h)) -
                          thermo::liquid_pressure(m, make(rho - h))) /
                         (2.0 * h);
    rho -= f / slope;
  }
  return make(rho);
}

MixtureState state_at_potential_eps(const ConstitutiveModel& m, double temperature, double eps,
                                    double mu_tilde, double phi) {
  if (m.species_count() != 1) {
    throw PreconditionError("state_at_potential_eps: single-species helper");
  }
  auto make = [&](double rho) {
    MixtureState s;
    s.temperature = temperature;
    s.volume_fraction = eps;
    s.partial_densities = {rho};
    s.electric_potential = phi;
    return s;
  };
  double rho = m.species()[0].specific_density;
  double best_rho = rho;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 80; ++it) {
    const double f = thermo::electrochemical_potential(m, make(rho), 0) - mu_tilde;
    if (std::abs(f) < best) {
      best = std::abs(f);
      best_rho = rho;
    }
    if (f == 0.0) break;
    const double h = std::max(1e-8 * rho, 1e-10);
    const double slope = (thermo::electrochemical_potential(m, make(rho + h), 0) -
                          thermo::electrochemical_potential(m, make(rho - h), 0)) /
                         (2.0 * h);
    const double step = f / slope;
    rho -= step;
    if (std::abs(step) < 1e-15 * rho && it > 3) break;
  }
  return make(best_rho);
}

double eps_of_adsorption_energy(const ExponentialSwellingModel& m, double value) {
  if (value > 0.0) throw DomainError("eps_of_adsorption_energy: A is nonpositive on (0,1]");
  double eps = 0.5;
  for (int it = 0; it < 100; ++it) {
    const double f = m.adsorption_energy(eps) - value;
    const double slope = m.adsorption_energy_slope(eps);
    double next = eps - f / slope;
    if (next <= 0.0) next = eps / 2.0;
    if (next > 1.0) next = 0.5 * (eps + 1.0);
    if (std::abs(next - eps) < 1e-16) return next;
    eps = next;
  }
  return eps;
}

flowlaws::StatePath synthetic_path(const MixtureState& base, const PathConfig& pc) {
  return [base, pc](double x) {
    MixtureState s = base;
    const double k = 2.0 * M_PI / pc.wavelength;
    for (std::size_t j = 0; j < s.partial_densities.size(); ++j) {
      const double phase = 0.7 * static_cast<double>(j + 1);
      s.partial_densities[j] *= 1.0 + pc.density_amplitude * std::sin(k * x + phase);
    }
    s.volume_fraction = base.volume_fraction + pc.eps_amplitude * std::sin(k * x + 1.1);
    s.electric_potential = base.electric_potential + pc.phi_amplitude * std::sin(k * x + 2.3);
    return s;
  };
}

double face_velocity_unit(const ConstitutiveModel& m, const MixtureState& cell, double dx,
                          const flowlaws::FlowCoefficients& coeffs) {
  double force = 0.0;
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    const double dmu = 1000.0 / m.species()[j].specific_density;
    force += cell.volume_fraction * cell.partial_densities[j] * dmu / (dx / 2.0);
  }
  return force / coeffs.resistivity(0, 0);
}

TransientResult run_transient(const sim::ColumnState& initial, const ConstitutiveModel& m,
                              const flowlaws::FlowCoefficients& coeffs,
                              const sim::SimOptions& opts, sim::TimeMode mode, double dt0,
                              double duration, std::size_t max_steps, double snapshot_interval,
                              double stop_velocity) {
  TransientResult out;
  out.state = initial;
  out.initial_max_velocity = sim::max_face_velocity(initial, m, coeffs, opts);
  out.snapshots.push_back(initial);
  double dt = dt0;
  double next_snapshot = snapshot_interval;
  for (std::size_t k = 0; k < max_steps && out.state.time < duration; ++k) {
    auto [next, rep] = sim::step(out.state, m, coeffs, dt, mode, opts);
    out.state = std::move(next);
    if (mode == sim::TimeMode::Implicit) {
      dt = rep.rejections > 0 ? rep.dt_used : (rep.newton_iterations <= 4 ? dt * 1.5 : dt);
    }
    if (out.state.time >= next_snapshot) {
      out.snapshots.push_back(out.state);
      next_snapshot += snapshot_interval;
    }
    const bool stopped = stop_velocity > 0.0 && rep.max_abs_flux <= stop_velocity;
    out.reports.push_back(std::move(rep));
    if (stopped) break;
  }
  out.snapshots.push_back(out.state);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

ScenarioResult run_fig5a(const RunConfig& cfg, const ConstitutiveModel& m) {
  const ScenarioConfig& sc = cfg.scenario;
  const double p0 = base_overburden(sc, m);
  const sim::SimOptions opts = sim_options(cfg, p0, 0.0);
  MixtureState base = cfg.state;
  const MixtureState cell = state_at_pressure_eps(m, base.temperature, base.concentrations(),
                                                  sc.eps_initial, p0);
  const auto res = sim::matched_reservoir(m, cell);

  sim::ColumnState col;
  col.grid = sim::ColumnGrid::uniform(sc.cells, sc.length);
  col.cells.assign(sc.cells, cell);
  col.left = sim::BoundaryCondition::reservoir_at(res.bulk_pressure, res.activities);
  col.right = col.left;

  TransientResult tr = run_transient(col, m, cfg.flow, opts, time_mode(cfg), sc.dt_initial,
                                     sc.duration, sc.max_steps, sc.snapshot_interval, 0.0);
  ScenarioResult out;
  out.id = "fig5a";
  out.initial_max_velocity = tr.initial_max_velocity;
  out.reference_velocity =
      sc.reference_velocity > 0.0
          ? sc.reference_velocity
          : std::max(tr.initial_max_velocity,
                     face_velocity_unit(m, cell, col.grid.cell_width, cfg.flow));
  out.snapshots = std::move(tr.snapshots);
  out.reports = std::move(tr.reports);
  out.final_state = tr.state;
  out.final_max_velocity = sim::max_face_velocity(out.final_state, m, cfg.flow, opts);
  return out;
}

ScenarioResult run_fig5b(const RunConfig& cfg, const ConstitutiveModel& m) {
  require_swelling(m, "fig5b");
  const ScenarioConfig& sc = cfg.scenario;
  const double p0 = base_overburden(sc, m);
  const double g = sc.overburden_gradient;
  const sim::SimOptions opts = sim_options(cfg, p0, g);
  const double T = cfg.state.temperature;
  const auto conc = cfg.state.concentrations();

  // potential level anchored at the reference moisture under the end load
  const MixtureState anchor = state_at_pressure_eps(m, T, conc, sc.eps_reference, p0);
  const auto res = sim::matched_reservoir(m, anchor);

  sim::ColumnState col;
  col.grid = sim::ColumnGrid::uniform(sc.cells, sc.length);
  col.cells.resize(sc.cells);
  for (std::size_t i = 0; i < sc.cells; ++i) {
    col.cells[i] = state_at_pressure_eps(m, T, conc, sc.eps_initial,
                                         p0 + g * col.grid.x_center(i));
  }
  col.left = sim::BoundaryCondition::reservoir_at(res.bulk_pressure, res.activities);
  col.right = sim::BoundaryCondition::no_flux();

  ScenarioResult out;
  out.id = "fig5b";
  out.initial_max_velocity = sim::max_face_velocity(col, m, cfg.flow, opts);
  out.reference_velocity =
      sc.reference_velocity > 0.0
          ? sc.reference_velocity
          : std::max(out.initial_max_velocity,
                     face_velocity_unit(m, col.cells.front(), col.grid.cell_width, cfg.flow));
  const double vel_tol = cfg.solver.velocity_tolerance_factor * out.reference_velocity;

  TransientResult tr = run_transient(col, m, cfg.flow, opts, time_mode(cfg), sc.dt_initial,
                                     sc.duration, sc.max_steps, sc.snapshot_interval,
                                     5.0 * vel_tol);
  sim::EquilibriumOptions eq;
  eq.velocity_tolerance = vel_tol;
  eq.sim = opts;
  out.final_state = sim::solve_equilibrium(tr.state, m, cfg.flow, eq);
  out.snapshots = std::move(tr.snapshots);
  out.snapshots.back() = out.final_state;
  out.reports = std::move(tr.reports);
  out.final_max_velocity = sim::max_face_velocity(out.final_state, m, cfg.flow, opts);
  return out;
}

ScenarioResult run_fig5c(const RunConfig& cfg, const ConstitutiveModel& m) {
  require_swelling(m, "fig5c");
  const ScenarioConfig& sc = cfg.scenario;
  const double p0 = base_overburden(sc, m);
  const sim::SimOptions opts = sim_options(cfg, p0, 0.0);
  const double T = cfg.state.temperature;
  const auto conc = cfg.state.concentrations();

  const MixtureState cell = state_at_pressure_eps(m, T, conc, sc.eps_initial, p0);
  auto res = sim::matched_reservoir(m, cell);

  sim::ColumnState col;
  col.grid = sim::ColumnGrid::uniform(sc.cells, sc.length);
  col.cells.assign(sc.cells, cell);
  res.bulk_pressure += sc.bulk_pressure_raise;  // side 1 at higher potential
  col.left = sim::BoundaryCondition::reservoir_at(res.bulk_pressure, res.activities);
  col.right = sim::BoundaryCondition::no_flux();

  ScenarioResult out;
  out.id = "fig5c";
  out.initial_max_velocity = sim::max_face_velocity(col, m, cfg.flow, opts);
  out.reference_velocity =
      sc.reference_velocity > 0.0
          ? sc.reference_velocity
          : std::max(out.initial_max_velocity,
                     face_velocity_unit(m, cell, col.grid.cell_width, cfg.flow));
  const double vel_tol = cfg.solver.velocity_tolerance_factor * out.reference_velocity;

  TransientResult tr = run_transient(col, m, cfg.flow, opts, time_mode(cfg), sc.dt_initial,
                                     sc.duration, sc.max_steps, sc.snapshot_interval,
                                     5.0 * vel_tol);
  sim::EquilibriumOptions eq;
  eq.velocity_tolerance = vel_tol;
  eq.sim = opts;
  out.final_state = sim::solve_equilibrium(tr.state, m, cfg.flow, eq);
  out.snapshots = std::move(tr.snapshots);
  out.snapshots.back() = out.final_state;
  out.reports = std::move(tr.reports);
  out.final_max_velocity = sim::max_face_velocity(out.final_state, m, cfg.flow, opts);
  return out;
}

ScenarioResult run_threshold_sweep(const RunConfig& cfg, const ConstitutiveModel& m) {
  const auto& p3 = require_swelling(m, "threshold_sweep");
  if (m.species_count() != 1 || m.species()[0].charge != 0.0) {
    throw PreconditionError("threshold_sweep: single neutral species configuration required");
  }
  const ScenarioConfig& sc = cfg.scenario;
  if (!(sc.eps_saturation > sc.eps_reference)) {
    throw PreconditionError("threshold_sweep: eps_saturation must exceed eps_reference");
  }
  const double T = cfg.state.temperature;
  const double p0 = base_overburden(sc, m);
  const double L = sc.length;
  const double rho0 = m.species()[0].specific_density;
  const double K = p3.params().bulk_modulus;
  const double mu0 = p3.params().reference_potentials[0];
  const double p_ref = p3.params().reference_pressure;

  // flat-potential anchor at the reference moisture under the base load
  const MixtureState anchor = state_at_pressure_eps(m, T, {1.0}, sc.eps_reference, p0);
  const double mu_res = thermo::electrochemical_potential(m, anchor, 0);
  const auto res = sim::matched_reservoir(m, anchor);

  // largest offsetable gradient: the flat-potential profile under the load
  // p0 - g x grazes eps_saturation at x = L.  Exact inverse of the closure,
  // mu = mu0 + (p_ref + K ln s)/rho0 + A(eps) for the single species.
  const double a_cap = p3.adsorption_energy(sc.eps_saturation);
  auto eps_for_load = [&](double p_applied) {
    const double s = 1.0 + (p_applied - p_ref) / K;
    const double mu_el = (p_ref + K * std::log(s)) / rho0;
    // beyond the saturation capacity the moisture profile maxes out
    return eps_of_adsorption_energy(p3, std::min(mu_res - mu0 - mu_el, a_cap));
  };
  const double mu_el_cap = mu_res - mu0 - a_cap;
  const double s_cap = std::exp((mu_el_cap * rho0 - p_ref) / K);
  const double capacity = (p0 - (p_ref + K * (s_cap - 1.0))) / L;

  ScenarioResult out;
  out.id = "threshold_sweep";
  out.capacity_gradient = capacity;

  sim::ColumnGrid grid = sim::ColumnGrid::uniform(sc.cells, L);
  const sim::TimeMode mode = time_mode(cfg);

  for (double fraction : sc.sweep_fractions) {
    const double g = fraction * capacity;
    const sim::SimOptions opts = sim_options(cfg, p0, -g);  // load falls toward the right
    sim::ColumnState col;
    col.grid = grid;
    col.cells.resize(sc.cells);
    for (std::size_t i = 0; i < sc.cells; ++i) {
      const double x = grid.x_center(i);
      col.cells[i] = state_at_pressure_eps(m, T, {1.0}, eps_for_load(p0 - g * x), p0 - g * x);
    }
    col.left = sim::BoundaryCondition::reservoir_at(res.bulk_pressure, res.activities);
    col.right = sim::BoundaryCondition::no_flux();

    SweepPoint pt;
    pt.applied = g;
    pt.subcritical = fraction <= 1.0;
    pt.flux_initial = sim::max_face_velocity(col, m, cfg.flow, opts);
    // fixed observation window: beyond-capacity runs feed liquid toward the
    // wall indefinitely, so cap the simulated time, not just the steps
    const double window = static_cast<double>(sc.threshold_run_steps) * sc.dt_initial;
    TransientResult tr = run_transient(col, m, cfg.flow, opts, mode, sc.dt_initial,
                                       std::min(sc.duration, window), sc.threshold_run_steps,
                                       sc.snapshot_interval, 0.0);
    pt.flux_final = sim::max_face_velocity(tr.state, m, cfg.flow, opts);
    // local oracle at the column midpoint of the realized profile
    const std::size_t mid = sc.cells / 2;
    const double deps = (tr.state.cells[mid + 1].volume_fraction -
                         tr.state.cells[mid - 1].volume_fraction) /
                        (2.0 * grid.cell_width);
    pt.oracle_threshold =
        flowlaws::threshold_gradient(m, tr.state.cells[mid], flowlaws::xvec(deps));
    out.sweep.push_back(pt);
    if (out.snapshots.empty()) {
      out.snapshots = tr.snapshots;
      out.reports = tr.reports;
      out.final_state = tr.state;
    }
    out.initial_max_velocity = std::max(out.initial_max_velocity, pt.flux_initial);
  }

  // bulk-pressure forcing: reservoirs at both ends, right one lowered;
  // any nonzero step drives flow (no threshold)
  const MixtureState cell0 = state_at_pressure_eps(m, T, {1.0}, sc.eps_initial, p0);
  const auto res0 = sim::matched_reservoir(m, cell0);
  const sim::SimOptions opts0 = sim_options(cfg, p0, 0.0);
  for (double dp : sc.bulk_pressure_steps) {
    sim::ColumnState col;
    col.grid = grid;
    col.cells.assign(sc.cells, cell0);
    col.left = sim::BoundaryCondition::reservoir_at(res0.bulk_pressure, res0.activities);
    col.right = sim::BoundaryCondition::reservoir_at(res0.bulk_pressure - dp, res0.activities);
    SweepPoint pt;
    pt.applied = dp / L;  // equivalent bulk-pressure gradient
    pt.subcritical = false;
    pt.flux_initial = sim::max_face_velocity(col, m, cfg.flow, opts0);
    const double window = static_cast<double>(sc.threshold_run_steps) * sc.dt_initial;
    TransientResult tr = run_transient(col, m, cfg.flow, opts0, mode, sc.dt_initial,
                                       std::min(sc.duration, window), sc.threshold_run_steps,
                                       sc.snapshot_interval, 0.0);
    pt.flux_final = sim::max_face_velocity(tr.state, m, cfg.flow, opts0);
    pt.oracle_threshold = 0.0;  // bulk forcing has no threshold
    out.bulk_sweep.push_back(pt);
  }

  out.reference_velocity =
      sc.reference_velocity > 0.0
          ? sc.reference_velocity
          : std::max(out.initial_max_velocity,
                     face_velocity_unit(m, anchor, grid.cell_width, cfg.flow));
  out.final_max_velocity =
      out.sweep.empty() ? 0.0 : out.sweep.front().flux_final;
  return out;
}

}  // namespace

ScenarioResult run_scenario(const std::string& id, const RunConfig& cfg,
                            const ConstitutiveModel& m) {
  if (id == "fig5a") return run_fig5a(cfg, m);
  if (id == "fig5b") return run_fig5b(cfg, m);
  if (id == "fig5c") return run_fig5c(cfg, m);
  if (id == "threshold_sweep") return run_threshold_sweep(cfg, m);
  throw UsageError("unknown scenario '" + id +
                   "' (expected fig5a, fig5b, fig5c or threshold_sweep)");
}

// ---------------------------------------------------------------------------

std::vector<std::string> write_scenario_output(const ScenarioResult& result,
                                               const RunConfig& cfg,
                                               const ConstitutiveModel& m) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.output.directory);
  std::vector<std::string> written;
  const std::size_t n = m.species_count();
  const double p0 = base_overburden(cfg.scenario, m);
  const sim::SimOptions opts = sim_options(cfg, p0, cfg.scenario.overburden_gradient);

  auto path_of = [&](const std::string& name) {
    return (fs::path(cfg.output.directory) / name).string();
  };

  for (const auto& snap : result.snapshots) {
    const std::string name = result.id + "_" + time_tag(snap.time) + ".csv";
    CsvWriter csv(path_of(name));
    csv.comment("seed=" + std::to_string(cfg.output.seed));
    std::vector<std::string> header = {"time", "cell_index", "x", "eps_l"};
    for (std::size_t j = 0; j < n; ++j) header.push_back("rho_" + m.species()[j].name);
    header.push_back("p_l");
    header.push_back("pi_l");
    for (std::size_t j = 0; j < n; ++j) header.push_back("mu_tilde_" + m.species()[j].name);
    header.push_back("p_B_equiv");
    header.push_back("face_flux_left");
    csv.row(header);
    for (std::size_t i = 0; i < snap.cells.size(); ++i) {
      const auto& c = snap.cells[i];
      std::vector<double> row = {snap.time, static_cast<double>(i), snap.grid.x_center(i),
                                 c.volume_fraction};
      for (std::size_t j = 0; j < n; ++j) row.push_back(c.partial_densities[j]);
      row.push_back(thermo::liquid_pressure(m, c));
      row.push_back(thermo::swelling_pressure(m, c));
      for (std::size_t j = 0; j < n; ++j) {
        row.push_back(thermo::electrochemical_potential(m, c, j));
      }
      row.push_back(sim::matched_reservoir(m, c).bulk_pressure);
      const double flux_left =
          i == 0 ? 0.0
                 : sim::face_velocity(m, cfg.flow, snap.cells[i - 1], c, snap.grid.cell_width);
      row.push_back(flux_left);
      csv.numeric_row(row);
    }
    written.push_back(name);

    if (cfg.output.plot_data) {
      const std::string plot = result.id + "_" + time_tag(snap.time) + "_eps.xy";
      CsvWriter xy(path_of(plot));
      for (std::size_t i = 0; i < snap.cells.size(); ++i) {
        xy.numeric_row({snap.grid.x_center(i), snap.cells[i].volume_fraction});
      }
      written.push_back(plot);
    }
  }

  {
    const std::string name = result.id + "_summary.csv";
    CsvWriter csv(path_of(name));
    csv.comment("seed=" + std::to_string(cfg.output.seed));
    std::vector<std::string> header = {"time"};
    for (std::size_t j = 0; j < n; ++j) header.push_back("total_mass_" + m.species()[j].name);
    header.push_back("max_abs_flux");
    csv.row(header);
    for (const auto& snap : result.snapshots) {
      std::vector<double> row = {snap.time};
      for (double v : sim::total_species_mass(snap)) row.push_back(v);
      row.push_back(sim::max_face_velocity(snap, m, cfg.flow, opts));
      csv.numeric_row(row);
    }
    written.push_back(name);
  }

  if (!result.sweep.empty() || !result.bulk_sweep.empty()) {
    const std::string name = result.id + "_curve.csv";
    CsvWriter csv(path_of(name));
    csv.comment("seed=" + std::to_string(cfg.output.seed));
    csv.comment("capacity_gradient=" + format_double(result.capacity_gradient));
    csv.row({"forcing", "applied_gradient", "flux_initial", "flux_final", "subcritical",
             "oracle_threshold"});
    for (const auto& pt : result.sweep) {
      csv.row({"vicinal", format_double(pt.applied), format_double(pt.flux_initial),
               format_double(pt.flux_final), pt.subcritical ? "1" : "0",
               format_double(pt.oracle_threshold)});
    }
    for (const auto& pt : result.bulk_sweep) {
      csv.row({"bulk", format_double(pt.applied), format_double(pt.flux_initial),
               format_double(pt.flux_final), "0", format_double(pt.oracle_threshold)});
    }
    written.push_back(name);
    if (cfg.output.plot_data) {
      const std::string plot = result.id + "_curve.xy";
      CsvWriter xy(path_of(plot));
      for (const auto& pt : result.sweep) xy.numeric_row({pt.applied, pt.flux_final});
      written.push_back(plot);
    }
  }
  return written;
}

}  // namespace swellflow::scenarios
