#ifndef SWELLFLOW_SCENARIOS_HPP
#define SWELLFLOW_SCENARIOS_HPP

#include <string>
#include <vector>

#include "swellflow/config.hpp"
#include "swellflow/simulator.hpp"

namespace swellflow::scenarios {

/// One point of the threshold sweep: an applied gradient (or bulk step) and
/// the fluxes it leaves behind.
struct SweepPoint {
  double applied = 0.0;         // [Pa/m] vicinal gradient, or [Pa] bulk step
  double flux_initial = 0.0;    // [m/s]
  double flux_final = 0.0;      // [m/s]
  bool subcritical = false;
  double oracle_threshold = 0.0;  // local pi |grad eps| / eps at the profile [Pa/m]
};

struct ScenarioResult {
  std::string id;
  double reference_velocity = 0.0;   // [m/s]
  double initial_max_velocity = 0.0;
  double final_max_velocity = 0.0;
  std::vector<sim::ColumnState> snapshots;
  std::vector<sim::StepReport> reports;
  sim::ColumnState final_state;

  // threshold_sweep extras
  double capacity_gradient = 0.0;    // largest offsetable gradient [Pa/m]
  std::vector<SweepPoint> sweep;
  std::vector<SweepPoint> bulk_sweep;
};

/// Known scenario ids: fig5a, fig5b, fig5c, threshold_sweep.
ScenarioResult run_scenario(const std::string& id, const RunConfig&, const ConstitutiveModel&);

/// Snapshot/summary CSV files per snapshot plus scenario extras; returns the
/// written file names.
std::vector<std::string> write_scenario_output(const ScenarioResult&, const RunConfig&,
                                               const ConstitutiveModel&);

// ---------------------------------------------------------------------------
// Building blocks shared with tests and the CLI

/// State with prescribed composition and volume fraction whose liquid
/// pressure equals `pressure` (density solved by a scalar Newton).
MixtureState state_at_pressure_eps(const ConstitutiveModel&, double temperature,
                                   const std::vector<double>& concentrations, double eps,
                                   double pressure, double phi = 0.0);

/// Single-species state at prescribed eps whose electrochemical potential
/// equals `mu_tilde` (density solved; machine-polished).
MixtureState state_at_potential_eps(const ConstitutiveModel&, double temperature, double eps,
                                    double mu_tilde, double phi = 0.0);

/// Moisture with adsorption energy A(eps) = `value` for preset P3.
double eps_of_adsorption_energy(const ExponentialSwellingModel&, double value);

/// Smooth synthetic state path for formulation-equivalence work: densities,
/// volume fraction and potential modulated sinusoidally around a base state.
flowlaws::StatePath synthetic_path(const MixtureState& base, const PathConfig&);

/// Natural face velocity unit of a column setup: what a 1 kPa bulk-pressure
/// step across a boundary face would drive.
double face_velocity_unit(const ConstitutiveModel&, const MixtureState& cell, double dx,
                          const flowlaws::FlowCoefficients&);

struct TransientResult {
  sim::ColumnState state;
  std::vector<sim::StepReport> reports;
  std::vector<sim::ColumnState> snapshots;  // includes initial and final
  double initial_max_velocity = 0.0;
};

/// Adaptive implicit (or fixed-step explicit) transient: dt grows 1.5x after
/// easy Newton solves, keeps the halved value after rejections.  Stops on
/// duration, step budget, or max face velocity below `stop_velocity` (>0).
TransientResult run_transient(const sim::ColumnState& initial, const ConstitutiveModel&,
                              const flowlaws::FlowCoefficients&, const sim::SimOptions&,
                              sim::TimeMode, double dt0, double duration, std::size_t max_steps,
                              double snapshot_interval, double stop_velocity);

}  // namespace swellflow::scenarios

#endif
