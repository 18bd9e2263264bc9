#ifndef SWELLFLOW_SIMULATOR_HPP
#define SWELLFLOW_SIMULATOR_HPP

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "swellflow/flowlaws.hpp"
#include "swellflow/model.hpp"
#include "swellflow/thermo.hpp"

namespace swellflow::sim {

struct ColumnGrid {
  std::size_t cell_count = 50;
  double cell_width = 0.002;  // [m]

  static ColumnGrid uniform(std::size_t cells, double length);
  double length() const { return static_cast<double>(cell_count) * cell_width; }
  double x_center(std::size_t i) const { return (static_cast<double>(i) + 0.5) * cell_width; }
  double x_face(std::size_t i) const { return static_cast<double>(i) * cell_width; }
  void validate() const;
};

/// Reservoir boundary: a bulk fluid at fixed pressure and activities in
/// electrochemical contact with the end cell.  Activities default to 1.
struct ReservoirBoundary {
  double bulk_pressure = 101325.0;  // p^B [Pa]
  std::vector<double> activities;
};

struct BoundaryCondition {
  enum class Kind { NoFlux, Reservoir } kind = Kind::NoFlux;
  ReservoirBoundary reservoir;

  static BoundaryCondition no_flux() { return {}; }
  static BoundaryCondition reservoir_at(double p, std::vector<double> a) {
    BoundaryCondition b;
    b.kind = Kind::Reservoir;
    b.reservoir = {p, std::move(a)};
    return b;
  }
};

/// Discretized 1-D column: one MixtureState per cell plus end conditions.
struct ColumnState {
  ColumnGrid grid;
  std::vector<MixtureState> cells;
  BoundaryCondition left, right;
  double time = 0.0;  // [s]

  void validate(std::size_t species_count) const;
};

enum class TimeMode { Explicit, Implicit };

/// Quasi-static mechanical closure and solver knobs.
///
/// The moisture closure: per cell the conserved variables are the species
/// masses per bulk volume m_j = eps rho^j; the liquid pressure equals the
/// applied overburden at the cell position, which fixes the split between
/// eps and rho (the medium swells or shrinks to carry the load).
struct SimOptions {
  std::function<double(double)> overburden;          // [Pa] vs x; default: model p0
  std::function<double(double)> electric_potential;  // [V] vs x; default 0
  bool electroneutrality = false;  // phi becomes a per-cell unknown (implicit mode)
  double newton_tolerance = 1e-12;  // relative, on the conserved-mass residual
  int newton_max_iterations = 25;
  int max_step_rejections = 12;
};

struct StepReport {
  double dt_used = 0.0;
  double max_abs_flux = 0.0;                 // max face |v^{l,s}| [m/s]
  std::vector<double> total_species_mass;    // integral of eps rho^j dx [kg/m^2]
  int newton_iterations = 0;
  int rejections = 0;
  double stable_dt_estimate = 0.0;           // explicit-mode bound estimate [s]
};

// ---------------------------------------------------------------------------

/// Relative velocity v^{l,s} at the face between two cells: two-point
/// differences of the cell-centered electrochemical potentials feed the
/// potential-form driving force; prefactors eps rho^j use the arithmetic
/// face mean; the scalar resistivity composes in series (harmonic mean of
/// conductivities), which keeps an impermeable side blocking.
double face_velocity(const ConstitutiveModel&, const flowlaws::FlowCoefficients&,
                     const MixtureState& left, const MixtureState& right, double dx);

/// Per-species mass fluxes [kg/(m^2 s)] at the same face; the diffusive part
/// is the Fickian mobility acting on the same potential differences.
std::vector<double> face_species_flux(const ConstitutiveModel&, const flowlaws::FlowCoefficients&,
                                      const MixtureState& left, const MixtureState& right,
                                      double dx);

/// One transient step.  Explicit forward Euler or backward Euler with a
/// damped Newton solve (finite-difference Jacobian, tridiagonal coloring).
/// Implicit rejections halve dt and retry up to the configured limit.
std::pair<ColumnState, StepReport> step(const ColumnState&, const ConstitutiveModel&,
                                        const flowlaws::FlowCoefficients&, double dt, TimeMode,
                                        const SimOptions& = {});

struct EquilibriumOptions {
  double velocity_tolerance = 1e-14;  // success when max face |v| drops below [m/s]
  int max_iterations = 40;
  SimOptions sim;
};

/// Steady state with all face fluxes zero: Newton on the flux divergence.
/// Needs at least one reservoir end; returns the profile with flat
/// electrochemical potentials matching the reservoir.
ColumnState solve_equilibrium(const ColumnState&, const ConstitutiveModel&,
                              const flowlaws::FlowCoefficients&, const EquilibriumOptions&);

// helpers shared by scenarios and tests --------------------------------------

/// Conserved masses of a cell, m_j = eps rho^j.
std::vector<double> cell_masses(const MixtureState&);

/// Rebuilds the cell state from conserved masses under the pressure closure
/// p^l(state) = overburden(x); rho_hint seeds the scalar Newton solve.
MixtureState reconstruct_cell(const ConstitutiveModel&, double temperature,
                              std::span<const double> masses, double x, double rho_hint,
                              const SimOptions&);

/// Bulk potentials of a reservoir boundary [J/kg per species].
std::vector<double> reservoir_potentials(const ConstitutiveModel&, const ReservoirBoundary&,
                                         double temperature);

/// Reservoir in exact equilibrium with a given cell state (single neutral
/// species: closed form; otherwise the Newton map).
ReservoirBoundary matched_reservoir(const ConstitutiveModel&, const MixtureState&);

double max_face_velocity(const ColumnState&, const ConstitutiveModel&,
                         const flowlaws::FlowCoefficients&, const SimOptions& = {});

std::vector<double> total_species_mass(const ColumnState&);

}  // namespace swellflow::sim

#endif
