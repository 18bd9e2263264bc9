#ifndef SWELLFLOW_THERMO_HPP
#define SWELLFLOW_THERMO_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "swellflow/constants.hpp"
#include "swellflow/model.hpp"

namespace swellflow::thermo {

/// Split of the liquid pressure into the classical (fixed-mass volume
/// change) part and the swelling part.  total = classical + swelling is an
/// exact identity.
struct PressureDecomposition {
  double classical_pressure = 0.0;  // [Pa]
  double swelling_pressure = 0.0;   // [Pa]
  double total = 0.0;               // [Pa]
};

/// p^l = sum_j rho rho^j d(psi)/d(rho^j) at fixed eps [Pa].
double liquid_pressure(const ConstitutiveModel&, const MixtureState&);

/// pi^l = eps rho d(psi)/d(eps) at fixed densities [Pa]; positive for a
/// swelling mixture.
double swelling_pressure(const ConstitutiveModel&, const MixtureState&);

PressureDecomposition pressure_decomposition(const ConstitutiveModel&, const MixtureState&);

/// mu^j = d(rho psi)/d(rho^j) [J/kg].
double chemical_potential(const ConstitutiveModel&, const MixtureState&, std::size_t species);

/// mu~^j = mu^j + z^j phi [J/kg].
double electrochemical_potential(const ConstitutiveModel&, const MixtureState&,
                                 std::size_t species);

/// Gibbs potential of the phase, G = psi + p/rho [J/kg].  This sign places
/// G equal to the concentration-weighted sum of the chemical potentials;
/// some texts print the p/rho term with the opposite sign, which would break
/// that equality.
double gibbs_potential(const ConstitutiveModel&, const MixtureState&);

/// Reference point for the incompressible chemical potential: the potential
/// of pure species at (T, p0).
struct PotentialReference {
  double reference_pressure = kStandardPressure;  // p0 [Pa]
  double reference_potential = 0.0;               // mu0(T, p0) [J/kg]
};

/// mu = mu0 + (p - p0)/rho0 + (R T / m) ln a for an incompressible species
/// [J/kg].  Throws DomainError for activity <= 0.
double incompressible_chemical_potential(const SpeciesSpec&, double temperature, double pressure,
                                         double activity, const PotentialReference& ref);

/// Osmotic pressure from solvent-potential equality across a semipermeable
/// membrane, constant solvent density: pi = -(R T rho0 / m) ln a [Pa].
double osmotic_pressure_exact(const SpeciesSpec& solvent, double temperature,
                              double solvent_activity);

/// Dilute limit pi ~= R T C with C the solute molar concentration [mol/m^3].
double vant_hoff(double temperature, double molar_concentration);

/// Exponential swelling law pi = p0 e^{lambda_s/lambda_l} - p0 [Pa], with
/// lambda_s the platelet thickness and lambda_l the interlayer liquid
/// thickness.
double low_swelling_pressure(double p0, double lambda_s, double lambda_l);

// ---------------------------------------------------------------------------
// Bulk (reservoir) equilibrium map

struct NewtonOptions {
  double tolerance_scale = 1e-10;  // absolute residual tol = scale * R T / m_solvent
  int max_iterations = 50;
  int max_backtracks = 20;
  /// Reservoir convention.  false: the bulk is an ideal solution whose mole
  /// fractions close the system (Donnan-style).  true: the reservoir is pure
  /// solvent (reverse-osmosis cell); the solvent fixes p^B and each solute
  /// activity is solved independently, so a required activity above 1 can
  /// occur and is flagged.
  bool pure_solvent = false;
};

/// Hypothetical reservoir in electrochemical equilibrium with a vicinal
/// state: bulk pressure and per-species activities (mole fractions of an
/// ideal incompressible bulk solution).  When any species is charged the
/// bulk side carries a potential offset (Donnan potential) so that a
/// charge-neutral bulk composition can match all electrochemical potentials.
struct BulkState {
  double pressure = 0.0;             // p^B [Pa]
  std::vector<double> activities;    // a^{B_j}
  double donnan_potential = 0.0;     // [V]
  bool feasible = true;              // false if any activity > 1 was required
  int iterations = 0;
  double residual_norm = 0.0;        // [J/kg]
};

/// Solves mu~^{l_j}(vicinal) = mu^{B_j}(p^B, a^j) + z^j phi^B for all j by a
/// damped Newton iteration.  `ref` may be omitted for models that expose
/// their own bulk reference.  Infeasible activities (> 1) are flagged, not
/// clamped.
BulkState bulk_equilibrium_map(const ConstitutiveModel&, const MixtureState&,
                               const BulkReference* ref = nullptr, NewtonOptions opts = {});

}  // namespace swellflow::thermo

#endif
