#ifndef SWELLFLOW_IDENTITIES_HPP
#define SWELLFLOW_IDENTITIES_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swellflow/finite_difference.hpp"
#include "swellflow/model.hpp"

namespace swellflow::identities {

/// The certified relations: mixed partials of the Gibbs function, the two
/// pressure forms, the chemical potential in Helmholtz and Gibbs variables,
/// the concentration-difference relation, dg/dp, the weighted sum, and the
/// incompressible d(mu)/d(p) law.
enum class IdentityId {
  A4_mixed_partials,
  A10_pressure_two_forms,
  A20_mu_helmholtz,
  A34_mu_difference,
  A40_mu_gibbs,
  A46_dg_dp,
  A50_weighted_sum,
  A62_A64_dmu_dp_incompressible,
};

constexpr std::size_t kIdentityCount = 8;
std::span<const IdentityId> all_identities();
std::string identity_name(IdentityId);
IdentityId parse_identity(const std::string&);

/// Registered tolerance: algebraic identities at 1e-10, FD-backed at 1e-6.
double registered_tolerance(IdentityId);

/// False when the identity's assumptions do not cover the model (the
/// incompressible d(mu)/d(p) law needs an incompressible-family preset).
bool identity_applicable(IdentityId, const ConstitutiveModel&);

struct IdentityReport {
  IdentityId id;
  std::size_t states_tested = 0;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Evaluates both sides of the identity at every state: the left side along
/// the analytic evaluation path, the right side via an independent
/// finite-difference oracle.  Throws PreconditionError when inapplicable.
IdentityReport verify_identity(IdentityId, const ConstitutiveModel&,
                               std::span<const MixtureState> states,
                               std::optional<double> tolerance_override = std::nullopt);

// ---------------------------------------------------------------------------
// Finite-difference oracle over state coordinates

/// Which coordinate to vary, and what is held fixed while doing so.
enum class StateVariable {
  PartialDensity,                 // rho^j, other densities and eps fixed
  TotalDensityFixedConcentration, // rho, concentrations and eps fixed
  ConcentrationFixedDensity,      // C^k (k < N-1), rho and other C fixed
  VolumeFraction,                 // eps, densities fixed
  VolumeFractionFixedMass,        // eps, eps*rho^j fixed
};

struct FdPartialResult {
  double value = 0.0;
  double truncation_estimate = 0.0;
};

/// Central difference with one Richardson level; shrinks the step (up to 8
/// times) when a perturbed state leaves the admissible set, then errors.
FdPartialResult fd_partial(const std::function<double(const MixtureState&)>& f, StateVariable sel,
                           std::size_t index, const MixtureState& state, FdOptions opts = {});

// ---------------------------------------------------------------------------
// Reproducible state sampling

struct SampleOptions {
  double density_min = 1.0;     // [kg/m^3], log-uniform per species
  double density_max = 2000.0;
  double temperature_min = 273.0;  // [K]
  double temperature_max = 373.0;
  double eps_min = 0.05;
  double eps_max = 0.95;
};

std::vector<MixtureState> sample_states(const ConstitutiveModel&, std::size_t count,
                                        std::uint64_t seed, const SampleOptions& = {});

/// Scales the densities so sum_j rho^j / rho0^j = 1 (the volume-filling
/// manifold of an incompressible mixture); composition is preserved.
MixtureState project_to_volume_manifold(const ConstitutiveModel&, const MixtureState&);

}  // namespace swellflow::identities

#endif
