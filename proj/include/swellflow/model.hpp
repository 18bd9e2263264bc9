#ifndef SWELLFLOW_MODEL_HPP
#define SWELLFLOW_MODEL_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swellflow/species.hpp"
#include "swellflow/state.hpp"

namespace swellflow {

/// Reference data describing each species as an incompressible liquid with
/// mu^j(T, p, a) = mu0^j + (p - p0)/rho0^j + (R T / m^j) ln a.  Models of the
/// incompressible family expose this so bulk (reservoir) states can be
/// expressed in the same normalization as the model itself.
struct BulkReference {
  double reference_pressure = 101325.0;        // p0 [Pa]
  std::vector<double> reference_potentials;    // mu0^j at (T, p0), pure j [J/kg]
};

/// A Helmholtz free-energy model of the liquid phase, psi in J/kg, as a
/// function of (T, rho^j, eps) or equivalently (T, rho, C^j, eps).
///
/// Partial-derivative accessors return nullopt when no analytic form is
/// available; evaluation helpers below then fall back to the other
/// parameterization via exact chain rules, or to central differences.
/// Instances are immutable after construction and safe to share across
/// threads.
class ConstitutiveModel {
 public:
  virtual ~ConstitutiveModel() = default;

  virtual std::string name() const = 0;
  virtual std::size_t species_count() const = 0;
  virtual const std::vector<SpeciesSpec>& species() const = 0;

  /// Intensive Helmholtz potential [J/kg].
  virtual double psi(const MixtureState& s) const = 0;

  // direct parameterization: partials at fixed T, other rho^k, eps
  virtual std::optional<double> psi_rho_partial(const MixtureState&, std::size_t) const {
    return std::nullopt;
  }
  /// d psi / d eps at fixed densities.
  virtual std::optional<double> psi_eps_partial(const MixtureState&) const {
    return std::nullopt;
  }

  // tilde parameterization: partials at fixed T, concentrations (resp. rho), eps
  virtual std::optional<double> psi_tilde_rho_partial(const MixtureState&) const {
    return std::nullopt;
  }
  /// d psi~ / d C^k for an independent concentration k < N-1 (solvent absorbs).
  virtual std::optional<double> psi_tilde_conc_partial(const MixtureState&, std::size_t) const {
    return std::nullopt;
  }

  /// Present when the model treats every species as an incompressible liquid
  /// around a reference pressure (needed by the bulk equilibrium map and the
  /// d mu / d p identity).
  virtual std::optional<BulkReference> bulk_reference() const { return std::nullopt; }
};

// Evaluation helpers: analytic partial if the model has one, else the exact
// chain rule from the other parameterization, else central differences.
double eval_psi_rho_partial(const ConstitutiveModel& m, const MixtureState& s, std::size_t j);
double eval_psi_eps_partial(const ConstitutiveModel& m, const MixtureState& s);
double eval_psi_tilde_rho_partial(const ConstitutiveModel& m, const MixtureState& s);
double eval_psi_tilde_conc_partial(const ConstitutiveModel& m, const MixtureState& s, std::size_t k);

}  // namespace swellflow

#endif
