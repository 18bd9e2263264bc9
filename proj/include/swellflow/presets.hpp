#ifndef SWELLFLOW_PRESETS_HPP
#define SWELLFLOW_PRESETS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "swellflow/constants.hpp"
#include "swellflow/model.hpp"

namespace swellflow {

/// Parameters of the incompressible-liquid family (presets P2 and P3).
/// A large bulk modulus penalizes deviation of the mixture density from the
/// volume-filling value rho_hat(C) = 1 / sum_j C^j / rho0^j; the chemical
/// potentials reduce to the textbook incompressible forms on that manifold.
struct IncompressibleParams {
  double reference_pressure = kStandardPressure;  // p0 [Pa]
  double bulk_modulus = 2.2e9;                    // K [Pa]
  std::vector<double> reference_potentials;       // mu0^j at (T, p0) [J/kg]; empty -> zeros
};

/// Parameters of the moisture-dependent free-energy term of preset P3,
/// calibrated so the swelling pressure follows p0 (e^{lambda_s/lambda_l} - 1)
/// under the parallel-platelet map eps = lambda_l / (lambda_l + lambda_s).
struct SwellingParams {
  double reference_pressure = kStandardPressure;  // p0 of the swelling law [Pa]
  double calibration_density = 0.0;  // [kg/m^3]; 0 -> solvent specific density
};

/// Preset P1: smooth synthetic polynomial in (T, rho, C^k, eps) with full
/// coupling.  Ships analytic tilde-parameterization partials only, so the
/// direct-family accessors exercise the chain-rule path.
class SyntheticPolynomialModel : public ConstitutiveModel {
 public:
  explicit SyntheticPolynomialModel(std::vector<SpeciesSpec> species);

  std::string name() const override { return "P1"; }
  std::size_t species_count() const override { return species_.size(); }
  const std::vector<SpeciesSpec>& species() const override { return species_; }

  double psi(const MixtureState&) const override;
  std::optional<double> psi_tilde_rho_partial(const MixtureState&) const override;
  std::optional<double> psi_tilde_conc_partial(const MixtureState&, std::size_t) const override;
  std::optional<double> psi_eps_partial(const MixtureState&) const override;

 private:
  std::vector<SpeciesSpec> species_;
};

/// Preset P2: ideal solution of incompressible species.  On the
/// volume-filling manifold the chemical potentials are
///   mu^j = mu0_eff^j + (p - p0)/rho0^j + (R T/m^j) ln x^j,
/// with x^j the mole fraction (ideal activity).
class IdealIncompressibleSolutionModel : public ConstitutiveModel {
 public:
  IdealIncompressibleSolutionModel(std::vector<SpeciesSpec> species,
                                   IncompressibleParams params = {});

  std::string name() const override { return "P2"; }
  std::size_t species_count() const override { return species_.size(); }
  const std::vector<SpeciesSpec>& species() const override { return species_; }

  double psi(const MixtureState&) const override;
  std::optional<double> psi_rho_partial(const MixtureState&, std::size_t) const override;
  std::optional<double> psi_eps_partial(const MixtureState&) const override;
  std::optional<double> psi_tilde_rho_partial(const MixtureState&) const override;
  std::optional<double> psi_tilde_conc_partial(const MixtureState&, std::size_t) const override;
  std::optional<BulkReference> bulk_reference() const override;

  const IncompressibleParams& params() const { return params_; }

  // closed forms shared with P3 and with tests
  double specific_volume(const MixtureState&) const;   // v0(C) [m^3/kg]
  double compression_ratio(const MixtureState&) const;  // s = rho v0(C)
  double pressure_of_ratio(double s) const;             // P(s) [Pa]
  double elastic_psi_of_ratio(double s) const;          // Phi(s) = int_1^s P/u^2 du
  double elastic_mu_of_ratio(double s) const;           // Phi(s) + P(s)/s = p0 + K ln s
  double mole_fraction(const MixtureState&, std::size_t j) const;
  virtual double chemical_potential_closed(const MixtureState&, std::size_t j) const;

 protected:
  std::vector<SpeciesSpec> species_;
  IncompressibleParams params_;
};

/// Preset P3: P2 plus a moisture-dependent adsorption term A(eps)/used so
/// that the swelling pressure reproduces the exponential swelling law.
class ExponentialSwellingModel : public IdealIncompressibleSolutionModel {
 public:
  ExponentialSwellingModel(std::vector<SpeciesSpec> species, IncompressibleParams params = {},
                           SwellingParams swelling = {});

  std::string name() const override { return "P3"; }
  double psi(const MixtureState&) const override;
  std::optional<double> psi_eps_partial(const MixtureState&) const override;
  double chemical_potential_closed(const MixtureState&, std::size_t j) const override;

  /// A(eps) [J/kg]: integral of the calibrated swelling slope, zero at eps=1.
  double adsorption_energy(double eps) const;
  /// A'(eps) [J/kg]: equals p_sw (e^{(1-eps)/eps} - 1) / (eps rho_cal).
  double adsorption_energy_slope(double eps) const;
  const SwellingParams& swelling_params() const { return swelling_; }

 private:
  SwellingParams swelling_;
  double rho_cal_;
};

/// Factory for the CLI: preset in {"P1", "P2", "P3"}.
std::unique_ptr<ConstitutiveModel> make_preset(const std::string& preset,
                                               std::vector<SpeciesSpec> species,
                                               IncompressibleParams params = {},
                                               SwellingParams swelling = {});

}  // namespace swellflow

#endif
