#include "swellflow/presets.hpp"

#include <gsl/gsl_sf_expint.h>

#include <cmath>

#include "swellflow/errors.hpp"

namespace swellflow {

namespace {

// P1 coefficient schedule; arbitrary but fixed, chosen so psi~ is smooth,
// fully coupled, and the pressure rho^2 d(psi~)/d(rho) is strictly monotone
// increasing in rho on the sampled box.
constexpr double kEnergyScale = 1000.0;  // [J/kg]
constexpr double kRhoScale = 1000.0;     // [kg/m^3]
constexpr double kTempScale = 300.0;     // [K]
constexpr double kAr = 1.0;
constexpr double kAe = 0.5;
constexpr double kGe = 0.3;
inline double b_coeff(std::size_t k) { return 0.40 + 0.07 * static_cast<double>(k); }
inline double d_coeff(std::size_t k) { return 0.20 + 0.05 * static_cast<double>(k); }
inline double h_coeff(std::size_t k) { return 0.10 + 0.03 * static_cast<double>(k); }

}  // namespace

SyntheticPolynomialModel::SyntheticPolynomialModel(std::vector<SpeciesSpec> species)
    : species_(std::move(species)) {
  if (species_.empty()) throw PreconditionError("P1: needs at least one species");
  for (const auto& sp : species_) sp.validate();
}

double SyntheticPolynomialModel::psi(const MixtureState& s) const {
  const double r = s.total_density() / kRhoScale;
  const double th = s.temperature / kTempScale;
  const double e = s.volume_fraction;
  double acc = kAr * r * r * (1.0 + 0.1 * th) + kAe * e * e * (1.0 + 0.25 * r) + kGe * e * r;
  for (std::size_t k = 0; k + 1 < species_.size(); ++k) {
    const double ck = s.concentration(k);
    acc += b_coeff(k) * r * ck + d_coeff(k) * ck * ck * th + h_coeff(k) * ck * e;
  }
  return kEnergyScale * acc;
}

std::optional<double> SyntheticPolynomialModel::psi_tilde_rho_partial(const MixtureState& s) const {
  const double r = s.total_density() / kRhoScale;
  const double th = s.temperature / kTempScale;
  const double e = s.volume_fraction;
  double acc = 2.0 * kAr * r * (1.0 + 0.1 * th) + 0.25 * kAe * e * e + kGe * e;
  for (std::size_t k = 0; k + 1 < species_.size(); ++k) acc += b_coeff(k) * s.concentration(k);
  return kEnergyScale / kRhoScale * acc;
}

std::optional<double> SyntheticPolynomialModel::psi_tilde_conc_partial(const MixtureState& s,
                                                                       std::size_t k) const {
  const double r = s.total_density() / kRhoScale;
  const double th = s.temperature / kTempScale;
  return kEnergyScale * (b_coeff(k) * r + 2.0 * d_coeff(k) * s.concentration(k) * th +
                         h_coeff(k) * s.volume_fraction);
}

std::optional<double> SyntheticPolynomialModel::psi_eps_partial(const MixtureState& s) const {
  const double r = s.total_density() / kRhoScale;
  const double e = s.volume_fraction;
  double acc = 2.0 * kAe * e * (1.0 + 0.25 * r) + kGe * r;
  for (std::size_t k = 0; k + 1 < species_.size(); ++k) acc += h_coeff(k) * s.concentration(k);
  return kEnergyScale * acc;
}

// ---------------------------------------------------------------------------

IdealIncompressibleSolutionModel::IdealIncompressibleSolutionModel(
    std::vector<SpeciesSpec> species, IncompressibleParams params)
    : species_(std::move(species)), params_(std::move(params)) {
  if (species_.empty()) throw PreconditionError("P2: needs at least one species");
  for (const auto& sp : species_) sp.validate();
  if (params_.reference_potentials.empty()) {
    params_.reference_potentials.assign(species_.size(), 0.0);
  }
  if (params_.reference_potentials.size() != species_.size()) {
    throw PreconditionError("P2: reference_potentials size must match species count");
  }
  if (!(params_.bulk_modulus > 0.0)) throw PreconditionError("P2: bulk_modulus must be > 0");
}

double IdealIncompressibleSolutionModel::specific_volume(const MixtureState& s) const {
  double v = 0.0;
  const double rho = s.total_density();
  for (std::size_t j = 0; j < species_.size(); ++j) {
    v += s.partial_densities[j] / rho / species_[j].specific_density;
  }
  return v;
}

double IdealIncompressibleSolutionModel::compression_ratio(const MixtureState& s) const {
  return s.total_density() * specific_volume(s);
}

double IdealIncompressibleSolutionModel::pressure_of_ratio(double s) const {
  return params_.reference_pressure + params_.bulk_modulus * (s - 1.0);
}

double IdealIncompressibleSolutionModel::elastic_psi_of_ratio(double s) const {
  // Phi(s) = int_1^s P(u)/u^2 du for P(u) = p0 + K (u - 1)
  const double p0 = params_.reference_pressure;
  const double K = params_.bulk_modulus;
  return (p0 - K) * (1.0 - 1.0 / s) + K * std::log(s);
}

double IdealIncompressibleSolutionModel::elastic_mu_of_ratio(double s) const {
  // Phi(s) + P(s)/s collapses to p0 + K ln s
  return params_.reference_pressure + params_.bulk_modulus * std::log(s);
}

double IdealIncompressibleSolutionModel::mole_fraction(const MixtureState& s,
                                                       std::size_t j) const {
  double total = 0.0;
  for (std::size_t k = 0; k < species_.size(); ++k) {
    total += s.partial_densities[k] / species_[k].molar_mass;
  }
  return s.partial_densities[j] / species_[j].molar_mass / total;
}

double IdealIncompressibleSolutionModel::psi(const MixtureState& s) const {
  const double RT = kGasConstant * s.temperature;
  double acc = 0.0;
  for (std::size_t j = 0; j < species_.size(); ++j) {
    const double cj = s.concentration(j);
    if (cj <= 0.0) continue;  // c ln x -> 0 limit
    acc += cj * params_.reference_potentials[j] +
           RT * cj / species_[j].molar_mass * std::log(mole_fraction(s, j));
  }
  const double v0 = specific_volume(s);
  return acc + v0 * elastic_psi_of_ratio(s.total_density() * v0);
}

double IdealIncompressibleSolutionModel::chemical_potential_closed(const MixtureState& s,
                                                                   std::size_t j) const {
  const double xj = mole_fraction(s, j);
  if (!(xj > 0.0)) {
    throw DomainError(name() + ": chemical potential of species " + std::to_string(j) +
                      " ('" + species_[j].name + "') undefined at zero mole fraction");
  }
  const double ratio = compression_ratio(s);
  const double RT = kGasConstant * s.temperature;
  return params_.reference_potentials[j] + RT / species_[j].molar_mass * std::log(xj) +
         elastic_mu_of_ratio(ratio) / species_[j].specific_density;
}

std::optional<double> IdealIncompressibleSolutionModel::psi_rho_partial(const MixtureState& s,
                                                                        std::size_t j) const {
  // mu^j = psi + rho psi_rho^j
  return (chemical_potential_closed(s, j) - psi(s)) / s.total_density();
}

std::optional<double> IdealIncompressibleSolutionModel::psi_eps_partial(const MixtureState&) const {
  return 0.0;
}

std::optional<double> IdealIncompressibleSolutionModel::psi_tilde_rho_partial(
    const MixtureState& s) const {
  const double v0 = specific_volume(s);
  const double ratio = s.total_density() * v0;
  return v0 * v0 * pressure_of_ratio(ratio) / (ratio * ratio);
}

std::optional<double> IdealIncompressibleSolutionModel::psi_tilde_conc_partial(
    const MixtureState& s, std::size_t k) const {
  const std::size_t n = species_.size();
  const double xk = mole_fraction(s, k);
  const double xn = mole_fraction(s, n - 1);
  if (!(xk > 0.0) || !(xn > 0.0)) {
    throw DomainError(name() + ": concentration partial undefined at zero mole fraction");
  }
  const double RT = kGasConstant * s.temperature;
  const double ratio = compression_ratio(s);
  const double wk = 1.0 / species_[k].specific_density - 1.0 / species_[n - 1].specific_density;
  return (params_.reference_potentials[k] - params_.reference_potentials[n - 1]) +
         RT * (std::log(xk) / species_[k].molar_mass - std::log(xn) / species_[n - 1].molar_mass) +
         wk * elastic_mu_of_ratio(ratio);
}

std::optional<BulkReference> IdealIncompressibleSolutionModel::bulk_reference() const {
  // The pure-species potential at p0 includes the p0 v0^j flow work term:
  // mu(pure j, s=1) = mu0^j + p0 / rho0^j.
  BulkReference ref;
  ref.reference_pressure = params_.reference_pressure;
  ref.reference_potentials.resize(species_.size());
  for (std::size_t j = 0; j < species_.size(); ++j) {
    ref.reference_potentials[j] =
        params_.reference_potentials[j] + params_.reference_pressure / species_[j].specific_density;
  }
  return ref;
}

// ---------------------------------------------------------------------------

ExponentialSwellingModel::ExponentialSwellingModel(std::vector<SpeciesSpec> species,
                                                   IncompressibleParams params,
                                                   SwellingParams swelling)
    : IdealIncompressibleSolutionModel(std::move(species), std::move(params)),
      swelling_(swelling) {
  rho_cal_ = swelling_.calibration_density > 0.0 ? swelling_.calibration_density
                                                 : species_.back().specific_density;
  if (!(swelling_.reference_pressure > 0.0)) {
    throw PreconditionError("P3: swelling reference pressure must be > 0");
  }
}

double ExponentialSwellingModel::adsorption_energy(double eps) const {
  // A(eps) = (p_sw / rho_cal) [ (Ei(1) - Ei(1/eps))/e - ln eps ], A(1) = 0.
  // Antiderivative of A'(eps) below; Ei is the exponential integral.
  if (!(eps > 0.0)) throw DomainError("P3: volume fraction must be > 0");
  const double scale = swelling_.reference_pressure / rho_cal_;
  return scale * ((gsl_sf_expint_Ei(1.0) - gsl_sf_expint_Ei(1.0 / eps)) / std::exp(1.0) -
                  std::log(eps));
}

double ExponentialSwellingModel::adsorption_energy_slope(double eps) const {
  if (!(eps > 0.0)) throw DomainError("P3: volume fraction must be > 0");
  return swelling_.reference_pressure / rho_cal_ * std::expm1((1.0 - eps) / eps) / eps;
}

double ExponentialSwellingModel::psi(const MixtureState& s) const {
  return IdealIncompressibleSolutionModel::psi(s) + adsorption_energy(s.volume_fraction);
}

double ExponentialSwellingModel::chemical_potential_closed(const MixtureState& s,
                                                           std::size_t j) const {
  // every mu^j gains the same A(eps); d(rho A)/d(rho^j) = A
  return IdealIncompressibleSolutionModel::chemical_potential_closed(s, j) +
         adsorption_energy(s.volume_fraction);
}

std::optional<double> ExponentialSwellingModel::psi_eps_partial(const MixtureState& s) const {
  return adsorption_energy_slope(s.volume_fraction);
}

// ---------------------------------------------------------------------------

std::unique_ptr<ConstitutiveModel> make_preset(const std::string& preset,
                                               std::vector<SpeciesSpec> species,
                                               IncompressibleParams params,
                                               SwellingParams swelling) {
  if (preset == "P1") return std::make_unique<SyntheticPolynomialModel>(std::move(species));
  if (preset == "P2") {
    return std::make_unique<IdealIncompressibleSolutionModel>(std::move(species),
                                                              std::move(params));
  }
  if (preset == "P3") {
    return std::make_unique<ExponentialSwellingModel>(std::move(species), std::move(params),
                                                      swelling);
  }
  throw ConfigError("unknown model preset '" + preset + "' (expected P1, P2 or P3)");
}

}  // namespace swellflow
