#ifndef SWELLFLOW_STATE_HPP
#define SWELLFLOW_STATE_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "swellflow/errors.hpp"

namespace swellflow {

/// One thermodynamic state point of the liquid phase.
///
/// Partial densities are masses of each species per volume of the liquid
/// phase.  Concentrations C^j = rho^j / rho are derived, never stored, so
/// sum_j C^j = 1 holds by construction.  The last species index is the
/// solvent by convention.
struct MixtureState {
  double temperature = 298.15;        // [K]
  double volume_fraction = 0.5;       // liquid volume fraction, (0, 1]
  std::vector<double> partial_densities;  // [kg/m^3 of liquid phase]
  double electric_potential = 0.0;    // [V]

  std::size_t species_count() const { return partial_densities.size(); }

  /// Total liquid density rho = sum_j rho^j [kg/m^3].
  double total_density() const {
    return std::accumulate(partial_densities.begin(), partial_densities.end(), 0.0);
  }

  /// Mass concentration C^j = rho^j / rho [-].
  double concentration(std::size_t j) const {
    return partial_densities[j] / total_density();
  }

  std::vector<double> concentrations() const {
    std::vector<double> c(partial_densities.size());
    const double rho = total_density();
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = partial_densities[j] / rho;
    return c;
  }

  void validate() const {
    if (!(temperature > 0.0)) throw DomainError("state: temperature must be > 0");
    if (!(volume_fraction > 0.0) || volume_fraction > 1.0) {
      throw DomainError("state: volume_fraction must be in (0, 1]");
    }
    if (partial_densities.empty()) throw DomainError("state: no species");
    bool any_positive = false;
    for (std::size_t j = 0; j < partial_densities.size(); ++j) {
      const double r = partial_densities[j];
      if (!(r >= 0.0) || !std::isfinite(r)) {
        throw DomainError("state: partial density of species " + std::to_string(j) +
                          " must be finite and >= 0");
      }
      any_positive = any_positive || r > 0.0;
    }
    if (!any_positive) throw DomainError("state: all partial densities are zero");
  }

  bool admissible() const {
    try {
      validate();
      return true;
    } catch (const DomainError&) {
      return false;
    }
  }
};

// ---------------------------------------------------------------------------
// Coordinate moves. The Helmholtz potential is used in two parameterizations,
// psi(T, rho^j, eps) and psi~(T, rho, C^j, eps); finite differencing in either
// family means co-varying the stored partial densities in a specific way.

/// rho^j -> rho^j + h, all other densities and eps fixed.
inline MixtureState perturb_partial_density(const MixtureState& s, std::size_t j, double h) {
  MixtureState out = s;
  out.partial_densities[j] += h;
  return out;
}

/// rho -> rho + h at fixed concentrations: scale every density by (rho+h)/rho.
inline MixtureState perturb_total_density_fixed_conc(const MixtureState& s, double h) {
  MixtureState out = s;
  const double rho = s.total_density();
  const double f = (rho + h) / rho;
  for (double& r : out.partial_densities) r *= f;
  return out;
}

/// C^k -> C^k + h (k < N-1) at fixed total density and fixed other
/// independent concentrations; the solvent concentration C^N absorbs -h.
inline MixtureState perturb_concentration_fixed_rho(const MixtureState& s, std::size_t k, double h) {
  MixtureState out = s;
  const double rho = s.total_density();
  out.partial_densities[k] += h * rho;
  out.partial_densities.back() -= h * rho;
  return out;
}

/// eps -> eps + h at fixed densities.
inline MixtureState perturb_volume_fraction(const MixtureState& s, double h) {
  MixtureState out = s;
  out.volume_fraction += h;
  return out;
}

/// eps -> eps + h holding eps * rho^j (mass per bulk volume) fixed.
inline MixtureState perturb_volume_fraction_fixed_mass(const MixtureState& s, double h) {
  MixtureState out = s;
  out.volume_fraction += h;
  const double f = s.volume_fraction / out.volume_fraction;
  for (double& r : out.partial_densities) r *= f;
  return out;
}

}  // namespace swellflow

#endif
