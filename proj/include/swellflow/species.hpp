#ifndef SWELLFLOW_SPECIES_HPP
#define SWELLFLOW_SPECIES_HPP

#include <cmath>
#include <string>
#include <vector>

#include "swellflow/errors.hpp"

namespace swellflow {

/// Per-species constants. The specific (intrinsic) density is the mass of
/// the species per volume of that species alone, treated as constant.
struct SpeciesSpec {
  std::string name;
  double molar_mass = 0.018;     // [kg/mol]
  double specific_density = 997.0;  // [kg of j / m^3 of j]
  double charge = 0.0;           // fixed charge per mass [C/kg]

  void validate() const {
    if (!(molar_mass > 0.0)) {
      throw DomainError("species '" + name + "': molar_mass must be > 0");
    }
    if (!(specific_density > 0.0)) {
      throw DomainError("species '" + name + "': specific_density must be > 0");
    }
    if (!std::isfinite(charge)) {
      throw DomainError("species '" + name + "': charge must be finite");
    }
  }
};

/// Built-in table used by CLI defaults and tests: a neutral aqueous triple
/// (solvent last, by the solvent-is-last convention used throughout).
inline std::vector<SpeciesSpec> default_species_table(std::size_t count = 3) {
  std::vector<SpeciesSpec> all = {
      {"cation", 0.023, 2160.0, 0.0},
      {"anion", 0.0355, 2170.0, 0.0},
      {"water", 0.018, 997.0, 0.0},
  };
  if (count == 0 || count > all.size()) {
    throw DomainError("default_species_table supports 1..3 species");
  }
  // keep water (the solvent) as the last entry
  std::vector<SpeciesSpec> out(all.end() - static_cast<long>(count), all.end());
  return out;
}

}  // namespace swellflow

#endif
