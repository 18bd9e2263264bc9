#include "swellflow/thermo.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

#include "swellflow/errors.hpp"

namespace swellflow::thermo {

double liquid_pressure(const ConstitutiveModel& m, const MixtureState& s) {
  s.validate();
  const double rho = s.total_density();
  double p = 0.0;
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    const double rj = s.partial_densities[j];
    if (rj == 0.0) continue;  // zero-weight term; rho^j psi_rho^j -> 0
    const double d = eval_psi_rho_partial(m, s, j);
    if (!std::isfinite(d)) {
      throw EvaluationError("liquid_pressure: non-finite partial for species " +
                            std::to_string(j) + " ('" + m.species()[j].name + "')");
    }
    p += rho * rj * d;
  }
  return p;
}

double swelling_pressure(const ConstitutiveModel& m, const MixtureState& s) {
  s.validate();
  const double d = eval_psi_eps_partial(m, s);
  if (!std::isfinite(d)) {
    throw EvaluationError("swelling_pressure: non-finite volume-fraction partial");
  }
  return s.volume_fraction * s.total_density() * d;
}

PressureDecomposition pressure_decomposition(const ConstitutiveModel& m, const MixtureState& s) {
  // classical part: -eps rho d(psi)/d(eps) holding eps rho^j fixed, expanded
  // by the chain rule along the fixed-mass path rho^j(eps) = rho^j_0 eps_0/eps.
  s.validate();
  const double rho = s.total_density();
  const double eps = s.volume_fraction;
  double mass_term = 0.0;
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    const double rj = s.partial_densities[j];
    if (rj == 0.0) continue;
    mass_term += rj * eval_psi_rho_partial(m, s, j);
  }
  PressureDecomposition out;
  out.swelling_pressure = eps * rho * eval_psi_eps_partial(m, s);
  out.classical_pressure = -eps * rho * (eval_psi_eps_partial(m, s) - mass_term / eps);
  out.total = out.classical_pressure + out.swelling_pressure;
  return out;
}

double chemical_potential(const ConstitutiveModel& m, const MixtureState& s, std::size_t j) {
  s.validate();
  if (j >= m.species_count()) {
    throw PreconditionError("chemical_potential: species index out of range");
  }
  const double d = eval_psi_rho_partial(m, s, j);
  const double mu = m.psi(s) + s.total_density() * d;
  if (!std::isfinite(mu)) {
    throw DomainError("chemical_potential: undefined for species " + std::to_string(j) +
                      " ('" + m.species()[j].name + "') at this state");
  }
  return mu;
}

double electrochemical_potential(const ConstitutiveModel& m, const MixtureState& s,
                                 std::size_t j) {
  return chemical_potential(m, s, j) + m.species()[j].charge * s.electric_potential;
}

double gibbs_potential(const ConstitutiveModel& m, const MixtureState& s) {
  return m.psi(s) + liquid_pressure(m, s) / s.total_density();
}

double incompressible_chemical_potential(const SpeciesSpec& sp, double temperature,
                                         double pressure, double activity,
                                         const PotentialReference& ref) {
  sp.validate();
  if (!(activity > 0.0)) {
    throw DomainError("incompressible_chemical_potential: activity must be > 0 (species '" +
                      sp.name + "')");
  }
  if (!std::isfinite(pressure)) {
    throw DomainError("incompressible_chemical_potential: pressure must be finite");
  }
  return ref.reference_potential + (pressure - ref.reference_pressure) / sp.specific_density +
         kGasConstant * temperature / sp.molar_mass * std::log(activity);
}

double osmotic_pressure_exact(const SpeciesSpec& solvent, double temperature,
                              double solvent_activity) {
  solvent.validate();
  if (!(solvent_activity > 0.0)) {
    throw DomainError("osmotic_pressure_exact: activity must be > 0");
  }
  return -kGasConstant * temperature * solvent.specific_density / solvent.molar_mass *
         std::log(solvent_activity);
}

double vant_hoff(double temperature, double molar_concentration) {
  return kGasConstant * temperature * molar_concentration;
}

double low_swelling_pressure(double p0, double lambda_s, double lambda_l) {
  if (!(p0 > 0.0)) throw DomainError("low_swelling_pressure: p0 must be > 0");
  if (lambda_s < 0.0) throw DomainError("low_swelling_pressure: lambda_s must be >= 0");
  if (!(lambda_l > 0.0)) throw DomainError("low_swelling_pressure: lambda_l must be > 0");
  return p0 * std::expm1(lambda_s / lambda_l);
}

// ---------------------------------------------------------------------------

BulkState bulk_equilibrium_map(const ConstitutiveModel& m, const MixtureState& s,
                               const BulkReference* ref_in, NewtonOptions opts) {
  s.validate();
  const std::size_t n = m.species_count();
  BulkReference owned;
  if (ref_in == nullptr) {
    auto r = m.bulk_reference();
    if (!r) {
      throw PreconditionError(
          "bulk_equilibrium_map: model '" + m.name() +
          "' has no bulk reference; pass one describing the reservoir species");
    }
    owned = *r;
  } else {
    owned = *ref_in;
  }
  if (owned.reference_potentials.size() != n) {
    throw PreconditionError("bulk_equilibrium_map: reference potential count mismatch");
  }

  const auto& species = m.species();
  const double RT = kGasConstant * s.temperature;
  bool charged = false;
  for (const auto& sp : species) charged = charged || sp.charge != 0.0;

  // targets: electrochemical potentials of the vicinal state
  std::vector<double> target(n);
  for (std::size_t j = 0; j < n; ++j) target[j] = electrochemical_potential(m, s, j);

  if (opts.pure_solvent) {
    // reverse-osmosis convention: the reservoir is pure solvent; its
    // potential fixes p^B, each solute activity follows per species
    if (charged) {
      throw PreconditionError(
          "bulk_equilibrium_map: pure-solvent reservoir assumes neutral species");
    }
    BulkState out;
    const std::size_t ns = n - 1;  // solvent index
    out.pressure = owned.reference_pressure +
                   species[ns].specific_density * (target[ns] - owned.reference_potentials[ns]);
    out.activities.assign(n, 1.0);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double lna = (target[j] - owned.reference_potentials[j] -
                          (out.pressure - owned.reference_pressure) / species[j].specific_density) *
                         species[j].molar_mass / RT;
      out.activities[j] = std::exp(lna);
      if (out.activities[j] > 1.0 + 1e-12) out.feasible = false;
    }
    return out;
  }

  // unknowns: p^B, x_1..x_N, and (when charged) the bulk potential offset
  const std::size_t nu = n + 1 + (charged ? 1 : 0);
  Eigen::VectorXd u(nu);
  u[0] = owned.reference_pressure;
  for (std::size_t j = 0; j < n; ++j) u[1 + j] = std::max(s.concentration(j), 1e-12);
  if (charged) u[nu - 1] = 0.0;

  // residual scaling puts the composition rows in potential units
  const double mu_scale = RT / species.back().molar_mass;
  const double tol = opts.tolerance_scale * mu_scale;
  double charge_scale = 0.0;
  for (const auto& sp : species) charge_scale += std::abs(sp.charge) * sp.molar_mass;
  if (charge_scale == 0.0) charge_scale = 1.0;

  auto residual = [&](const Eigen::VectorXd& v, Eigen::VectorXd& F) {
    F.resize(nu);
    const double pB = v[0];
    for (std::size_t j = 0; j < n; ++j) {
      const double xj = v[1 + j];
      double mu = owned.reference_potentials[j] +
                  (pB - owned.reference_pressure) / species[j].specific_density +
                  RT / species[j].molar_mass * std::log(xj);
      if (charged) mu += species[j].charge * v[nu - 1];
      F[j] = mu - target[j];
    }
    double sum_x = 0.0;
    for (std::size_t j = 0; j < n; ++j) sum_x += v[1 + j];
    F[n] = (sum_x - 1.0) * mu_scale;
    if (charged) {
      double q = 0.0;  // neutrality in mole-fraction charge units
      for (std::size_t j = 0; j < n; ++j) {
        q += species[j].charge * species[j].molar_mass * v[1 + j];
      }
      F[nu - 1] = q / charge_scale * mu_scale;
    }
  };

  auto jacobian = [&](const Eigen::VectorXd& v, Eigen::MatrixXd& J) {
    J.setZero(nu, nu);
    for (std::size_t j = 0; j < n; ++j) {
      J(j, 0) = 1.0 / species[j].specific_density;
      J(j, 1 + j) = RT / (species[j].molar_mass * v[1 + j]);
      if (charged) J(j, nu - 1) = species[j].charge;
      J(n, 1 + j) = mu_scale;
      if (charged) {
        J(nu - 1, 1 + j) = species[j].charge * species[j].molar_mass / charge_scale * mu_scale;
      }
    }
  };

  Eigen::VectorXd F(nu), Fnew(nu);
  Eigen::MatrixXd J(nu, nu);
  residual(u, F);
  std::ostringstream history;
  BulkState out;
  auto package = [&](int it, double norm) {
    out.iterations = it;
    out.residual_norm = norm;
    out.pressure = u[0];
    out.activities.assign(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      out.activities[j] = u[1 + j];
      if (u[1 + j] > 1.0 + 1e-12) out.feasible = false;
    }
    out.donnan_potential = charged ? u[nu - 1] : 0.0;
    return out;
  };
  for (int it = 0; it < opts.max_iterations; ++it) {
    const double norm = F.lpNorm<Eigen::Infinity>();
    history << "it " << it << " |F|_inf " << norm << "\n";
    if (norm < tol) return package(it, norm);
    jacobian(u, J);
    Eigen::VectorXd step = J.partialPivLu().solve(-F);
    // keep activities strictly positive
    double lambda = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (step[1 + j] < 0.0) {
        lambda = std::min(lambda, -0.9 * u[1 + j] / step[1 + j]);
      }
    }
    bool improved = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      Eigen::VectorXd trial = u + lambda * step;
      residual(trial, Fnew);
      if (Fnew.lpNorm<Eigen::Infinity>() < norm) {
        u = trial;
        F = Fnew;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) {
      // at the floating-point floor; accept if within the contract tolerance
      if (norm <= 1e-10 * mu_scale) return package(it, norm);
      throw SolverError("bulk_equilibrium_map: line search stalled", history.str());
    }
  }
  throw SolverError("bulk_equilibrium_map: no convergence after " +
                        std::to_string(opts.max_iterations) + " iterations",
                    history.str());
}

}  // namespace swellflow::thermo
