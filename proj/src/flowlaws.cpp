#include "swellflow/flowlaws.hpp"

#include <cmath>

#include "swellflow/errors.hpp"

namespace swellflow::flowlaws {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw PreconditionError(msg);
}

}  // namespace

std::string formulation_name(Formulation f) {
  switch (f) {
    case Formulation::Pressure: return "PressureForm";
    case Formulation::Gibbs: return "GibbsForm";
    case Formulation::Potential: return "PotentialForm";
    case Formulation::Bulk: return "BulkForm";
    case Formulation::SingleComponentBulk: return "SingleComponentBulk";
  }
  return "unknown";
}

double charge_density(const ConstitutiveModel& m, const MixtureState& s) {
  double q = 0.0;
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    q += s.partial_densities[j] * m.species()[j].charge;
  }
  return q;
}

DrivingForce rhs(Formulation f, const ConstitutiveModel& m, const MixtureState& s,
                 const LocalGradients& g, const FlowCoefficients& coeffs) {
  s.validate();
  const std::size_t n = m.species_count();
  const double eps = s.volume_fraction;
  const double rho = s.total_density();
  const double qe = charge_density(m, s);
  const double RT = kGasConstant * s.temperature;
  const std::string fname = formulation_name(f);

  require(g.grad_mu.size() == n || f == Formulation::SingleComponentBulk ||
              f == Formulation::Bulk,
          fname + ": grad_mu must have one entry per species");

  // bulk chemical potential gradients grad mu^{B_j} = grad mu~^{l_j}
  // (potentials continuous, charge-neutral reservoir)
  auto grad_mu_bulk = [&](std::size_t j) -> Vec3 {
    return g.grad_mu[j] - m.species()[j].charge * g.electric_field;
  };

  DrivingForce out;
  switch (f) {
    case Formulation::Pressure: {
      const double pi = thermo::swelling_pressure(m, s);
      out.pressure = -eps * g.grad_p;
      out.swelling = -pi * g.grad_eps;
      out.lorentz = eps * qe * g.electric_field;
      for (std::size_t j = 0; j < n; ++j) {
        out.hydration -= coeffs.hydration(j) * (coeffs.mobility(j) * g.grad_mu[j]);
      }
      break;
    }
    case Formulation::Gibbs: {
      require(g.grad_conc.size() == n, fname + ": grad_conc must have one entry per species");
      out.pressure = -eps * rho * g.grad_gibbs;
      for (std::size_t j = 0; j < n; ++j) {
        if (s.partial_densities[j] > 0.0) {
          out.concentration += eps * rho * rho * eval_psi_rho_partial(m, s, j) * g.grad_conc[j];
        }
      }
      out.lorentz = eps * qe * g.electric_field;
      // the mu gradient here reads as the vicinal one, matching the
      // Fickian substitution of the pressure form
      for (std::size_t j = 0; j < n; ++j) {
        out.hydration -= coeffs.hydration(j) * (coeffs.mobility(j) * g.grad_mu[j]);
      }
      break;
    }
    case Formulation::Potential: {
      for (std::size_t j = 0; j < n; ++j) {
        out.concentration -= eps * rho * s.concentration(j) * g.grad_mu[j];
      }
      out.lorentz = eps * qe * g.electric_field;
      for (std::size_t j = 0; j < n; ++j) {
        out.hydration -= coeffs.hydration(j) * (coeffs.mobility(j) * grad_mu_bulk(j));
      }
      break;
    }
    case Formulation::Bulk: {
      require(g.grad_bulk_pressure.has_value(), fname + ": grad_bulk_pressure missing");
      require(g.grad_activity.has_value() && g.grad_activity->size() == n,
              fname + ": grad_activity missing");
      require(g.bulk_activities.has_value() && g.bulk_activities->size() == n,
              fname + ": bulk_activities missing");
      double filled = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        filled += eps * s.partial_densities[j] / m.species()[j].specific_density;
      }
      require(std::abs(filled - 1.0) < 1e-8,
              fname + ": sum_j eps rho^j / rho0^j = 1 violated (got " + std::to_string(filled) +
                  "); the bulk-variable form assumes it");
      out.pressure = -*g.grad_bulk_pressure;
      for (std::size_t j = 0; j < n; ++j) {
        const double aj = (*g.bulk_activities)[j];
        out.concentration -=
            eps * s.partial_densities[j] * RT / (m.species()[j].molar_mass * aj) *
            (*g.grad_activity)[j];
      }
      // reservoir is charge neutral: q_e^B E term is identically zero
      for (std::size_t j = 0; j < n; ++j) {
        const Vec3 gmb = (1.0 / m.species()[j].specific_density) * *g.grad_bulk_pressure +
                         RT / (m.species()[j].molar_mass * (*g.bulk_activities)[j]) *
                             (*g.grad_activity)[j];
        out.hydration -= coeffs.hydration(j) * (coeffs.mobility(j) * gmb);
      }
      break;
    }
    case Formulation::SingleComponentBulk: {
      require(n == 1, fname + ": needs a single-species liquid");
      require(g.grad_bulk_pressure.has_value(), fname + ": grad_bulk_pressure missing");
      const double rho_bulk = m.species()[0].specific_density;
      out.pressure = -(eps * rho / rho_bulk) * *g.grad_bulk_pressure;
      out.lorentz = eps * qe * g.electric_field;
      break;
    }
  }
  out.total = out.pressure + out.swelling + out.lorentz + out.hydration + out.concentration;
  return out;
}

Vec3 velocity(const FlowCoefficients& coeffs, const DrivingForce& force) {
  Eigen::LLT<Mat3> llt(coeffs.resistivity);
  if (llt.info() != Eigen::Success) {
    throw PreconditionError("velocity: resistivity must be symmetric positive definite");
  }
  return llt.solve(force.total);
}

double threshold_gradient(const ConstitutiveModel& m, const MixtureState& s,
                          const Vec3& grad_eps) {
  return thermo::swelling_pressure(m, s) * grad_eps.norm() / s.volume_fraction;
}

// ---------------------------------------------------------------------------

DrivingForce reduce_moyne_murad(const ConstitutiveModel& m, const MixtureState& s,
                                const LocalGradients& g, const DiluteParams& dp) {
  s.validate();
  require(m.species_count() == 3, "reduce_moyne_murad: needs water, cation, anion");
  require(g.grad_bulk_pressure.has_value() && g.grad_activity.has_value() &&
              g.bulk_activities.has_value(),
          "reduce_moyne_murad: bulk pressure/activity data missing");
  const double RT = kGasConstant * s.temperature;
  const double eps = s.volume_fraction;

  DrivingForce out;
  out.pressure = -*g.grad_bulk_pressure;
  for (std::size_t j : {dp.cation_index, dp.anion_index}) {
    const double aj = (*g.bulk_activities)[j];
    // moles of ion per bulk volume: n^j / V = eps rho^j / m^j
    const double moles = eps * s.partial_densities[j] / m.species()[j].molar_mass;
    out.concentration -= moles * RT / aj * (*g.grad_activity)[j];
  }
  out.total = out.pressure + out.concentration;

  // precondition screening: dilute ions, Raoult solvent
  const double aw = (*g.bulk_activities)[dp.solvent_index];
  if (std::abs(aw - 1.0) > dp.raoult_tolerance) {
    out.warnings.push_back("solvent activity " + std::to_string(aw) +
                           " departs from Raoult's regime");
  }
  double total_moles = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    total_moles += s.partial_densities[j] / m.species()[j].molar_mass;
  }
  const double x_ions = 1.0 - s.partial_densities[dp.solvent_index] /
                                  m.species()[dp.solvent_index].molar_mass / total_moles;
  if (x_ions > dp.dilute_mole_fraction_limit) {
    out.warnings.push_back("ion mole fraction " + std::to_string(x_ions) + " is not dilute");
  }
  return out;
}

Vec3 moyne_murad_bulk_pressure_gradient(const Vec3& grad_p, double charge_density,
                                        const Vec3& electric_field) {
  return grad_p - charge_density * electric_field;
}

double huyghe_janssen_osmotic_pressure(double temperature, double osmotic_coefficient,
                                       double c_plus, double c_minus, double pi0) {
  return kGasConstant * temperature * osmotic_coefficient * (c_plus + c_minus) + pi0;
}

DrivingForce reduce_huyghe_janssen(const ConstitutiveModel& m, const MixtureState& s,
                                   const LocalGradients& g, double osmotic_coefficient,
                                   double pi0, std::size_t cation_index, std::size_t anion_index,
                                   const FlowCoefficients& coeffs) {
  (void)pi0;      // shifts pi_bar's level, not its gradient
  (void)coeffs;   // the returned force is resistivity-free (R v form)
  s.validate();
  require(g.grad_mu.size() == m.species_count() && g.grad_conc.size() == m.species_count(),
          "reduce_huyghe_janssen: per-species gradients missing");
  const double eps = s.volume_fraction;
  const double rho = s.total_density();
  const double RT = kGasConstant * s.temperature;

  // grad pi_bar = R T phi grad(c+ + c-), ions in moles per liquid volume
  Vec3 grad_pi_bar = Vec3::Zero();
  for (std::size_t j : {cation_index, anion_index}) {
    const Vec3 grad_c =
        (s.concentration(j) * g.grad_rho + rho * g.grad_conc[j]) / m.species()[j].molar_mass;
    grad_pi_bar += RT * osmotic_coefficient * grad_c;
  }

  DrivingForce out;
  out.pressure = -eps * (g.grad_p - grad_pi_bar);
  for (std::size_t j : {cation_index, anion_index}) {
    const Vec3 grad_mu_tilde = g.grad_mu[j] - m.species()[j].charge * g.electric_field;
    out.concentration -= eps * s.partial_densities[j] * grad_mu_tilde;
  }
  out.total = out.pressure + out.concentration;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct PathValues {
  double p, eps, rho, gibbs, phi;
  std::vector<double> conc, mu;
  double bulk_p = 0.0;
  std::vector<double> bulk_a;
};

PathValues values_at(const ConstitutiveModel& m, const MixtureState& s,
                     const BulkReference* bulk) {
  PathValues v;
  v.p = thermo::liquid_pressure(m, s);
  v.eps = s.volume_fraction;
  v.rho = s.total_density();
  v.gibbs = m.psi(s) + v.p / v.rho;
  v.phi = s.electric_potential;
  v.conc = s.concentrations();
  v.mu.resize(m.species_count());
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    v.mu[j] = thermo::chemical_potential(m, s, j);
  }
  if (bulk != nullptr) {
    const auto bs = thermo::bulk_equilibrium_map(m, s, bulk);
    v.bulk_p = bs.pressure;
    v.bulk_a = bs.activities;
  }
  return v;
}

}  // namespace

LocalGradients gradients_from_state_path(const ConstitutiveModel& m, const StatePath& path,
                                         double x, double h, const BulkReference* bulk) {
  const std::size_t n = m.species_count();
  auto eval = [&](double t) { return values_at(m, path(t), bulk); };
  const PathValues pp = eval(x + h), pm = eval(x - h);
  const PathValues qp = eval(x + h / 2.0), qm = eval(x - h / 2.0);
  auto deriv = [&](auto&& get) {
    const double d1 = (get(pp) - get(pm)) / (2.0 * h);
    const double d2 = (get(qp) - get(qm)) / h;
    return (4.0 * d2 - d1) / 3.0;
  };

  LocalGradients g;
  g.grad_p = xvec(deriv([](const PathValues& v) { return v.p; }));
  g.grad_eps = xvec(deriv([](const PathValues& v) { return v.eps; }));
  g.grad_rho = xvec(deriv([](const PathValues& v) { return v.rho; }));
  g.grad_gibbs = xvec(deriv([](const PathValues& v) { return v.gibbs; }));
  g.electric_field = xvec(-deriv([](const PathValues& v) { return v.phi; }));
  g.grad_conc.resize(n);
  g.grad_mu.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.grad_conc[j] = xvec(deriv([j](const PathValues& v) { return v.conc[j]; }));
    g.grad_mu[j] = xvec(deriv([j](const PathValues& v) { return v.mu[j]; }));
  }
  if (bulk != nullptr) {
    g.grad_bulk_pressure = xvec(deriv([](const PathValues& v) { return v.bulk_p; }));
    std::vector<Vec3> ga(n);
    for (std::size_t j = 0; j < n; ++j) {
      ga[j] = xvec(deriv([j](const PathValues& v) { return v.bulk_a[j]; }));
    }
    g.grad_activity = std::move(ga);
    const auto center = values_at(m, path(x), bulk);
    g.bulk_pressure = center.bulk_p;
    g.bulk_activities = center.bulk_a;
  }
  return g;
}

LocalGradients gradients_from_state_pair(const ConstitutiveModel& m, const MixtureState& left,
                                         const MixtureState& right, double dx,
                                         const BulkReference* bulk) {
  const std::size_t n = m.species_count();
  const PathValues a = values_at(m, left, bulk);
  const PathValues b = values_at(m, right, bulk);
  auto d = [&](double va, double vb) { return xvec((vb - va) / dx); };

  LocalGradients g;
  g.grad_p = d(a.p, b.p);
  g.grad_eps = d(a.eps, b.eps);
  g.grad_rho = d(a.rho, b.rho);
  g.grad_gibbs = d(a.gibbs, b.gibbs);
  g.electric_field = -d(a.phi, b.phi);
  g.grad_conc.resize(n);
  g.grad_mu.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    g.grad_conc[j] = d(a.conc[j], b.conc[j]);
    g.grad_mu[j] = d(a.mu[j], b.mu[j]);
  }
  if (bulk != nullptr) {
    g.grad_bulk_pressure = d(a.bulk_p, b.bulk_p);
    std::vector<Vec3> ga(n);
    for (std::size_t j = 0; j < n; ++j) ga[j] = d(a.bulk_a[j], b.bulk_a[j]);
    g.grad_activity = std::move(ga);
    g.bulk_pressure = 0.5 * (a.bulk_p + b.bulk_p);
    std::vector<double> mid(n);
    for (std::size_t j = 0; j < n; ++j) mid[j] = 0.5 * (a.bulk_a[j] + b.bulk_a[j]);
    g.bulk_activities = std::move(mid);
  }
  return g;
}

}  // namespace swellflow::flowlaws
