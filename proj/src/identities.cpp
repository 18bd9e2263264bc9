#include "swellflow/identities.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "swellflow/errors.hpp"
#include "swellflow/thermo.hpp"

namespace swellflow::identities {

namespace {

constexpr std::array<IdentityId, kIdentityCount> kAll = {
    IdentityId::A4_mixed_partials,    IdentityId::A10_pressure_two_forms,
    IdentityId::A20_mu_helmholtz,     IdentityId::A34_mu_difference,
    IdentityId::A40_mu_gibbs,         IdentityId::A46_dg_dp,
    IdentityId::A50_weighted_sum,     IdentityId::A62_A64_dmu_dp_incompressible,
};

double rel_error(double lhs, double rhs, double scale_floor) {
  const double den = std::max({std::abs(lhs), std::abs(rhs), scale_floor});
  if (den == 0.0) return 0.0;
  return std::abs(lhs - rhs) / den;
}

// --- pressure inversion: the Gibbs-variable identities need the state at a
// prescribed pressure with composition and volume fraction held fixed.
MixtureState state_at_pressure(const ConstitutiveModel& m, const MixtureState& base,
                               double pressure) {
  MixtureState s = base;
  double rho = s.total_density();
  const double p_scale = std::max(std::abs(pressure), 1e4);
  double prev_abs = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 80; ++it) {
    const double f = thermo::liquid_pressure(m, s) - pressure;
    const double abs_f = std::abs(f);
    if (abs_f < 1e-13 * p_scale || abs_f >= prev_abs * 0.999999) break;
    prev_abs = abs_f;
    const double dpdr = central_derivative(
        [&](double r) {
          return thermo::liquid_pressure(m, perturb_total_density_fixed_conc(s, r - rho));
        },
        rho, FdOptions{.rel_step = 1e-7, .abs_step = 1e-7, .richardson = false});
    double step = -f / dpdr;
    if (std::abs(step) > 0.25 * rho) step = std::copysign(0.25 * rho, step);
    s = perturb_total_density_fixed_conc(s, step);
    rho += step;
  }
  return s;
}

double gibbs_at_pressure(const ConstitutiveModel& m, const MixtureState& base, double pressure) {
  const MixtureState s = state_at_pressure(m, base, pressure);
  return m.psi(s) + pressure / s.total_density();
}

struct Eval {
  double max_rel = 0.0;
  void take(double lhs, double rhs, double floor) {
    max_rel = std::max(max_rel, rel_error(lhs, rhs, floor));
  }
};

// FD steps for the Gibbs-variable oracles: large enough to clear the
// density-quantization noise of stiff models, small against curvature.
double pressure_step(double p0) { return std::max(1e-4 * std::abs(p0), 10.0); }

// a C^k move debits the solvent, so the step scales with the smaller of the
// two concentrations (the ln x curvature lives on that scale too)
double concentration_step(const MixtureState& s, std::size_t k) {
  const double cs = s.concentration(s.species_count() - 1);
  return std::max(0.03 * std::min(s.concentration(k), cs), 1e-10);
}

double check_a4(const ConstitutiveModel& m, const MixtureState& s) {
  // d/dp [dg/dC^k] vs d/dC^k [dg/dp]: the inner derivatives use the two
  // analytic reductions dg/dC^k|_p = dpsi~/dC^k|_rho and dg/dp|_C = 1/rho,
  // the outer ones are central differences.
  const std::size_t n = m.species_count();
  const double p0 = thermo::liquid_pressure(m, s);
  const double hp = pressure_step(p0);
  Eval ev;
  const double rho_floor = 0.01 / s.total_density();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double route1 = central_derivative(
        [&](double p) {
          return eval_psi_tilde_conc_partial(m, state_at_pressure(m, s, p), k);
        },
        p0, FdOptions{.rel_step = 0.0, .abs_step = hp});
    const double route2 = central_derivative(
        [&](double dc) {
          const MixtureState t =
              state_at_pressure(m, perturb_concentration_fixed_rho(s, k, dc), p0);
          return 1.0 / t.total_density();
        },
        0.0, FdOptions{.rel_step = 0.0, .abs_step = concentration_step(s, k)});
    ev.take(route1, route2, rho_floor);
  }
  return ev.max_rel;
}

double check_a10(const ConstitutiveModel& m, const MixtureState& s) {
  const double rho = s.total_density();
  const double lhs = thermo::liquid_pressure(m, s);
  double term_sum = 0.0;
  double rhs_direct = 0.0;
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    const double rj = s.partial_densities[j];
    if (rj == 0.0) continue;
    auto d = fd_partial([&m](const MixtureState& t) { return m.psi(t); },
                        StateVariable::PartialDensity, j, s);
    rhs_direct += rho * rj * d.value;
    term_sum += std::abs(rho * rj * d.value);
  }
  auto dt = fd_partial([&m](const MixtureState& t) { return m.psi(t); },
                       StateVariable::TotalDensityFixedConcentration, 0, s);
  const double rhs_tilde = rho * rho * dt.value;
  const double floor = 1e-3 * std::max(term_sum, std::abs(rhs_tilde));
  return std::max(rel_error(lhs, rhs_direct, floor), rel_error(lhs, rhs_tilde, floor));
}

double check_a20(const ConstitutiveModel& m, const MixtureState& s) {
  const std::size_t n = m.species_count();
  const double rho = s.total_density();
  const double psi = m.psi(s);
  const double p = thermo::liquid_pressure(m, s);
  const double floor = 1e-3 * (std::abs(psi) + std::abs(p) / rho);
  std::vector<double> dC(n > 1 ? n - 1 : 0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    dC[k] = fd_partial([&m](const MixtureState& t) { return m.psi(t); },
                       StateVariable::ConcentrationFixedDensity, k, s,
                       FdOptions{.rel_step = 0.0, .abs_step = concentration_step(s, k)})
                .value;
  }
  double weighted = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) weighted += s.concentration(k) * dC[k];
  Eval ev;
  for (std::size_t j = 0; j < n; ++j) {
    const double lhs = thermo::chemical_potential(m, s, j);
    double rhs = psi + p / rho - weighted;
    if (j + 1 < n) rhs += dC[j];
    ev.take(lhs, rhs, floor);
  }
  return ev.max_rel;
}

double check_a34(const ConstitutiveModel& m, const MixtureState& s) {
  const std::size_t n = m.species_count();
  if (n < 2) return 0.0;
  const double mu_n = thermo::chemical_potential(m, s, n - 1);
  const double floor = 1e-3 * kGasConstant * s.temperature / m.species().back().molar_mass;
  Eval ev;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double lhs = thermo::chemical_potential(m, s, k) - mu_n;
    const double rhs = eval_psi_tilde_conc_partial(m, s, k);
    ev.take(lhs, rhs, floor);
  }
  return ev.max_rel;
}

double check_a40(const ConstitutiveModel& m, const MixtureState& s) {
  const std::size_t n = m.species_count();
  const double p = thermo::liquid_pressure(m, s);
  const double g = m.psi(s) + p / s.total_density();
  const double floor = 1e-3 * kGasConstant * s.temperature / m.species().back().molar_mass;
  std::vector<double> dgdC(n > 1 ? n - 1 : 0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    dgdC[k] = central_derivative(
        [&](double dc) {
          return gibbs_at_pressure(m, perturb_concentration_fixed_rho(s, k, dc), p);
        },
        0.0, FdOptions{.rel_step = 0.0, .abs_step = concentration_step(s, k)});
  }
  double weighted = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) weighted += s.concentration(k) * dgdC[k];
  Eval ev;
  for (std::size_t j = 0; j < n; ++j) {
    const double lhs = thermo::chemical_potential(m, s, j);
    double rhs = g - weighted;
    if (j + 1 < n) rhs += dgdC[j];
    ev.take(lhs, rhs, floor);
  }
  return ev.max_rel;
}

double check_a46(const ConstitutiveModel& m, const MixtureState& s) {
  const double p0 = thermo::liquid_pressure(m, s);
  const double hp = pressure_step(p0);
  const double lhs = central_derivative([&](double p) { return gibbs_at_pressure(m, s, p); }, p0,
                                        FdOptions{.rel_step = 0.0, .abs_step = hp});
  const double rhs = 1.0 / s.total_density();
  return rel_error(lhs, rhs, 0.0);
}

double check_a50(const ConstitutiveModel& m, const MixtureState& s) {
  const double rho = s.total_density();
  const double g = thermo::gibbs_potential(m, s);
  double sum = 0.0;
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    sum += s.concentration(j) * thermo::chemical_potential(m, s, j);
  }
  const double floor = 1e-3 * (std::abs(m.psi(s)) + std::abs(thermo::liquid_pressure(m, s)) / rho);
  return rel_error(sum, g, floor);
}

double check_a62(const ConstitutiveModel& m, const MixtureState& raw) {
  const auto ref = m.bulk_reference();
  if (!ref) {
    throw PreconditionError("identity A62/A64 requires an incompressible-family model, got '" +
                            m.name() + "'");
  }
  // the incompressible law holds on the volume-filling manifold; evaluate
  // there, where the mapped pressure is well defined
  const MixtureState s = project_to_volume_manifold(m, raw);
  const double p0 = thermo::liquid_pressure(m, s);
  const double hp = pressure_step(p0);
  Eval ev;
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    if (s.partial_densities[j] == 0.0) continue;
    const double lhs = central_derivative(
        [&](double p) { return thermo::chemical_potential(m, state_at_pressure(m, s, p), j); },
        p0, FdOptions{.rel_step = 0.0, .abs_step = hp});
    const double rhs = 1.0 / m.species()[j].specific_density;
    ev.take(lhs, rhs, 0.0);
  }
  return ev.max_rel;
}

}  // namespace

std::span<const IdentityId> all_identities() { return kAll; }

std::string identity_name(IdentityId id) {
  switch (id) {
    case IdentityId::A4_mixed_partials: return "A4_mixed_partials";
    case IdentityId::A10_pressure_two_forms: return "A10_pressure_two_forms";
    case IdentityId::A20_mu_helmholtz: return "A20_mu_helmholtz";
    case IdentityId::A34_mu_difference: return "A34_mu_difference";
    case IdentityId::A40_mu_gibbs: return "A40_mu_gibbs";
    case IdentityId::A46_dg_dp: return "A46_dg_dp";
    case IdentityId::A50_weighted_sum: return "A50_weighted_sum";
    case IdentityId::A62_A64_dmu_dp_incompressible: return "A62_A64_dmu_dp_incompressible";
  }
  return "unknown";
}

IdentityId parse_identity(const std::string& name) {
  for (IdentityId id : kAll) {
    if (identity_name(id) == name) return id;
  }
  throw PreconditionError("unknown identity id '" + name + "'");
}

double registered_tolerance(IdentityId id) {
  switch (id) {
    case IdentityId::A34_mu_difference:
    case IdentityId::A50_weighted_sum:
      return 1e-10;  // algebraic
    default:
      return 1e-6;  // FD-backed
  }
}

bool identity_applicable(IdentityId id, const ConstitutiveModel& m) {
  if (id == IdentityId::A62_A64_dmu_dp_incompressible) return m.bulk_reference().has_value();
  return true;
}

IdentityReport verify_identity(IdentityId id, const ConstitutiveModel& m,
                               std::span<const MixtureState> states,
                               std::optional<double> tolerance_override) {
  if (!identity_applicable(id, m)) {
    throw PreconditionError("identity " + identity_name(id) + " not applicable to model '" +
                            m.name() + "'");
  }
  IdentityReport rep;
  rep.id = id;
  rep.tolerance = tolerance_override.value_or(registered_tolerance(id));
  for (const MixtureState& s : states) {
    double err = 0.0;
    switch (id) {
      case IdentityId::A4_mixed_partials: err = check_a4(m, s); break;
      case IdentityId::A10_pressure_two_forms: err = check_a10(m, s); break;
      case IdentityId::A20_mu_helmholtz: err = check_a20(m, s); break;
      case IdentityId::A34_mu_difference: err = check_a34(m, s); break;
      case IdentityId::A40_mu_gibbs: err = check_a40(m, s); break;
      case IdentityId::A46_dg_dp: err = check_a46(m, s); break;
      case IdentityId::A50_weighted_sum: err = check_a50(m, s); break;
      case IdentityId::A62_A64_dmu_dp_incompressible: err = check_a62(m, s); break;
    }
    rep.max_rel_error = std::max(rep.max_rel_error, err);
    ++rep.states_tested;
  }
  rep.pass = rep.max_rel_error < rep.tolerance;
  return rep;
}

// ---------------------------------------------------------------------------

FdPartialResult fd_partial(const std::function<double(const MixtureState&)>& f, StateVariable sel,
                           std::size_t index, const MixtureState& state, FdOptions opts) {
  state.validate();
  auto at = [&](double t) -> MixtureState {
    switch (sel) {
      case StateVariable::PartialDensity: return perturb_partial_density(state, index, t);
      case StateVariable::TotalDensityFixedConcentration:
        return perturb_total_density_fixed_conc(state, t);
      case StateVariable::ConcentrationFixedDensity:
        return perturb_concentration_fixed_rho(state, index, t);
      case StateVariable::VolumeFraction: return perturb_volume_fraction(state, t);
      case StateVariable::VolumeFractionFixedMass:
        return perturb_volume_fraction_fixed_mass(state, t);
    }
    throw PreconditionError("fd_partial: bad selector");
  };
  double x0 = 0.0;
  switch (sel) {
    case StateVariable::PartialDensity: x0 = state.partial_densities[index]; break;
    case StateVariable::TotalDensityFixedConcentration: x0 = state.total_density(); break;
    case StateVariable::ConcentrationFixedDensity: x0 = state.concentration(index); break;
    default: x0 = state.volume_fraction; break;
  }

  double h = std::max(opts.rel_step * std::abs(x0), opts.abs_step);
  if (h == 0.0) h = 1e-7;
  for (int attempt = 0; attempt < 8; ++attempt) {
    const std::array<double, 4> offsets = {h, -h, h / 2.0, -h / 2.0};
    bool admissible = true;
    for (double t : offsets) admissible = admissible && at(t).admissible();
    if (!admissible) {
      h *= 0.25;
      continue;
    }
    try {
      auto eval = [&](double t) { return f(at(t)); };
      const double d1 = (eval(h) - eval(-h)) / (2.0 * h);
      if (!opts.richardson) return {d1, std::abs(d1) * opts.rel_step};
      const double d2 = (eval(h / 2.0) - eval(-h / 2.0)) / h;
      return {(4.0 * d2 - d1) / 3.0, std::abs(d2 - d1) / 3.0};
    } catch (const DomainError&) {
      h *= 0.25;
    }
  }
  throw DomainError("fd_partial: state too close to the domain boundary for any usable step");
}

// ---------------------------------------------------------------------------

namespace {
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}
}  // namespace

std::vector<MixtureState> sample_states(const ConstitutiveModel& m, std::size_t count,
                                        std::uint64_t seed, const SampleOptions& opt) {
  std::mt19937_64 rng(seed);
  std::vector<MixtureState> out;
  out.reserve(count);
  const double lmin = std::log(opt.density_min);
  const double lmax = std::log(opt.density_max);
  for (std::size_t i = 0; i < count; ++i) {
    MixtureState s;
    s.temperature =
        opt.temperature_min + (opt.temperature_max - opt.temperature_min) * uniform01(rng);
    s.volume_fraction = opt.eps_min + (opt.eps_max - opt.eps_min) * uniform01(rng);
    s.partial_densities.resize(m.species_count());
    for (double& r : s.partial_densities) r = std::exp(lmin + (lmax - lmin) * uniform01(rng));
    s.electric_potential = 0.0;
    out.push_back(std::move(s));
  }
  return out;
}

MixtureState project_to_volume_manifold(const ConstitutiveModel& m, const MixtureState& s) {
  double filled = 0.0;
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    filled += s.partial_densities[j] / m.species()[j].specific_density;
  }
  MixtureState out = s;
  for (double& r : out.partial_densities) r /= filled;
  return out;
}

}  // namespace swellflow::identities
