#include "swellflow/model.hpp"

#include <cmath>

#include "swellflow/errors.hpp"
#include "swellflow/finite_difference.hpp"

namespace swellflow {

namespace {

// FD fallbacks in each coordinate family.
double fd_psi_rho(const ConstitutiveModel& m, const MixtureState& s, std::size_t j) {
  return central_derivative(
      [&](double rj) {
        MixtureState t = s;
        t.partial_densities[j] = rj;
        return m.psi(t);
      },
      s.partial_densities[j]);
}

double fd_psi_eps(const ConstitutiveModel& m, const MixtureState& s) {
  return central_derivative(
      [&](double e) {
        MixtureState t = s;
        t.volume_fraction = e;
        return m.psi(t);
      },
      s.volume_fraction);
}

double fd_psi_tilde_rho(const ConstitutiveModel& m, const MixtureState& s) {
  const double rho = s.total_density();
  return central_derivative(
      [&](double r) { return m.psi(perturb_total_density_fixed_conc(s, r - rho)); }, rho);
}

double fd_psi_tilde_conc(const ConstitutiveModel& m, const MixtureState& s, std::size_t k) {
  return central_derivative(
      [&](double dc) { return m.psi(perturb_concentration_fixed_rho(s, k, dc)); }, 0.0,
      FdOptions{.rel_step = 0.0, .abs_step = 1e-7});
}

}  // namespace

double eval_psi_tilde_conc_partial(const ConstitutiveModel& m, const MixtureState& s,
                                   std::size_t k) {
  const std::size_t n = m.species_count();
  if (k + 1 >= n) throw PreconditionError("tilde concentration partial: index must be < N-1");
  if (auto a = m.psi_tilde_conc_partial(s, k)) return *a;
  // chain rule from the direct family: d psi~/d C^k = rho (psi_rho^k - psi_rho^N)
  auto dk = m.psi_rho_partial(s, k);
  auto dn = m.psi_rho_partial(s, n - 1);
  if (dk && dn) return s.total_density() * (*dk - *dn);
  return fd_psi_tilde_conc(m, s, k);
}

double eval_psi_tilde_rho_partial(const ConstitutiveModel& m, const MixtureState& s) {
  if (auto a = m.psi_tilde_rho_partial(s)) return *a;
  const std::size_t n = m.species_count();
  // chain rule: d psi~/d rho |_C = sum_k C^k psi_rho^k
  bool have_all = true;
  double acc = 0.0;
  for (std::size_t k = 0; k < n && have_all; ++k) {
    if (auto d = m.psi_rho_partial(s, k)) {
      acc += s.concentration(k) * (*d);
    } else {
      have_all = false;
    }
  }
  if (have_all) return acc;
  return fd_psi_tilde_rho(m, s);
}

double eval_psi_rho_partial(const ConstitutiveModel& m, const MixtureState& s, std::size_t j) {
  const std::size_t n = m.species_count();
  if (j >= n) throw PreconditionError("density partial: species index out of range");
  if (auto a = m.psi_rho_partial(s, j)) return *a;
  // chain rule from the tilde family:
  //   psi_rho^j = psi~_rho + (1/rho) [ psi~_C^j (j<N) - sum_{k<N} C^k psi~_C^k ]
  if (m.psi_tilde_rho_partial(s).has_value()) {
    const double rho = s.total_density();
    double corr = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double ck = s.concentration(k);
      if (ck > 0.0) corr -= ck * eval_psi_tilde_conc_partial(m, s, k);
    }
    if (j + 1 < n) corr += eval_psi_tilde_conc_partial(m, s, j);
    return *m.psi_tilde_rho_partial(s) + corr / rho;
  }
  return fd_psi_rho(m, s, j);
}

double eval_psi_eps_partial(const ConstitutiveModel& m, const MixtureState& s) {
  if (auto a = m.psi_eps_partial(s)) return *a;
  return fd_psi_eps(m, s);
}

}  // namespace swellflow
