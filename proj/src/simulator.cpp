#include "swellflow/simulator.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "swellflow/errors.hpp"

namespace swellflow::sim {

namespace {

double default_overburden(const ConstitutiveModel& m) {
  if (auto ref = m.bulk_reference()) return ref->reference_pressure;
  return kStandardPressure;
}

double overburden_at(const ConstitutiveModel& m, const SimOptions& opts, double x) {
  return opts.overburden ? opts.overburden(x) : default_overburden(m);
}

double potential_at(const SimOptions& opts, double x) {
  return opts.electric_potential ? opts.electric_potential(x) : 0.0;
}

/// series composition of the two half-cell resistivities; equals the
/// harmonic mean of the conductivities, so an impermeable side blocks.
double series_resistivity(double r_left, double r_right) {
  return 0.5 * (r_left + r_right);
}

struct CellEval {
  std::vector<double> mu_tilde;  // per species [J/kg]
  std::vector<double> eps_rho;   // eps rho^j [kg/m^3]
};

CellEval eval_cell(const ConstitutiveModel& m, const MixtureState& s) {
  CellEval e;
  const std::size_t n = m.species_count();
  e.mu_tilde.resize(n);
  e.eps_rho.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    e.mu_tilde[j] = thermo::electrochemical_potential(m, s, j);
    e.eps_rho[j] = s.volume_fraction * s.partial_densities[j];
  }
  return e;
}

struct FaceFlux {
  double v = 0.0;                // [m/s]
  std::vector<double> species;   // [kg/(m^2 s)]
};

/// dx is the center-to-center distance; `weights` are the face prefactors.
FaceFlux face_from_potentials(const flowlaws::FlowCoefficients& coeffs,
                              const std::vector<double>& mu_left,
                              const std::vector<double>& mu_right,
                              const std::vector<double>& weights, double dx) {
  const std::size_t n = weights.size();
  FaceFlux f;
  f.species.assign(n, 0.0);
  double force = 0.0;
  std::vector<double> dmu(n);
  for (std::size_t j = 0; j < n; ++j) {
    dmu[j] = (mu_right[j] - mu_left[j]) / dx;
    force -= weights[j] * dmu[j];
    force -= coeffs.hydration(j) * coeffs.mobility(j)(0, 0) * dmu[j];
  }
  const double r_xx = coeffs.resistivity(0, 0);
  f.v = force / series_resistivity(r_xx, r_xx);
  for (std::size_t j = 0; j < n; ++j) {
    f.species[j] = weights[j] * (f.v + coeffs.mobility(j)(0, 0) * dmu[j]);
  }
  return f;
}

FaceFlux face_between(const ConstitutiveModel& m, const flowlaws::FlowCoefficients& coeffs,
                      const CellEval& left, const CellEval& right, double dx) {
  const std::size_t n = m.species_count();
  std::vector<double> w(n);
  for (std::size_t j = 0; j < n; ++j) w[j] = 0.5 * (left.eps_rho[j] + right.eps_rho[j]);
  return face_from_potentials(coeffs, left.mu_tilde, right.mu_tilde, w, dx);
}

struct ColumnFluxes {
  std::vector<FaceFlux> faces;  // cell_count + 1 entries
};

ColumnFluxes compute_fluxes(const ColumnState& col, const ConstitutiveModel& m,
                            const flowlaws::FlowCoefficients& coeffs) {
  const std::size_t nc = col.cells.size();
  const double dx = col.grid.cell_width;
  std::vector<CellEval> ev(nc);
  for (std::size_t i = 0; i < nc; ++i) {
    try {
      ev[i] = eval_cell(m, col.cells[i]);
    } catch (const DomainError& e) {
      throw DomainError("cell " + std::to_string(i) + ": " + e.what());
    } catch (const EvaluationError& e) {
      throw EvaluationError("cell " + std::to_string(i) + ": " + e.what());
    }
  }

  ColumnFluxes out;
  out.faces.resize(nc + 1);
  const std::size_t n = m.species_count();

  // left boundary
  if (col.left.kind == BoundaryCondition::Kind::Reservoir) {
    const auto mu_res =
        reservoir_potentials(m, col.left.reservoir, col.cells.front().temperature);
    out.faces.front() =
        face_from_potentials(coeffs, mu_res, ev.front().mu_tilde, ev.front().eps_rho, dx / 2.0);
  } else {
    out.faces.front().species.assign(n, 0.0);
  }
  // interior
  for (std::size_t i = 0; i + 1 < nc; ++i) {
    out.faces[i + 1] = face_between(m, coeffs, ev[i], ev[i + 1], dx);
  }
  // right boundary
  if (col.right.kind == BoundaryCondition::Kind::Reservoir) {
    const auto mu_res =
        reservoir_potentials(m, col.right.reservoir, col.cells.back().temperature);
    out.faces.back() =
        face_from_potentials(coeffs, ev.back().mu_tilde, mu_res, ev.back().eps_rho, dx / 2.0);
  } else {
    out.faces.back().species.assign(n, 0.0);
  }
  return out;
}

double max_abs_velocity(const ColumnFluxes& f) {
  double v = 0.0;
  for (const auto& face : f.faces) v = std::max(v, std::abs(face.v));
  return v;
}

// conserved-variable packing for the implicit solvers
struct Unknowns {
  std::size_t cells = 0;
  std::size_t species = 0;
  bool with_phi = false;
  std::size_t per_cell() const { return species + (with_phi ? 1 : 0); }
  std::size_t size() const { return cells * per_cell(); }
  std::size_t mass_index(std::size_t i, std::size_t j) const { return i * per_cell() + j; }
  std::size_t phi_index(std::size_t i) const { return i * per_cell() + species; }
};

ColumnState rebuild_column(const ColumnState& base, const ConstitutiveModel& m,
                           const SimOptions& opts, const Unknowns& u,
                           const Eigen::VectorXd& vec) {
  ColumnState col = base;
  std::vector<double> masses(u.species);
  for (std::size_t i = 0; i < u.cells; ++i) {
    for (std::size_t j = 0; j < u.species; ++j) masses[j] = vec[u.mass_index(i, j)];
    const double x = col.grid.x_center(i);
    MixtureState cell = reconstruct_cell(m, base.cells[i].temperature, masses, x,
                                         base.cells[i].total_density(), opts);
    cell.electric_potential =
        u.with_phi ? vec[u.phi_index(i)] : potential_at(opts, x);
    col.cells[i] = cell;
  }
  return col;
}

double charge_scale(const ConstitutiveModel& m) {
  double z = 0.0;
  for (const auto& sp : m.species()) z = std::max(z, std::abs(sp.charge));
  return z > 0.0 ? z : 1.0;
}

// the potential acts on neutral cells only through ion mobilities; without
// them the electroneutrality system is singular
void require_ion_mobility(const ConstitutiveModel& m, const flowlaws::FlowCoefficients& coeffs) {
  for (std::size_t j = 0; j < m.species_count(); ++j) {
    if (m.species()[j].charge != 0.0 && coeffs.mobility(j)(0, 0) == 0.0) {
      throw PreconditionError(
          "electroneutrality closure needs a nonzero Fickian mobility for charged species '" +
          m.species()[j].name + "'");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------

ColumnGrid ColumnGrid::uniform(std::size_t cells, double length) {
  ColumnGrid g;
  g.cell_count = cells;
  g.cell_width = length / static_cast<double>(cells);
  g.validate();
  return g;
}

void ColumnGrid::validate() const {
  if (cell_count < 2) throw PreconditionError("grid: need at least 2 cells");
  if (!(cell_width > 0.0)) throw PreconditionError("grid: cell width must be > 0");
}

void ColumnState::validate(std::size_t species_count) const {
  grid.validate();
  if (cells.size() != grid.cell_count) {
    throw PreconditionError("column: cell state count does not match the grid");
  }
  for (const auto& c : cells) {
    c.validate();
    if (c.species_count() != species_count) {
      throw PreconditionError("column: species count mismatch in a cell");
    }
  }
  for (const BoundaryCondition* b : {&left, &right}) {
    if (b->kind != BoundaryCondition::Kind::Reservoir) continue;
    if (b->reservoir.activities.size() != species_count) {
      throw PreconditionError("column: reservoir activity count mismatch");
    }
  }
}

static void validate_reservoir_neutrality(const ColumnState& col, const ConstitutiveModel& m) {
  // reservoirs are bulk fluids and must carry no net charge (activities
  // read as mole fractions of the reservoir solution)
  double zmax = 0.0;
  for (const auto& sp : m.species()) zmax = std::max(zmax, std::abs(sp.charge * sp.molar_mass));
  if (zmax == 0.0) return;
  for (const BoundaryCondition* b : {&col.left, &col.right}) {
    if (b->kind != BoundaryCondition::Kind::Reservoir) continue;
    double q = 0.0;
    for (std::size_t j = 0; j < m.species_count(); ++j) {
      q += m.species()[j].charge * m.species()[j].molar_mass * b->reservoir.activities[j];
    }
    if (std::abs(q) > 1e-9 * zmax) {
      throw PreconditionError("column: reservoir boundary is not charge neutral");
    }
  }
}

std::vector<double> cell_masses(const MixtureState& s) {
  std::vector<double> m(s.species_count());
  for (std::size_t j = 0; j < m.size(); ++j) {
    m[j] = s.volume_fraction * s.partial_densities[j];
  }
  return m;
}

MixtureState reconstruct_cell(const ConstitutiveModel& m, double temperature,
                              std::span<const double> masses, double x, double rho_hint,
                              const SimOptions& opts) {
  const std::size_t n = masses.size();
  double total = 0.0;
  for (double v : masses) total += v;
  if (!(total > 0.0)) throw DomainError("reconstruct_cell: nonpositive total mass");
  std::vector<double> conc(n);
  for (std::size_t j = 0; j < n; ++j) conc[j] = masses[j] / total;

  const double p_target = overburden_at(m, opts, x);
  auto make = [&](double rho) {
    MixtureState s;
    s.temperature = temperature;
    s.volume_fraction = total / rho;
    s.partial_densities.resize(n);
    for (std::size_t j = 0; j < n; ++j) s.partial_densities[j] = conc[j] * rho;
    s.electric_potential = potential_at(opts, x);
    return s;
  };

  double rho = rho_hint > 0.0 ? std::max(rho_hint, total) : total;
  const double p_scale = std::max(std::abs(p_target), 1e4);
  double best = std::numeric_limits<double>::infinity();
  for (int it = 0; it < 60; ++it) {
    const double f = thermo::liquid_pressure(m, make(rho)) - p_target;
    const double af = std::abs(f);
    // drive to the floating-point floor: downstream Newton solvers difference
    // reconstructed states, so closure jitter must stay below their tolerances
    if (af < 4e-15 * p_scale) break;
    if (af >= best * 0.999999 && it > 4) break;
    best = std::min(best, af);
    const double h = std::max(1e-7 * rho, 1e-9);
    // near saturation rho - h would push eps past 1; step one-sided there
    const double lo = std::max(rho - h, total);
    const double slope = (thermo::liquid_pressure(m, make(rho + h)) -
                          thermo::liquid_pressure(m, make(lo))) /
                         (rho + h - lo);
    double next = rho - f / slope;
    if (!(next > 0.0)) next = 0.5 * rho;
    if (next < total) next = 0.5 * (rho + total);  // eps <= 1 safeguard
    rho = next;
  }
  MixtureState out = make(rho);
  out.volume_fraction = std::min(out.volume_fraction, 1.0);
  out.validate();
  const double resid = thermo::liquid_pressure(m, out) - p_target;
  if (std::abs(resid) > 1e-6 * p_scale) {
    // pinned at full saturation with excess pressure: the cell cannot hold
    // this much liquid under the applied load
    if (out.volume_fraction >= 1.0 - 1e-12 && resid > 0.0) {
      throw DomainError("reconstruct_cell: applied pressure would require eps > 1 (oversaturated)");
    }
    throw SolverError("reconstruct_cell: pressure closure did not converge",
                      "residual " + std::to_string(resid) + " Pa at x=" + std::to_string(x));
  }
  return out;
}

std::vector<double> reservoir_potentials(const ConstitutiveModel& m, const ReservoirBoundary& b,
                                         double temperature) {
  auto ref = m.bulk_reference();
  if (!ref) {
    throw PreconditionError(
        "reservoir boundary needs an incompressible-family model (no bulk reference in '" +
        m.name() + "')");
  }
  const std::size_t n = m.species_count();
  if (b.activities.size() != n) {
    throw PreconditionError("reservoir: one activity per species required");
  }
  std::vector<double> mu(n);
  for (std::size_t j = 0; j < n; ++j) {
    mu[j] = thermo::incompressible_chemical_potential(
        m.species()[j], temperature, b.bulk_pressure, b.activities[j],
        {ref->reference_pressure, ref->reference_potentials[j]});
  }
  return mu;
}

ReservoirBoundary matched_reservoir(const ConstitutiveModel& m, const MixtureState& s) {
  const std::size_t n = m.species_count();
  auto ref = m.bulk_reference();
  if (!ref) throw PreconditionError("matched_reservoir: model has no bulk reference");
  if (n == 1 && m.species()[0].charge == 0.0) {
    const double mu = thermo::chemical_potential(m, s, 0);
    ReservoirBoundary b;
    b.bulk_pressure = ref->reference_pressure +
                      m.species()[0].specific_density * (mu - ref->reference_potentials[0]);
    b.activities = {1.0};
    return b;
  }
  const auto bs = thermo::bulk_equilibrium_map(m, s, &*ref);
  return {bs.pressure, bs.activities};
}

double face_velocity(const ConstitutiveModel& m, const flowlaws::FlowCoefficients& coeffs,
                     const MixtureState& left, const MixtureState& right, double dx) {
  return face_between(m, coeffs, eval_cell(m, left), eval_cell(m, right), dx).v;
}

std::vector<double> face_species_flux(const ConstitutiveModel& m,
                                      const flowlaws::FlowCoefficients& coeffs,
                                      const MixtureState& left, const MixtureState& right,
                                      double dx) {
  return face_between(m, coeffs, eval_cell(m, left), eval_cell(m, right), dx).species;
}

double max_face_velocity(const ColumnState& col, const ConstitutiveModel& m,
                         const flowlaws::FlowCoefficients& coeffs, const SimOptions&) {
  return max_abs_velocity(compute_fluxes(col, m, coeffs));
}

std::vector<double> total_species_mass(const ColumnState& col) {
  const std::size_t n = col.cells.front().species_count();
  std::vector<double> tot(n, 0.0);
  for (const auto& c : col.cells) {
    for (std::size_t j = 0; j < n; ++j) {
      tot[j] += c.volume_fraction * c.partial_densities[j] * col.grid.cell_width;
    }
  }
  return tot;
}

// ---------------------------------------------------------------------------

namespace {

double stable_dt_estimate(const ColumnState& col, const ConstitutiveModel& m,
                          const flowlaws::FlowCoefficients& coeffs, const SimOptions& opts) {
  // forward-Euler bound estimate for the potential-driven diffusion:
  // D_jk ~ (eps rho^j)(eps rho^k) d(mu_k)/d(m_k) / R, dt < dx^2 / (2 max row sum)
  const double dx = col.grid.cell_width;
  const double r_xx = coeffs.resistivity(0, 0);
  double worst = 0.0;
  for (std::size_t i = 0; i < col.cells.size(); ++i) {
    const auto& cell = col.cells[i];
    const auto masses = cell_masses(cell);
    const auto ev = eval_cell(m, cell);
    double row = 0.0;
    for (std::size_t k = 0; k < masses.size(); ++k) {
      std::vector<double> pert = masses;
      const double dm = std::max(1e-7 * masses[k], 1e-10);
      pert[k] += dm;
      MixtureState moved;
      try {
        moved = reconstruct_cell(m, cell.temperature, pert, col.grid.x_center(i),
                                 cell.total_density(), opts);
      } catch (const Error&) {
        continue;
      }
      const double dmu =
          (thermo::electrochemical_potential(m, moved, k) - ev.mu_tilde[k]) / dm;
      double coupling = 0.0;
      for (std::size_t j = 0; j < masses.size(); ++j) coupling += ev.eps_rho[j];
      row += std::abs(ev.eps_rho[k] * dmu) * coupling / r_xx;
    }
    worst = std::max(worst, row);
  }
  if (worst == 0.0) return std::numeric_limits<double>::infinity();
  return dx * dx / (2.0 * worst);
}

struct NewtonOutcome {
  Eigen::VectorXd solution;
  int iterations = 0;
  bool converged = false;
  std::string history;
};

/// damped Newton with a forward-difference Jacobian built by tridiagonal
/// coloring: unknowns of cells with equal index mod 3 are perturbed together.
NewtonOutcome newton_solve(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& residual,
                           Eigen::VectorXd u0, const Unknowns& layout, double tolerance,
                           int max_iterations, const Eigen::VectorXd& column_scale) {
  NewtonOutcome out;
  std::ostringstream hist;
  Eigen::VectorXd u = std::move(u0);
  Eigen::VectorXd r = residual(u);
  const std::size_t nu = static_cast<std::size_t>(u.size());
  Eigen::MatrixXd J(nu, nu);
  for (int it = 0; it < max_iterations; ++it) {
    const double norm = r.lpNorm<Eigen::Infinity>();
    hist << "it " << it << " |r|_inf " << norm << "\n";
    if (norm <= tolerance) {
      out.solution = u;
      out.iterations = it;
      out.converged = true;
      out.history = hist.str();
      return out;
    }
    J.setZero();
    for (std::size_t slot = 0; slot < layout.per_cell(); ++slot) {
      for (std::size_t color = 0; color < 3; ++color) {
        Eigen::VectorXd up = u;
        std::vector<std::pair<std::size_t, double>> touched;  // (cell, step)
        for (std::size_t i = color; i < layout.cells; i += 3) {
          const std::size_t idx = i * layout.per_cell() + slot;
          const double h = std::max(1e-7 * std::abs(u[idx]), 1e-7 * column_scale[idx]);
          up[idx] += h;
          touched.emplace_back(i, h);
        }
        if (touched.empty()) continue;
        const Eigen::VectorXd rp = residual(up);
        for (const auto& [cell, h] : touched) {
          const std::size_t col_idx = cell * layout.per_cell() + slot;
          const std::size_t lo = cell == 0 ? 0 : cell - 1;
          const std::size_t hi = std::min(cell + 1, layout.cells - 1);
          for (std::size_t i = lo; i <= hi; ++i) {
            for (std::size_t s2 = 0; s2 < layout.per_cell(); ++s2) {
              const std::size_t row = i * layout.per_cell() + s2;
              J(row, col_idx) = (rp[row] - r[row]) / h;
            }
          }
        }
      }
    }
    const Eigen::VectorXd step = J.partialPivLu().solve(-r);
    double lambda = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 20; ++bt) {
      Eigen::VectorXd trial = u + lambda * step;
      Eigen::VectorXd rt;
      try {
        rt = residual(trial);
      } catch (const Error&) {
        lambda *= 0.5;
        continue;
      }
      if (rt.lpNorm<Eigen::Infinity>() < norm) {
        u = trial;
        r = rt;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) {
      hist << "line search stalled\n";
      out.solution = u;
      out.iterations = it;
      out.history = hist.str();
      return out;
    }
  }
  out.solution = u;
  out.iterations = max_iterations;
  out.history = hist.str();
  return out;
}

Eigen::VectorXd pack_column(const ColumnState& col, const Unknowns& layout) {
  Eigen::VectorXd u(layout.size());
  for (std::size_t i = 0; i < layout.cells; ++i) {
    const auto masses = cell_masses(col.cells[i]);
    for (std::size_t j = 0; j < layout.species; ++j) u[layout.mass_index(i, j)] = masses[j];
    if (layout.with_phi) u[layout.phi_index(i)] = col.cells[i].electric_potential;
  }
  return u;
}

}  // namespace

std::pair<ColumnState, StepReport> step(const ColumnState& col, const ConstitutiveModel& m,
                                        const flowlaws::FlowCoefficients& coeffs, double dt,
                                        TimeMode mode, const SimOptions& opts) {
  col.validate(m.species_count());
  validate_reservoir_neutrality(col, m);
  if (!(dt > 0.0)) throw PreconditionError("step: dt must be > 0");
  if (mode == TimeMode::Explicit && opts.electroneutrality) {
    throw PreconditionError("step: electroneutrality closure needs the implicit mode");
  }
  if (opts.electroneutrality) require_ion_mobility(m, coeffs);
  const std::size_t nc = col.cells.size();
  const std::size_t n = m.species_count();
  const double dx = col.grid.cell_width;

  StepReport rep;
  rep.stable_dt_estimate = stable_dt_estimate(col, m, coeffs, opts);

  ColumnState next = col;
  if (mode == TimeMode::Explicit) {
    const ColumnFluxes f = compute_fluxes(col, m, coeffs);
    for (std::size_t i = 0; i < nc; ++i) {
      auto masses = cell_masses(col.cells[i]);
      for (std::size_t j = 0; j < n; ++j) {
        masses[j] -= dt / dx * (f.faces[i + 1].species[j] - f.faces[i].species[j]);
      }
      next.cells[i] = reconstruct_cell(m, col.cells[i].temperature, masses,
                                       col.grid.x_center(i), col.cells[i].total_density(), opts);
    }
    rep.dt_used = dt;
  } else {
    Unknowns layout{nc, n, opts.electroneutrality};
    const Eigen::VectorXd u_old = pack_column(col, layout);
    double mass_scale = 0.0;
    for (std::size_t i = 0; i < layout.size(); ++i) mass_scale = std::max(mass_scale, std::abs(u_old[i]));
    const double zs = charge_scale(m);

    // a no-flux column leaves the potential level free and makes the charge
    // rows dependent on the mass rows; gauge the first cell's potential
    const bool gauge_phi =
        layout.with_phi && col.left.kind == BoundaryCondition::Kind::NoFlux &&
        col.right.kind == BoundaryCondition::Kind::NoFlux;
    double dt_try = dt;
    std::string last_history;
    for (int rej = 0; rej <= opts.max_step_rejections; ++rej) {
      auto residual = [&](const Eigen::VectorXd& u) {
        const ColumnState trial = rebuild_column(col, m, opts, layout, u);
        const ColumnFluxes f = compute_fluxes(trial, m, coeffs);
        Eigen::VectorXd r(layout.size());
        for (std::size_t i = 0; i < nc; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            r[layout.mass_index(i, j)] =
                u[layout.mass_index(i, j)] - u_old[layout.mass_index(i, j)] +
                dt_try / dx * (f.faces[i + 1].species[j] - f.faces[i].species[j]);
          }
          if (layout.with_phi) {
            if (i == 0 && gauge_phi) {
              r[layout.phi_index(i)] =
                  (u[layout.phi_index(i)] - potential_at(opts, col.grid.x_center(0))) *
                  charge_scale(m);
            } else {
              double q = 0.0;
              for (std::size_t j = 0; j < n; ++j) {
                q += m.species()[j].charge * u[layout.mass_index(i, j)];
              }
              r[layout.phi_index(i)] = q / zs;
            }
          }
        }
        return r;
      };
      Eigen::VectorXd scale = Eigen::VectorXd::Constant(layout.size(), mass_scale);
      if (layout.with_phi) {
        for (std::size_t i = 0; i < nc; ++i) scale[layout.phi_index(i)] = 1.0;
      }
      const NewtonOutcome res = newton_solve(residual, u_old, layout,
                                             opts.newton_tolerance * mass_scale,
                                             opts.newton_max_iterations, scale);
      last_history = res.history;
      if (res.converged) {
        next = rebuild_column(col, m, opts, layout, res.solution);
        rep.newton_iterations = res.iterations;
        rep.dt_used = dt_try;
        rep.rejections = rej;
        break;
      }
      if (rej == opts.max_step_rejections) {
        throw SolverError("step: implicit Newton failed after " + std::to_string(rej) +
                              " dt halvings",
                          last_history);
      }
      dt_try *= 0.5;
    }
  }

  next.time = col.time + rep.dt_used;
  rep.total_species_mass = total_species_mass(next);
  rep.max_abs_flux = max_abs_velocity(compute_fluxes(next, m, coeffs));
  return {next, rep};
}

ColumnState solve_equilibrium(const ColumnState& col, const ConstitutiveModel& m,
                              const flowlaws::FlowCoefficients& coeffs,
                              const EquilibriumOptions& eopts) {
  col.validate(m.species_count());
  validate_reservoir_neutrality(col, m);
  if (col.left.kind != BoundaryCondition::Kind::Reservoir &&
      col.right.kind != BoundaryCondition::Kind::Reservoir) {
    throw PreconditionError("solve_equilibrium: at least one reservoir boundary required");
  }
  const std::size_t nc = col.cells.size();
  const std::size_t n = m.species_count();
  const SimOptions& opts = eopts.sim;
  if (opts.electroneutrality) require_ion_mobility(m, coeffs);
  Unknowns layout{nc, n, opts.electroneutrality};
  const double zs = charge_scale(m);

  const bool gauge_phi =
      layout.with_phi && col.left.kind == BoundaryCondition::Kind::NoFlux &&
      col.right.kind == BoundaryCondition::Kind::NoFlux;
  auto build = [&](const Eigen::VectorXd& u) { return rebuild_column(col, m, opts, layout, u); };
  auto residual = [&](const Eigen::VectorXd& u) {
    const ColumnState trial = build(u);
    const ColumnFluxes f = compute_fluxes(trial, m, coeffs);
    Eigen::VectorXd r(layout.size());
    for (std::size_t i = 0; i < nc; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        r[layout.mass_index(i, j)] = f.faces[i + 1].species[j] - f.faces[i].species[j];
      }
      if (layout.with_phi) {
        if (i == 0 && gauge_phi) {
          r[layout.phi_index(i)] =
              (u[layout.phi_index(i)] - potential_at(opts, col.grid.x_center(0))) *
              charge_scale(m);
        } else {
          double q = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            q += m.species()[j].charge * u[layout.mass_index(i, j)];
          }
          r[layout.phi_index(i)] = q / zs;
        }
      }
    }
    return r;
  };

  Eigen::VectorXd u = pack_column(col, layout);
  double mass_scale = u.lpNorm<Eigen::Infinity>();
  Eigen::VectorXd scale = Eigen::VectorXd::Constant(layout.size(), mass_scale);
  if (layout.with_phi) {
    for (std::size_t i = 0; i < nc; ++i) scale[layout.phi_index(i)] = 1.0;
  }

  std::ostringstream hist;
  for (int round = 0; round < eopts.max_iterations; ++round) {
    const ColumnState now = build(u);
    const double maxv = max_abs_velocity(compute_fluxes(now, m, coeffs));
    hist << "round " << round << " max|v| " << maxv << "\n";
    if (maxv <= eopts.velocity_tolerance) {
      ColumnState out = now;
      out.time = col.time;
      return out;
    }
    // one damped Newton iteration on the divergence residual
    const NewtonOutcome res = newton_solve(residual, u, layout, 0.0, 1, scale);
    if ((res.solution - u).lpNorm<Eigen::Infinity>() == 0.0) {
      throw SolverError("solve_equilibrium: stalled before reaching the flux tolerance",
                        hist.str() + res.history);
    }
    u = res.solution;
  }
  throw SolverError("solve_equilibrium: no convergence", hist.str());
}

}  // namespace swellflow::sim
