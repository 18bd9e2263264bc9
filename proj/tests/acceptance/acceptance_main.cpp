// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failed criteria.  Every tolerance is pinned here, in code.
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "swellflow/config.hpp"
#include "swellflow/csv.hpp"
#include "swellflow/identities.hpp"
#include "swellflow/scenarios.hpp"
#include "swellflow/simulator.hpp"
#include "swellflow/thermo.hpp"

using namespace swellflow;
namespace fl = swellflow::flowlaws;
namespace id = swellflow::identities;
namespace th = swellflow::thermo;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.c_str());
  if (!pass) ++g_failures;
}

double rel(double a, double b) {
  const double den = std::max(std::abs(a), std::abs(b));
  return den == 0.0 ? 0.0 : std::abs(a - b) / den;
}

double vrel(const fl::Vec3& a, const fl::Vec3& b) {
  const double den = std::max(a.norm(), b.norm());
  return den == 0.0 ? 0.0 : (a - b).norm() / den;
}

// relative agreement of two driving forces, measured against the larger of
// the totals and a small fraction of the term magnitudes (a path point can
// sit near a force balance where the raw totals nearly vanish)
double force_rel(const fl::DrivingForce& a, const fl::DrivingForce& b) {
  const double scale = a.pressure.norm() + a.swelling.norm() + a.lorentz.norm() +
                       a.hydration.norm() + a.concentration.norm();
  const double den = std::max({a.total.norm(), b.total.norm(), 1e-2 * scale});
  return den == 0.0 ? 0.0 : (a.total - b.total).norm() / den;
}

fl::FlowCoefficients plain_coeffs(std::size_t n, double r = 1e9) {
  fl::FlowCoefficients c;
  c.resistivity = fl::Mat3::Identity() * r;
  c.fick_mobility.assign(n, fl::Mat3::Zero());
  c.hydration_coeff.assign(n, 0.0);
  return c;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// --------------------------------------------------------------- criterion 1

void criterion_1() {
  const std::size_t states_n = 100;
  const std::uint64_t seed = 42;
  double worst_alg = 0.0, worst_fd = 0.0;
  bool pass = true;
  std::string note;

  const SyntheticPolynomialModel p1(default_species_table(3));
  const IdealIncompressibleSolutionModel p2(default_species_table(3));
  const ExponentialSwellingModel p3(default_species_table(3));
  const std::vector<const ConstitutiveModel*> presets = {&p1, &p2, &p3};

  for (const ConstitutiveModel* m : presets) {
    const auto states = id::sample_states(*m, states_n, seed);
    for (auto idn : id::all_identities()) {
      if (!id::identity_applicable(idn, *m)) continue;  // A62 needs the incompressible family
      const auto rep = id::verify_identity(idn, *m, states);
      pass = pass && rep.pass;
      if (rep.tolerance <= 1e-10) {
        worst_alg = std::max(worst_alg, rep.max_rel_error);
      } else {
        worst_fd = std::max(worst_fd, rep.max_rel_error);
      }
      if (!rep.pass) {
        note += " " + id::identity_name(idn) + "@" + m->name() + "=" +
                format_double(rep.max_rel_error);
      }
    }
    // pressure split identity, algebraic tier
    for (const auto& s : states) {
      const auto dec = th::pressure_decomposition(*m, s);
      const double p = th::liquid_pressure(*m, s);
      const double scale = std::max(
          {std::abs(p), std::abs(dec.classical_pressure) + std::abs(dec.swelling_pressure)});
      const double err = scale == 0.0 ? 0.0 : std::abs(dec.total - p) / scale;
      worst_alg = std::max(worst_alg, err);
      pass = pass && err < 1e-10;
    }
  }
  report(1, "identity suite on P1-P3, 100 seeded states", pass,
         "algebraic max " + format_double(worst_alg) + " < 1e-10, FD max " +
             format_double(worst_fd) + " < 1e-6" + note);
}

// --------------------------------------------------------------- criterion 2

MixtureState random_base(std::mt19937_64& rng, std::size_t n) {
  MixtureState s;
  s.temperature = 280.0 + 60.0 * uniform01(rng);
  s.volume_fraction = 0.25 + 0.5 * uniform01(rng);
  s.partial_densities.resize(n);
  for (double& r : s.partial_densities) r = 150.0 + 1200.0 * uniform01(rng);
  return s;
}

void criterion_2() {
  std::mt19937_64 rng(42);
  double worst_pairwise = 0.0, worst_bulk = 0.0, worst_single = 0.0;

  // 50 consistent paths: alternate charged/no-hydration with neutral/hydration
  for (int k = 0; k < 50; ++k) {
    auto species = default_species_table(3);
    const bool charged = k % 2 == 0;
    if (charged) {
      species[0].charge = 100.0 + 200.0 * uniform01(rng);
      species[1].charge = -(50.0 + 150.0 * uniform01(rng));
    }
    const SyntheticPolynomialModel model(species);
    PathConfig pc;
    pc.density_amplitude = 0.01 + 0.02 * uniform01(rng);
    pc.eps_amplitude = 0.02 + 0.04 * uniform01(rng);
    pc.phi_amplitude = charged ? 0.01 : 0.0;
    auto coeffs = plain_coeffs(3);
    if (!charged) {
      coeffs.hydration_coeff = {1.0 + uniform01(rng), uniform01(rng), 0.5};
      coeffs.fick_mobility.assign(3, fl::Mat3::Identity() * (-1e-6));
    }
    const auto path = scenarios::synthetic_path(random_base(rng, 3), pc);
    const double x = 0.1 + 0.8 * uniform01(rng);
    const MixtureState s = path(x);
    const auto g = fl::gradients_from_state_path(model, path, x, 0.002);
    const auto fp = fl::rhs(fl::Formulation::Pressure, model, s, g, coeffs);
    const auto fg = fl::rhs(fl::Formulation::Gibbs, model, s, g, coeffs);
    const auto fpot = fl::rhs(fl::Formulation::Potential, model, s, g, coeffs);
    worst_pairwise = std::max(
        {worst_pairwise, force_rel(fp, fg), force_rel(fg, fpot), force_rel(fp, fpot)});
  }

  // bulk form on the normalization surface, incompressible species
  for (int k = 0; k < 10; ++k) {
    const IncompressibleParams soft{kStandardPressure, 1e5, {}};
    const IdealIncompressibleSolutionModel model(default_species_table(3), soft);
    const auto ref = *model.bulk_reference();
    const double a0 = 40.0 + 60.0 * uniform01(rng);
    const double a1 = 60.0 + 80.0 * uniform01(rng);
    const double ph0 = 6.0 * uniform01(rng), ph1 = 6.0 * uniform01(rng),
                 ph2 = 6.0 * uniform01(rng);
    fl::StatePath path = [=](double x) {
      const double kx = 2.0 * M_PI * x;
      MixtureState s;
      s.temperature = 298.15;
      s.partial_densities = {a0 * (1.0 + 0.1 * std::sin(kx + ph0)),
                             a1 * (1.0 + 0.08 * std::sin(kx + ph1)),
                             1150.0 + 40.0 * std::sin(kx + ph2)};
      const auto sp = default_species_table(3);
      double filled = 0.0;
      for (std::size_t j = 0; j < 3; ++j) filled += s.partial_densities[j] / sp[j].specific_density;
      s.volume_fraction = 1.0 / filled;
      return s;
    };
    const double x = 0.1 + 0.8 * uniform01(rng);
    const MixtureState s = path(x);
    const auto g = fl::gradients_from_state_path(model, path, x, 0.001, &ref);
    const auto fpot = fl::rhs(fl::Formulation::Potential, model, s, g, plain_coeffs(3));
    const auto fbulk = fl::rhs(fl::Formulation::Bulk, model, s, g, plain_coeffs(3));
    worst_bulk = std::max(worst_bulk, force_rel(fpot, fbulk));
  }

  // single-component pressure form against the bulk-pressure form
  for (int k = 0; k < 10; ++k) {
    const ExponentialSwellingModel model(default_species_table(1),
                                         {kStandardPressure, 1e6, {}});
    const auto ref = *model.bulk_reference();
    const double amp = 0.002 + 0.004 * uniform01(rng);
    const double ph = 6.0 * uniform01(rng);
    const double ph2 = 6.0 * uniform01(rng);
    fl::StatePath path = [=](double x) {
      MixtureState s;
      s.temperature = 298.15;
      s.partial_densities = {997.0 * (1.0 + amp * std::sin(2.0 * M_PI * x + ph))};
      s.volume_fraction = 0.5 + 0.06 * std::sin(2.0 * M_PI * x + ph2);
      return s;
    };
    const double x = 0.1 + 0.8 * uniform01(rng);
    const MixtureState s = path(x);
    const auto g = fl::gradients_from_state_path(model, path, x, 0.001, &ref);
    const auto fp = fl::rhs(fl::Formulation::Pressure, model, s, g, plain_coeffs(1));
    const auto fb = fl::rhs(fl::Formulation::SingleComponentBulk, model, s, g, plain_coeffs(1));
    worst_single = std::max(worst_single, force_rel(fp, fb));
  }

  const bool pass = worst_pairwise < 1e-8 && worst_bulk < 1e-8 && worst_single < 1e-8;
  report(2, "formulation equivalence", pass,
         "pairwise max " + format_double(worst_pairwise) + ", bulk max " +
             format_double(worst_bulk) + ", single-component max " + format_double(worst_single) +
             " < 1e-8");
}

// --------------------------------------------------------------- criterion 3

void criterion_3() {
  SpeciesSpec water{"water", 0.018, 997.0, 0.0};
  auto gap = [&](double x) {
    const double exact = th::osmotic_pressure_exact(water, 298.15, 1.0 - x);
    const double vh = th::vant_hoff(298.15, x * water.specific_density / water.molar_mass);
    return (exact - vh) / exact;
  };
  const double g1 = gap(0.01), g2 = gap(0.001);
  const bool pass = g1 < 0.01 && g2 < 0.001 && g1 > 0.0 && g2 > 0.0;
  report(3, "van't Hoff limit of the exact osmotic pressure", pass,
         "gap(x=0.01) = " + format_double(g1) + " < 1%, gap(x=0.001) = " + format_double(g2) +
             " < 0.1%");
}

// --------------------------------------------------------------- criterion 4

void criterion_4() {
  bool pass = true;
  std::string detail;
  if (th::low_swelling_pressure(101325.0, 0.0, 1.0) != 0.0) {
    pass = false;
    detail += " pi(0) != 0;";
  }
  double prev = -1.0;
  for (double r = 0.0; r <= 5.0; r += 0.1) {
    const double pi = th::low_swelling_pressure(101325.0, r, 1.0);
    if (!(pi > prev)) {
      pass = false;
      detail += " not monotone;";
      break;
    }
    prev = pi;
  }
  const double spot = rel(th::low_swelling_pressure(101325.0, 1.0, 1.0),
                          101325.0 * (std::exp(1.0) - 1.0));
  if (spot >= 1e-12) {
    pass = false;
    detail += " spot value off;";
  }

  const ExponentialSwellingModel p3(default_species_table(1));
  double worst = 0.0;
  for (double eps = 0.1; eps <= 0.9 + 1e-12; eps += 0.04) {
    MixtureState s;
    s.partial_densities = {997.0};
    s.volume_fraction = eps;
    const double expected = th::low_swelling_pressure(kStandardPressure, 1.0 - eps, eps);
    worst = std::max(worst, rel(th::swelling_pressure(p3, s), expected));
  }
  pass = pass && worst < 1e-6;
  report(4, "exponential swelling law and P3 calibration", pass,
         "spot rel " + format_double(spot) + " < 1e-12, P3 match max " + format_double(worst) +
             " < 1e-6 on eps in [0.1,0.9]" + detail);
}

// --------------------------------------------------------------- criterion 5

RunConfig threshold_config() {
  auto cfg = default_config();
  cfg.scenario.id = "threshold_sweep";
  cfg.scenario.cells = 50;
  cfg.scenario.length = 0.1;
  cfg.scenario.eps_initial = 0.5;
  cfg.scenario.eps_reference = 0.45;
  cfg.scenario.eps_saturation = 0.7;
  cfg.scenario.sweep_fractions = {0.25, 0.5, 0.75, 0.95, 1.1, 1.5};
  cfg.scenario.bulk_pressure_steps = {1.0, 10.0, 100.0};
  cfg.scenario.threshold_run_steps = 25;
  cfg.scenario.dt_initial = 0.05;
  cfg.scenario.duration = 1e9;
  return cfg;
}

void criterion_5() {
  const auto cfg = threshold_config();
  auto model = cfg.make_model();
  const auto res = scenarios::run_scenario("threshold_sweep", cfg, *model);
  bool pass = true;
  std::string detail = "capacity " + format_double(res.capacity_gradient) + " Pa/m;";

  double worst_sub = 0.0;
  double worst_oracle = 0.0;
  for (const auto& pt : res.sweep) {
    if (pt.subcritical) {
      worst_sub = std::max(worst_sub, pt.flux_final / res.reference_velocity);
      if (pt.applied > 0.5 * res.capacity_gradient) {
        worst_oracle = std::max(worst_oracle, rel(pt.applied, pt.oracle_threshold));
      }
    } else {
      if (!(pt.flux_final > 1e-3 * res.reference_velocity)) {
        pass = false;
        detail += " supercritical flux died at g=" + format_double(pt.applied) + ";";
      }
    }
  }
  if (!(worst_sub < 1e-12)) pass = false;
  if (!(worst_oracle < 2e-2)) pass = false;
  detail += " subcritical max |flux|/ref " + format_double(worst_sub) + " < 1e-12;";
  detail += " applied vs local threshold oracle rel " + format_double(worst_oracle) + " < 2e-2;";

  for (const auto& pt : res.bulk_sweep) {
    if (!(pt.flux_final > 1e-12 * res.reference_velocity)) {
      pass = false;
      detail += " bulk step " + format_double(pt.applied) + " Pa/m produced no flux;";
    }
  }
  detail += " bulk forcing flows at every step down to 10 Pa/m";
  report(5, "threshold dichotomy (vicinal vs bulk forcing)", pass, detail);
}

// --------------------------------------------------------------- criterion 6

RunConfig fig_config(const std::string& scenario) {
  auto cfg = default_config();
  cfg.scenario.id = scenario;
  cfg.scenario.cells = 50;
  cfg.scenario.length = 0.1;
  cfg.scenario.eps_initial = 0.5;
  cfg.scenario.eps_reference = 0.45;
  cfg.scenario.overburden_gradient = scenario == "fig5b" ? -1.2e5 : 0.0;
  cfg.scenario.bulk_pressure_raise = 2000.0;
  cfg.scenario.duration = scenario == "fig5a" ? 50.0 : 400.0;
  cfg.scenario.max_steps = scenario == "fig5a" ? 60 : 600;
  cfg.scenario.dt_initial = scenario == "fig5a" ? 0.5 : 0.05;
  cfg.scenario.snapshot_interval = 100.0;
  return cfg;
}

void criterion_6() {
  bool pass = true;
  std::string detail;

  {  // fig5a: no flow, ever
    const auto cfg = fig_config("fig5a");
    auto model = cfg.make_model();
    const auto res = scenarios::run_scenario("fig5a", cfg, *model);
    double worst = res.final_max_velocity;
    for (const auto& rep : res.reports) worst = std::max(worst, rep.max_abs_flux);
    if (!(worst < 1e-10 * res.reference_velocity)) pass = false;
    detail += "fig5a max |flux|/ref " + format_double(worst / res.reference_velocity) +
              " < 1e-10;";
  }
  {  // fig5b: steady, pressure gradient offset by the moisture gradient
    const auto cfg = fig_config("fig5b");
    auto model = cfg.make_model();
    const auto res = scenarios::run_scenario("fig5b", cfg, *model);
    if (!(res.final_max_velocity < 1e-10 * res.reference_velocity)) {
      pass = false;
      detail += " fig5b did not reach steady state;";
    }
    detail += " fig5b final |flux|/ref " +
              format_double(res.final_max_velocity / res.reference_velocity) + " < 1e-10;";
    const auto& col = res.final_state;
    const double p_first = th::liquid_pressure(*model, col.cells.front());
    const double p_last = th::liquid_pressure(*model, col.cells.back());
    const double expected_dp =
        cfg.scenario.overburden_gradient * (col.grid.x_center(49) - col.grid.x_center(0));
    if (!(rel(p_last - p_first, expected_dp) < 1e-6)) {
      pass = false;
      detail += " fig5b pressure gradient missing;";
    }
    // the swelling term offsets the pressure term cell by cell
    double worst_balance = 0.0;
    for (std::size_t i = 10; i < 40; ++i) {
      const auto& a = col.cells[i - 1];
      const auto& b = col.cells[i + 1];
      const double dx2 = 2.0 * col.grid.cell_width;
      const double grad_p = (th::liquid_pressure(*model, b) - th::liquid_pressure(*model, a)) / dx2;
      const double grad_eps = (b.volume_fraction - a.volume_fraction) / dx2;
      const auto& c = col.cells[i];
      const double balance = c.volume_fraction * grad_p +
                             th::swelling_pressure(*model, c) * grad_eps;
      worst_balance =
          std::max(worst_balance, std::abs(balance) / (c.volume_fraction * std::abs(grad_p)));
    }
    if (!(worst_balance < 1e-2)) {
      pass = false;
      detail += " fig5b offset balance broke;";
    }
    detail += " offset balance " + format_double(worst_balance) + " < 1e-2;";
  }
  {  // fig5c: sustained flow toward the low-potential side until flat
    const auto cfg = fig_config("fig5c");
    auto model = cfg.make_model();
    const auto res = scenarios::run_scenario("fig5c", cfg, *model);
    if (!(res.initial_max_velocity > 1e-3 * res.reference_velocity)) {
      pass = false;
      detail += " fig5c never flowed;";
    }
    double prev = res.initial_max_velocity;
    bool decayed = true;
    for (const auto& rep : res.reports) {
      decayed = decayed && rep.max_abs_flux <= prev * (1.0 + 1e-6);
      prev = rep.max_abs_flux;
    }
    if (!decayed) {
      pass = false;
      detail += " fig5c flux not declining;";
    }
    if (!(res.final_max_velocity < 1e-10 * res.reference_velocity)) {
      pass = false;
      detail += " fig5c potentials never flattened;";
    }
    // flat electrochemical potential at the raised reservoir level
    const auto mu_res = sim::reservoir_potentials(
        *model, res.final_state.left.reservoir, cfg.state.temperature);
    double worst_mu = 0.0;
    for (const auto& c : res.final_state.cells) {
      worst_mu = std::max(worst_mu,
                          std::abs(th::electrochemical_potential(*model, c, 0) - mu_res[0]));
    }
    if (!(worst_mu < 1e-8 * std::abs(mu_res[0]) + 1e-8)) {
      pass = false;
      detail += " fig5c potential not flat;";
    }
    detail += " fig5c decayed from " + format_double(res.initial_max_velocity) + " to " +
              format_double(res.final_max_velocity) + " m/s";
  }
  report(6, "reverse-osmosis cell scenarios", pass, detail);
}

// --------------------------------------------------------------- criterion 7

void criterion_7() {
  const IncompressibleParams soft{kStandardPressure, 1e6, {}};
  const IdealIncompressibleSolutionModel model(default_species_table(2), soft);
  const auto coeffs = plain_coeffs(2, 1e8);
  bool pass = true;
  std::string detail;
  for (auto mode : {sim::TimeMode::Implicit, sim::TimeMode::Explicit}) {
    sim::ColumnState col;
    col.grid = sim::ColumnGrid::uniform(20, 0.04);
    for (std::size_t i = 0; i < 20; ++i) {
      const double x = col.grid.x_center(i);
      const double c0 = 0.05 + 0.02 * std::sin(2.0 * M_PI * x / 0.04);
      const double eps = 0.45 + 0.08 * std::sin(2.0 * M_PI * x / 0.08 + 1.0);
      col.cells.push_back(scenarios::state_at_pressure_eps(model, 298.15, {c0, 1.0 - c0}, eps,
                                                           kStandardPressure));
    }
    auto mass = sim::total_species_mass(col);
    const double dt = mode == sim::TimeMode::Explicit ? 5e-4 : 0.02;
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      auto [next, rep] = sim::step(col, model, coeffs, dt, mode);
      col = std::move(next);
      for (std::size_t j = 0; j < 2; ++j) {
        worst = std::max(worst, rel(rep.total_species_mass[j], mass[j]));
      }
      mass = rep.total_species_mass;
    }
    pass = pass && worst < 1e-10;
    detail += std::string(mode == sim::TimeMode::Implicit ? "implicit" : "explicit") +
              " worst per-step drift " + format_double(worst) + " < 1e-10; ";
  }
  report(7, "species mass conservation over 1000 no-flux steps", pass, detail);
}

// --------------------------------------------------------------- criterion 8

void criterion_8() {
  bool pass = true;
  std::string detail;

  {  // homogenization-form reduction against the bulk formulation
    const IncompressibleParams soft{kStandardPressure, 1e5, {}};
    const IdealIncompressibleSolutionModel model(default_species_table(3), soft);
    const auto ref = *model.bulk_reference();
    fl::StatePath path = [](double x) {
      const double kx = 2.0 * M_PI * x;
      MixtureState s;
      s.temperature = 298.15;
      s.partial_densities = {3.0 * (1.0 + 0.1 * std::sin(kx + 0.4)),
                             4.5 * (1.0 + 0.08 * std::sin(kx + 1.3)),
                             1150.0 + 40.0 * std::sin(kx + 2.2)};
      const auto sp = default_species_table(3);
      double filled = 0.0;
      for (std::size_t j = 0; j < 3; ++j) filled += s.partial_densities[j] / sp[j].specific_density;
      s.volume_fraction = 1.0 / filled;
      return s;
    };
    double worst = 0.0;
    for (double x : {0.2, 0.5, 0.8}) {
      const MixtureState s = path(x);
      auto g = fl::gradients_from_state_path(model, path, x, 0.002, &ref);
      (*g.grad_activity)[2] = fl::Vec3::Zero();  // Raoult solvent
      (*g.bulk_activities)[2] = 1.0;
      const auto mm = fl::reduce_moyne_murad(model, s, g, fl::DiluteParams{2, 0, 1});
      const auto fb = fl::rhs(fl::Formulation::Bulk, model, s, g, plain_coeffs(3));
      worst = std::max(worst, vrel(mm.total, fb.total));
      pass = pass && mm.warnings.empty();
    }
    pass = pass && worst < 1e-8;
    detail += "homogenization form vs bulk form max " + format_double(worst) + " < 1e-8;";
  }

  {  // quadriphasic-form reduction against the potential formulation
    const auto species = default_species_table(3);
    const ExponentialSwellingModel model(species, {kStandardPressure, 1e6, {}});
    const auto ref = *model.bulk_reference();
    const double v_ion_total = 50.0 / 2160.0 + 75.0 / 2170.0;
    fl::StatePath path = [&](double x) {
      const double kx = 2.0 * M_PI * x;
      MixtureState s;
      s.temperature = 298.15;
      const double swing = 0.3 * std::sin(kx + 0.6);
      const double vp = (50.0 / 2160.0) * (1.0 + swing);
      s.partial_densities = {2160.0 * vp, 2170.0 * (v_ion_total - vp), 997.0};
      s.volume_fraction = 0.5 + 0.05 * std::sin(kx + 1.7);
      return s;
    };
    const double x0 = 0.31;
    const MixtureState s = path(x0);
    const auto g = fl::gradients_from_state_path(model, path, x0, 0.002, &ref);
    const double rho = s.total_density();
    auto grad_c = [&](std::size_t j) {
      return (s.concentration(j) * g.grad_rho[0] + rho * g.grad_conc[j][0]) /
             species[j].molar_mass;
    };
    const double RT = kGasConstant * s.temperature;
    const double phi_eff =
        -s.partial_densities[2] * g.grad_mu[2][0] / (RT * (grad_c(0) + grad_c(1)));
    const auto hj = fl::reduce_huyghe_janssen(model, s, g, phi_eff, 0.0, 0, 1, plain_coeffs(3));
    const auto fpot = fl::rhs(fl::Formulation::Potential, model, s, g, plain_coeffs(3));
    const double e1 = vrel(hj.total, fpot.total);
    pass = pass && e1 < 1e-8;
    detail += " quadriphasic form vs potential form " + format_double(e1) + " < 1e-8;";

    // pi_bar = p^l - p^B against the reservoir map, anchored at x0
    th::NewtonOptions pure;
    pure.pure_solvent = true;
    auto c_tot = [&](double x) {
      const MixtureState t = path(x);
      return t.partial_densities[0] / species[0].molar_mass +
             t.partial_densities[1] / species[1].molar_mass;
    };
    auto osmotic_gap = [&](double x) {  // (p^l - p^B) at x
      const MixtureState t = path(x);
      return th::liquid_pressure(model, t) -
             th::bulk_equilibrium_map(model, t, &ref, pure).pressure;
    };
    const double pi0 = osmotic_gap(x0) - RT * phi_eff * c_tot(x0);
    const double gap_scale = std::abs(osmotic_gap(x0));
    double worst_pi = 0.0;
    for (double x : {x0 - 3e-4, x0, x0 + 3e-4}) {
      const double pi_bar =
          fl::huyghe_janssen_osmotic_pressure(s.temperature, phi_eff, c_tot(x), 0.0, pi0);
      worst_pi = std::max(worst_pi, std::abs(pi_bar - osmotic_gap(x)) / gap_scale);
    }
    pass = pass && worst_pi < 1e-8;
    detail += " pi_bar vs p^l - p^B via the map " + format_double(worst_pi) + " < 1e-8";
  }
  report(8, "model reductions", pass, detail);
}

}  // namespace

int main() {
  try {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
  } catch (const SolverError& e) {
    std::printf("FAIL: unexpected solver error: %s\n%s\n", e.what(), e.history().c_str());
    return 99;
  } catch (const std::exception& e) {
    std::printf("FAIL: unexpected error: %s\n", e.what());
    return 99;
  }
  std::printf("%d of 8 criteria passed\n", 8 - g_failures);
  return g_failures;
}
