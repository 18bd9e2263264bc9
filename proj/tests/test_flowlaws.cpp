#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "swellflow/finite_difference.hpp"
#include "swellflow/flowlaws.hpp"
#include "swellflow/scenarios.hpp"
#include "test_support.hpp"

using namespace swellflow;
using namespace swellflow::testing;
namespace fl = swellflow::flowlaws;
namespace th = swellflow::thermo;

namespace {

fl::FlowCoefficients unit_coeffs(std::size_t n, double r = 1e9) {
  fl::FlowCoefficients c;
  c.resistivity = fl::Mat3::Identity() * r;
  c.fick_mobility.assign(n, fl::Mat3::Zero());
  c.hydration_coeff.assign(n, 0.0);
  return c;
}

fl::LocalGradients zero_gradients(std::size_t n) {
  fl::LocalGradients g;
  g.grad_conc.assign(n, fl::Vec3::Zero());
  g.grad_mu.assign(n, fl::Vec3::Zero());
  return g;
}

double vec_rel_diff(const fl::Vec3& a, const fl::Vec3& b) {
  const double den = std::max(a.norm(), b.norm());
  return den == 0.0 ? 0.0 : (a - b).norm() / den;
}

}  // namespace

TEST_CASE("rhs: all gradients zero gives zero total in every formulation") {
  IncompressibleParams soft;
  soft.bulk_modulus = 1e5;
  const auto model = make_p2(1, soft);
  // state on the bulk-form normalization surface: eps rho / rho0 = 1
  MixtureState s = single_state(2.0 * 997.0, 0.5);
  auto g = zero_gradients(1);
  g.grad_bulk_pressure = fl::Vec3::Zero();
  g.grad_activity = std::vector<fl::Vec3>{fl::Vec3::Zero()};
  g.bulk_pressure = kStandardPressure;
  g.bulk_activities = std::vector<double>{1.0};
  const auto coeffs = unit_coeffs(1);
  for (auto f : {fl::Formulation::Pressure, fl::Formulation::Gibbs, fl::Formulation::Potential,
                 fl::Formulation::Bulk, fl::Formulation::SingleComponentBulk}) {
    const auto force = fl::rhs(f, model, s, g, coeffs);
    CHECK(force.total.norm() == 0.0);
  }
}

TEST_CASE("rhs: missing bulk inputs name the formulation") {
  const auto model = make_p2(1);
  const auto s = single_state(997.0, 0.5);
  const auto g = zero_gradients(1);
  try {
    fl::rhs(fl::Formulation::Bulk, model, s, g, unit_coeffs(1));
    FAIL("expected PreconditionError");
  } catch (const PreconditionError& e) {
    CHECK(std::string(e.what()).find("BulkForm") != std::string::npos);
  }
}

TEST_CASE("rhs: breakdown sums to total exactly") {
  const auto model = make_p1();
  const auto s = triple_state(300.0, 500.0, 900.0, 0.4);
  auto g = zero_gradients(3);
  g.grad_p = fl::xvec(2.0e4);
  g.grad_eps = fl::xvec(-0.05);
  g.grad_mu = {fl::xvec(10.0), fl::xvec(-4.0), fl::xvec(2.0)};
  g.grad_conc = {fl::xvec(0.01), fl::xvec(-0.004), fl::xvec(-0.006)};
  g.grad_gibbs = fl::xvec(5.0);
  g.electric_field = fl::xvec(1.0);
  auto coeffs = unit_coeffs(3);
  coeffs.hydration_coeff = {2.0, 1.0, 0.5};
  coeffs.fick_mobility.assign(3, fl::Mat3::Identity() * 1e-7);
  for (auto f : {fl::Formulation::Pressure, fl::Formulation::Gibbs, fl::Formulation::Potential}) {
    const auto force = fl::rhs(f, model, s, g, coeffs);
    const fl::Vec3 sum =
        force.pressure + force.swelling + force.lorentz + force.hydration + force.concentration;
    CHECK((force.total - sum).norm() == 0.0);
  }
}

TEST_CASE("velocity: zero force, scalar resistivity, and SPD residual") {
  auto coeffs = unit_coeffs(1, 4.0);
  fl::DrivingForce f;
  CHECK(fl::velocity(coeffs, f).norm() == 0.0);
  f.total = fl::Vec3(8.0, -2.0, 6.0);
  CHECK(vec_rel_diff(fl::velocity(coeffs, f), f.total / 4.0) < 1e-15);

  std::mt19937_64 rng(3);
  auto u = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5; };
  for (int k = 0; k < 5; ++k) {
    fl::Mat3 a;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) a(i, j) = u();
    coeffs.resistivity = a * a.transpose() + 0.5 * fl::Mat3::Identity();
    f.total = fl::Vec3(u(), u(), u()) * 1e5;
    const fl::Vec3 v = fl::velocity(coeffs, f);
    CHECK((coeffs.resistivity * v - f.total).norm() < 1e-10 * f.total.norm());
  }
}

TEST_CASE("velocity: non-SPD resistivity is rejected") {
  auto coeffs = unit_coeffs(1);
  coeffs.resistivity = -fl::Mat3::Identity();
  fl::DrivingForce f;
  f.total = fl::Vec3(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(fl::velocity(coeffs, f), PreconditionError);
}

TEST_CASE("threshold gradient: magnitude and exact offset of the pressure form") {
  const auto p2 = make_p2(1);
  CHECK(fl::threshold_gradient(p2, single_state(997.0, 0.5), fl::xvec(0.1)) == 0.0);

  const auto model = make_p3();
  const auto s = single_state(997.0, 0.5);
  const double pi = th::swelling_pressure(model, s);
  CHECK(pi > 0.0);
  // pi = 1e5 Pa, |grad eps| = 0.1/m, eps = 0.5 -> 2e4 Pa/m
  CHECK(rel_diff(fl::threshold_gradient(model, s, fl::xvec(0.1)) * (1e5 / pi), 2.0e4) < 1e-12);

  // an opposing pressure gradient exactly at the threshold kills the force
  const double thr = fl::threshold_gradient(model, s, fl::xvec(-0.1));
  auto g = zero_gradients(1);
  g.grad_eps = fl::xvec(-0.1);
  g.grad_p = fl::xvec(thr);
  const auto at = fl::rhs(fl::Formulation::Pressure, model, s, g, unit_coeffs(1));
  CHECK(at.total.norm() < 1e-12 * (s.volume_fraction * thr));
  g.grad_p = fl::xvec(1.25 * thr);
  const auto beyond = fl::rhs(fl::Formulation::Pressure, model, s, g, unit_coeffs(1));
  CHECK(beyond.total.norm() > 0.2 * s.volume_fraction * thr);
}

// ---------------------------------------------------------------------------

TEST_CASE("formulation equivalence on consistent paths (P1, charged, no hydration)") {
  auto species = default_species_table(3);
  species[0].charge = 200.0;
  species[1].charge = -120.0;
  const SyntheticPolynomialModel model(species);
  PathConfig pc;
  pc.phi_amplitude = 0.01;
  MixtureState base = triple_state(250.0, 420.0, 950.0, 0.5);
  const auto path = scenarios::synthetic_path(base, pc);
  const auto coeffs = unit_coeffs(3);
  for (double x : {0.1, 0.37, 0.62, 0.85}) {
    const MixtureState s = path(x);
    const auto g = fl::gradients_from_state_path(model, path, x, 0.002);
    const auto fp = fl::rhs(fl::Formulation::Pressure, model, s, g, coeffs);
    const auto fg = fl::rhs(fl::Formulation::Gibbs, model, s, g, coeffs);
    const auto fpot = fl::rhs(fl::Formulation::Potential, model, s, g, coeffs);
    CHECK(vec_rel_diff(fp.total, fg.total) < 1e-8);
    CHECK(vec_rel_diff(fg.total, fpot.total) < 1e-8);
    CHECK(vec_rel_diff(fp.total, fpot.total) < 1e-8);
  }
}

TEST_CASE("formulation equivalence with hydration terms (neutral species)") {
  const auto model = make_p1();
  PathConfig pc;
  MixtureState base = triple_state(300.0, 500.0, 1000.0, 0.45);
  const auto path = scenarios::synthetic_path(base, pc);
  auto coeffs = unit_coeffs(3);
  coeffs.hydration_coeff = {3.0, 2.0, 1.0};
  coeffs.fick_mobility.assign(3, fl::Mat3::Identity() * (-1e-6));
  for (double x : {0.21, 0.55}) {
    const MixtureState s = path(x);
    const auto g = fl::gradients_from_state_path(model, path, x, 0.002);
    const auto fp = fl::rhs(fl::Formulation::Pressure, model, s, g, coeffs);
    const auto fpot = fl::rhs(fl::Formulation::Potential, model, s, g, coeffs);
    CHECK(vec_rel_diff(fp.total, fpot.total) < 1e-8);
  }
}

namespace {

/// 3-species path on the bulk-form normalization surface
/// (eps = 1 / sum_j rho^j/rho0^j), soft stiffness for sane pressures.
struct BulkPathFixture {
  IncompressibleParams soft;
  IdealIncompressibleSolutionModel model;
  fl::StatePath path;
  BulkReference ref;

  explicit BulkPathFixture(double ion_scale = 60.0)
      : soft{kStandardPressure, 1e5, {}},
        model(default_species_table(3), soft),
        ref(*model.bulk_reference()) {
    path = [ion_scale](double x) {
      const double k = 2.0 * M_PI;
      MixtureState s;
      s.temperature = 298.15;
      s.partial_densities = {ion_scale * (1.0 + 0.1 * std::sin(k * x + 0.4)),
                             1.5 * ion_scale * (1.0 + 0.08 * std::sin(k * x + 1.3)),
                             1150.0 + 40.0 * std::sin(k * x + 2.2)};
      const auto species = default_species_table(3);
      double filled = 0.0;
      for (std::size_t j = 0; j < 3; ++j) {
        filled += s.partial_densities[j] / species[j].specific_density;
      }
      s.volume_fraction = 1.0 / filled;
      return s;
    };
  }
};

}  // namespace

TEST_CASE("bulk formulation matches the potential formulation on the map") {
  BulkPathFixture fix;
  auto coeffs = unit_coeffs(3);
  coeffs.hydration_coeff = {1.5, 0.7, 0.2};
  coeffs.fick_mobility.assign(3, fl::Mat3::Identity() * (-2e-7));
  for (double x : {0.18, 0.46, 0.73}) {
    const MixtureState s = fix.path(x);
    const auto g = fl::gradients_from_state_path(fix.model, fix.path, x, 0.002, &fix.ref);
    const auto fpot = fl::rhs(fl::Formulation::Potential, fix.model, s, g, coeffs);
    const auto fbulk = fl::rhs(fl::Formulation::Bulk, fix.model, s, g, coeffs);
    CHECK(vec_rel_diff(fpot.total, fbulk.total) < 1e-8);
  }
}

TEST_CASE("bulk formulation asserts the volume normalization precondition") {
  BulkPathFixture fix;
  MixtureState s = fix.path(0.3);
  s.volume_fraction *= 0.9;  // off the normalization surface
  auto g = fl::gradients_from_state_path(fix.model, fix.path, 0.3, 0.002, &fix.ref);
  CHECK_THROWS_AS(fl::rhs(fl::Formulation::Bulk, fix.model, s, g, unit_coeffs(3)),
                  PreconditionError);
}

TEST_CASE("single-component bulk form matches the pressure form") {
  const auto model = make_p3(1, IncompressibleParams{kStandardPressure, 1e6, {}});
  const auto ref = *model.bulk_reference();
  fl::StatePath path = [](double x) {
    const double k = 2.0 * M_PI;
    MixtureState s;
    s.temperature = 298.15;
    s.partial_densities = {997.0 * (1.0 + 0.004 * std::sin(k * x + 0.8))};
    s.volume_fraction = 0.5 + 0.06 * std::sin(k * x + 1.9);
    return s;
  };
  const auto coeffs = unit_coeffs(1);
  for (double x : {0.11, 0.52, 0.77}) {
    const MixtureState s = path(x);
    const auto g = fl::gradients_from_state_path(model, path, x, 0.002, &ref);
    const auto fp = fl::rhs(fl::Formulation::Pressure, model, s, g, coeffs);
    const auto fb = fl::rhs(fl::Formulation::SingleComponentBulk, model, s, g, coeffs);
    CHECK(vec_rel_diff(fp.total, fb.total) < 1e-8);
  }
}

// ---------------------------------------------------------------------------

TEST_CASE("Moyne-Murad reduction") {
  BulkPathFixture fix(3.0);  // dilute ions
  const fl::DiluteParams dp{2, 0, 1};
  const double x0 = 0.42;
  const MixtureState s = fix.path(x0);
  auto g = fl::gradients_from_state_path(fix.model, fix.path, x0, 0.002, &fix.ref);

  SUBCASE("zero ion-activity gradients collapse to the bulk pressure term") {
    auto gz = g;
    (*gz.grad_activity)[0] = fl::Vec3::Zero();
    (*gz.grad_activity)[1] = fl::Vec3::Zero();
    const auto mm = fl::reduce_moyne_murad(fix.model, s, gz, dp);
    CHECK(vec_rel_diff(mm.total, -*gz.grad_bulk_pressure) < 1e-14);
  }

  SUBCASE("matched inputs agree with the bulk formulation") {
    auto gm = g;
    (*gm.grad_activity)[2] = fl::Vec3::Zero();  // Raoult solvent: a^w = 1, grad a^w = 0
    (*gm.bulk_activities)[2] = 1.0;
    const auto mm = fl::reduce_moyne_murad(fix.model, s, gm, dp);
    const auto fb = fl::rhs(fl::Formulation::Bulk, fix.model, s, gm, unit_coeffs(3));
    CHECK(vec_rel_diff(mm.total, fb.total) < 1e-8);
    CHECK(mm.warnings.empty());
  }

  SUBCASE("ideal-map activity terms cancel by the composition constraint") {
    // with activities equal to the mole fractions, sum_j grad x^j = 0 makes
    // the full activity sum vanish; the bulk form is pressure-driven only
    const auto fb = fl::rhs(fl::Formulation::Bulk, fix.model, s, g, unit_coeffs(3));
    CHECK(vec_rel_diff(fb.total, fb.pressure) < 1e-6);
  }

  SUBCASE("non-dilute state is annotated, not rejected") {
    BulkPathFixture salty(400.0);
    const MixtureState ss = salty.path(x0);
    auto gs = fl::gradients_from_state_path(salty.model, salty.path, x0, 0.002, &salty.ref);
    const auto mm = fl::reduce_moyne_murad(salty.model, ss, gs, dp);
    CHECK(!mm.warnings.empty());
  }
}

TEST_CASE("Moyne-Murad apparent bulk pressure gradient absorbs the Lorentz term") {
  const fl::Vec3 gp = fl::xvec(1.2e4);
  const fl::Vec3 E = fl::xvec(50.0);
  const double qe = 3.5;
  CHECK((fl::moyne_murad_bulk_pressure_gradient(gp, qe, E) - (gp - qe * E)).norm() == 0.0);
}

TEST_CASE("Huyghe-Janssen osmotic closure arithmetic") {
  CHECK(rel_diff(fl::huyghe_janssen_osmotic_pressure(300.0, 1.0, 1.0, 1.0, 0.0), 4988.4) < 1e-4);
  CHECK(fl::huyghe_janssen_osmotic_pressure(300.0, 1.0, 0.0, 0.0, 0.0) == 0.0);
  CHECK(fl::huyghe_janssen_osmotic_pressure(300.0, 0.93, 0.0, 0.0, 250.0) == 250.0);
}

TEST_CASE("Huyghe-Janssen reduction: no ions means plain pressure-driven flow") {
  const auto model = make_p2(3, IncompressibleParams{kStandardPressure, 1e5, {}});
  const auto s = triple_state(40.0, 60.0, 1100.0, 0.6);
  auto g = zero_gradients(3);
  g.grad_p = fl::xvec(3.0e4);
  const auto hj = fl::reduce_huyghe_janssen(model, s, g, 1.0, 0.0, 0, 1, unit_coeffs(3));
  CHECK(vec_rel_diff(hj.total, -s.volume_fraction * g.grad_p) < 1e-14);
}

TEST_CASE("Huyghe-Janssen reduction matches the potential form under its assumptions") {
  // water held at its specific density, ion volumes trading at constant
  // total, moisture varying: the incompressible potentials and the swelling
  // term then close the modified van't Hoff form exactly with the tangent
  // osmotic coefficient, and the net force is the nonzero swelling drive
  const auto species = default_species_table(3);
  const ExponentialSwellingModel model(species, {kStandardPressure, 1e6, {}}, {});
  const auto ref = *model.bulk_reference();
  const double v_ion_total = 50.0 / 2160.0 + 75.0 / 2170.0;
  fl::StatePath path = [&](double x) {
    const double k = 2.0 * M_PI;
    MixtureState s;
    s.temperature = 298.15;
    const double swing = 0.3 * std::sin(k * x + 0.6);
    const double vp = (50.0 / 2160.0) * (1.0 + swing);
    const double vm = v_ion_total - vp;
    s.partial_densities = {2160.0 * vp, 2170.0 * vm, 997.0};
    s.volume_fraction = 0.5 + 0.05 * std::sin(k * x + 1.7);
    return s;
  };
  const double x0 = 0.31;
  const MixtureState s = path(x0);
  const auto g = fl::gradients_from_state_path(model, path, x0, 0.002, &ref);

  // tangent osmotic coefficient from the same consistent gradients the
  // reduction consumes: R T phi grad(c+ + c-) = -rho_w grad mu_w
  const double rho = s.total_density();
  const double rho_w = s.partial_densities[2];
  auto grad_c = [&](std::size_t j) {
    return (s.concentration(j) * g.grad_rho[0] + rho * g.grad_conc[j][0]) /
           species[j].molar_mass;
  };
  const double RT = kGasConstant * s.temperature;
  const double phi_eff = -rho_w * g.grad_mu[2][0] / (RT * (grad_c(0) + grad_c(1)));

  const auto hj = fl::reduce_huyghe_janssen(model, s, g, phi_eff, 0.0, 0, 1, unit_coeffs(3));
  const auto fpot = fl::rhs(fl::Formulation::Potential, model, s, g, unit_coeffs(3));
  CHECK(fpot.total.norm() > 1e3);  // swelling drive, not a degenerate zero
  CHECK(vec_rel_diff(hj.total, fpot.total) < 1e-8);

  // grad(p - pi_bar) equals the reservoir pressure gradient of the
  // pure-solvent map (the HJ bulk pressure); pi0 only shifts the level
  th::NewtonOptions pure;
  pure.pure_solvent = true;
  auto pB = [&](double x) {
    return th::bulk_equilibrium_map(model, path(x), &ref, pure).pressure;
  };
  auto c_tot = [&](double x) {
    const MixtureState t = path(x);
    return t.partial_densities[0] / species[0].molar_mass +
           t.partial_densities[1] / species[1].molar_mass;
  };
  const FdOptions wide{.rel_step = 0.0, .abs_step = 2e-3};
  const double grad_pB = central_derivative(pB, x0, wide);
  auto p_minus_pi = [&](double x) {
    return th::liquid_pressure(model, path(x)) -
           fl::huyghe_janssen_osmotic_pressure(s.temperature, phi_eff, c_tot(x), 0.0, 0.0);
  };
  const double grad_lhs = central_derivative(p_minus_pi, x0, wide);
  CHECK(rel_diff(grad_lhs, grad_pB) < 1e-6);

  // velocity convention: eps v = -K [bracket] with K = eps^2 R^{-1}
  const auto v = fl::velocity(unit_coeffs(3), fpot);
  const fl::Vec3 bracket = -hj.total / s.volume_fraction;
  const fl::Vec3 eps_v_direct = s.volume_fraction * v;
  const fl::Vec3 eps_v_hj = -(s.volume_fraction * s.volume_fraction / 1e9) * bracket;
  CHECK(vec_rel_diff(eps_v_direct, eps_v_hj) < 1e-8);
}

TEST_CASE("two-point gradients match the smooth-path gradients to first order") {
  const auto model = make_p1();
  PathConfig pc;
  MixtureState base = triple_state(300.0, 500.0, 1000.0, 0.45);
  const auto path = scenarios::synthetic_path(base, pc);
  const double x = 0.4, h = 1e-4;
  const auto pair = fl::gradients_from_state_pair(model, path(x - h), path(x + h), 2.0 * h);
  const auto smooth = fl::gradients_from_state_path(model, path, x, 0.002);
  CHECK(vec_rel_diff(pair.grad_p, smooth.grad_p) < 1e-6);
  CHECK(vec_rel_diff(pair.grad_mu[0], smooth.grad_mu[0]) < 1e-6);
  CHECK(vec_rel_diff(pair.grad_eps, smooth.grad_eps) < 1e-6);
}
