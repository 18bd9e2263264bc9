#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "swellflow/identities.hpp"
#include "swellflow/thermo.hpp"
#include "test_support.hpp"

using namespace swellflow;
using namespace swellflow::testing;
namespace id = swellflow::identities;

TEST_CASE("fd_partial: quadratic in a single density coordinate") {
  // f(state) = (rho^0)^2 at rho^0 = 3 -> derivative 6
  MixtureState s;
  s.partial_densities = {3.0};
  s.volume_fraction = 0.5;
  const auto r = id::fd_partial(
      [](const MixtureState& t) {
        return t.partial_densities[0] * t.partial_densities[0];
      },
      id::StateVariable::PartialDensity, 0, s);
  CHECK(std::abs(r.value - 6.0) < 1e-10);
  CHECK(r.truncation_estimate >= 0.0);
}

TEST_CASE("fd_partial: tilde-density derivative of P1 matches the analytic value") {
  const auto model = make_p1();
  for (double rho : {400.0, 800.0, 1200.0, 1600.0}) {
    const auto s = triple_state(0.3 * rho, 0.2 * rho, 0.5 * rho, 0.45, 310.0);
    const auto r = id::fd_partial([&](const MixtureState& t) { return model.psi(t); },
                                  id::StateVariable::TotalDensityFixedConcentration, 0, s);
    CHECK(rel_diff(r.value, *model.psi_tilde_rho_partial(s)) < 1e-8);
  }
}

TEST_CASE("fd_partial: the two holding-fixed families give different derivatives") {
  // d psi / d rho^0 at fixed other densities vs d psi~ / d rho at fixed
  // concentrations must differ whenever psi depends on composition
  const auto model = make_p1();
  const auto s = triple_state(300.0, 500.0, 900.0, 0.4);
  const auto direct = id::fd_partial([&](const MixtureState& t) { return model.psi(t); },
                                     id::StateVariable::PartialDensity, 0, s);
  const auto tilde = id::fd_partial([&](const MixtureState& t) { return model.psi(t); },
                                    id::StateVariable::TotalDensityFixedConcentration, 0, s);
  CHECK(std::abs(direct.value - tilde.value) >
        1e-3 * std::max(std::abs(direct.value), std::abs(tilde.value)));
}

TEST_CASE("fd_partial: impossible step at the domain boundary errors out") {
  const auto model = make_p1();
  auto s = triple_state(300.0, 500.0, 900.0, 1.0);  // eps pinned at its maximum
  CHECK_THROWS_AS(id::fd_partial([&](const MixtureState& t) { return model.psi(t); },
                                 id::StateVariable::VolumeFraction, 0, s),
                  DomainError);
}

TEST_CASE("fd_partial: shrinks the step near the boundary and still answers") {
  const auto model = make_p1();
  auto s = triple_state(300.0, 500.0, 900.0, 0.9999999);
  const auto r = id::fd_partial([&](const MixtureState& t) { return model.psi(t); },
                                id::StateVariable::VolumeFraction, 0, s,
                                FdOptions{.rel_step = 1e-3, .abs_step = 1e-3});
  CHECK(rel_diff(r.value, *model.psi_eps_partial(s)) < 1e-5);
}

TEST_CASE("sampling is reproducible and in range") {
  const auto model = make_p1();
  const auto a = id::sample_states(model, 20, 99);
  const auto b = id::sample_states(model, 20, 99);
  REQUIRE(a.size() == 20);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].temperature == b[i].temperature);
    CHECK(a[i].partial_densities == b[i].partial_densities);
    CHECK(a[i].temperature >= 273.0);
    CHECK(a[i].temperature <= 373.0);
    CHECK(a[i].volume_fraction >= 0.05);
    CHECK(a[i].volume_fraction <= 0.95);
    for (double r : a[i].partial_densities) {
      CHECK(r >= 1.0);
      CHECK(r <= 2000.0);
    }
  }
}

TEST_CASE("identity registry: names round-trip and tolerances are tiered") {
  for (auto idn : id::all_identities()) {
    CHECK(id::parse_identity(id::identity_name(idn)) == idn);
  }
  CHECK(id::registered_tolerance(id::IdentityId::A50_weighted_sum) == 1e-10);
  CHECK(id::registered_tolerance(id::IdentityId::A34_mu_difference) == 1e-10);
  CHECK(id::registered_tolerance(id::IdentityId::A10_pressure_two_forms) == 1e-6);
  CHECK_THROWS_AS(id::parse_identity("A99"), PreconditionError);
}

TEST_CASE("identity suite passes on P1 (30 states)") {
  const auto model = make_p1();
  const auto states = id::sample_states(model, 30, 42);
  for (auto idn : id::all_identities()) {
    if (!id::identity_applicable(idn, model)) continue;
    const auto rep = id::verify_identity(idn, model, states);
    INFO(id::identity_name(idn), " max_rel_error=", rep.max_rel_error);
    CHECK(rep.pass);
  }
}

TEST_CASE("identity suite passes on P2 (30 states)") {
  const auto model = make_p2();
  const auto states = id::sample_states(model, 30, 43);
  for (auto idn : id::all_identities()) {
    const auto rep = id::verify_identity(idn, model, states);
    INFO(id::identity_name(idn), " max_rel_error=", rep.max_rel_error);
    CHECK(rep.pass);
  }
}

TEST_CASE("identity suite passes on P3 (30 states)") {
  const auto model = make_p3(3);
  const auto states = id::sample_states(model, 30, 44);
  for (auto idn : id::all_identities()) {
    const auto rep = id::verify_identity(idn, model, states);
    INFO(id::identity_name(idn), " max_rel_error=", rep.max_rel_error);
    CHECK(rep.pass);
  }
}

TEST_CASE("A62 requires an incompressible-family model") {
  const auto p1 = make_p1();
  CHECK_FALSE(id::identity_applicable(id::IdentityId::A62_A64_dmu_dp_incompressible, p1));
  const auto states = id::sample_states(p1, 3, 5);
  CHECK_THROWS_AS(
      id::verify_identity(id::IdentityId::A62_A64_dmu_dp_incompressible, p1, states),
      PreconditionError);
}

TEST_CASE("A62 on P2: d mu^j / d p equals 1/rho0^j for every species") {
  const auto model = make_p2();
  const auto states = id::sample_states(model, 10, 46);
  const auto rep =
      id::verify_identity(id::IdentityId::A62_A64_dmu_dp_incompressible, model, states);
  CHECK(rep.pass);
  CHECK(rep.max_rel_error < 1e-6);
}

TEST_CASE("A34 FD cross-check: mu^j - mu^N equals the FD concentration slope") {
  // the registered check is analytic-vs-analytic; this one re-derives the
  // right side by finite differences
  const auto model = make_p2();
  for (const auto& s : id::sample_states(model, 8, 47)) {
    const auto fd = id::fd_partial([&](const MixtureState& t) { return model.psi(t); },
                                   id::StateVariable::ConcentrationFixedDensity, 0, s);
    const double lhs = thermo::chemical_potential(model, s, 0) -
                       thermo::chemical_potential(model, s, 2);
    CHECK(rel_diff(lhs, fd.value) < 1e-6);
  }
}

TEST_CASE("A46 holds to the registered tolerance on a P3 mixture") {
  const auto model = make_p3(3);
  const auto states = id::sample_states(model, 10, 48);
  const auto rep = id::verify_identity(id::IdentityId::A46_dg_dp, model, states);
  CHECK(rep.pass);
}
