#ifndef SWELLFLOW_FLOWLAWS_HPP
#define SWELLFLOW_FLOWLAWS_HPP

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swellflow/model.hpp"
#include "swellflow/thermo.hpp"

namespace swellflow::flowlaws {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Embeds a scalar gradient on the x axis (1-D problems pass scalars this way).
inline Vec3 xvec(double v) { return Vec3(v, 0.0, 0.0); }

/// Transport coefficients of the Darcy-type laws.
///
/// Units: resistivity R in Pa s/m^2 (R v is a force density), Fickian
/// mobility Q^j in s (Q grad mu is a velocity), hydration coefficient r^j in
/// N s/m^4 so that r^j Q^j grad mu is again a force density — the choice
/// that keeps every term of the laws dimensionally consistent.
struct FlowCoefficients {
  Mat3 resistivity = Mat3::Identity();
  std::vector<Mat3> fick_mobility;     // Q^j, one per species (empty -> zero)
  std::vector<double> hydration_coeff; // r^j, one per species (empty -> zero)

  Mat3 mobility(std::size_t j) const {
    return j < fick_mobility.size() ? fick_mobility[j] : Mat3::Zero();
  }
  double hydration(std::size_t j) const {
    return j < hydration_coeff.size() ? hydration_coeff[j] : 0.0;
  }
};

/// Local spatial gradients of the fields entering the flow laws, plus the
/// local values of the bulk map where those are in play.  Fill raw for unit
/// tests, or derive everything consistently from a state path.
struct LocalGradients {
  Vec3 grad_p = Vec3::Zero();        // vicinal pressure [Pa/m]
  Vec3 grad_eps = Vec3::Zero();      // volume fraction [1/m]
  Vec3 grad_rho = Vec3::Zero();      // total liquid density [kg/m^4]
  std::vector<Vec3> grad_conc;       // C^j [1/m]
  std::vector<Vec3> grad_mu;         // vicinal mu^j [J/(kg m)]
  Vec3 grad_gibbs = Vec3::Zero();    // G [J/(kg m)]
  Vec3 electric_field = Vec3::Zero();  // E = -grad phi [V/m]

  std::optional<Vec3> grad_bulk_pressure;             // p^B [Pa/m]
  std::optional<std::vector<Vec3>> grad_activity;     // a^{B_j} [1/m]
  std::optional<double> bulk_pressure;                // p^B at the point [Pa]
  std::optional<std::vector<double>> bulk_activities; // a^{B_j} at the point
};

enum class Formulation { Pressure, Gibbs, Potential, Bulk, SingleComponentBulk };
std::string formulation_name(Formulation);

/// Right-hand side R v^{l,s} of a Darcy formulation, with the named term
/// breakdown.  Terms that a formulation does not contain stay zero; the
/// breakdown always sums to `total` exactly.
struct DrivingForce {
  Vec3 total = Vec3::Zero();          // [N/m^3]
  Vec3 pressure = Vec3::Zero();
  Vec3 swelling = Vec3::Zero();
  Vec3 lorentz = Vec3::Zero();
  Vec3 hydration = Vec3::Zero();
  Vec3 concentration = Vec3::Zero();
  std::vector<std::string> warnings;
};

/// Charge density of the liquid phase, q_e = sum_j rho^j z^j [C/m^3].
double charge_density(const ConstitutiveModel&, const MixtureState&);

DrivingForce rhs(Formulation, const ConstitutiveModel&, const MixtureState&,
                 const LocalGradients&, const FlowCoefficients&);

/// v^{l,s} = R^{-1} total; resistivity must be symmetric positive definite.
Vec3 velocity(const FlowCoefficients&, const DrivingForce&);

/// Vicinal-pressure gradient magnitude that the swelling term can offset:
/// pi |grad eps| / eps [Pa/m].  Below it an opposing pressure gradient
/// cannot induce flow.
double threshold_gradient(const ConstitutiveModel&, const MixtureState&, const Vec3& grad_eps);

// ---------------------------------------------------------------------------
// Reductions to the two published target forms

struct DiluteParams {
  std::size_t solvent_index = 0;
  std::size_t cation_index = 0;
  std::size_t anion_index = 0;
  double dilute_mole_fraction_limit = 0.05;  // ions above this -> warning
  double raoult_tolerance = 0.01;            // |a^w - 1| above this -> warning
};

/// Homogenization-form law: -grad p^B - sum_{+,-} (n^j R T / a^j) grad a^j
/// per bulk-variable bookkeeping (moles of ion per bulk volume
/// n^j = eps rho^j / m^j).  Violated dilute/Raoult preconditions annotate
/// the result with warnings instead of failing.
DrivingForce reduce_moyne_murad(const ConstitutiveModel&, const MixtureState&,
                                const LocalGradients&, const DiluteParams&);

/// grad P_b = grad p - q_e E: the apparent bulk-phase pressure gradient
/// absorbs the Lorentz term.
Vec3 moyne_murad_bulk_pressure_gradient(const Vec3& grad_p, double charge_density,
                                        const Vec3& electric_field);

/// Modified van't Hoff closure pi_bar = R T phi (c+ + c-) + pi0 [Pa].
double huyghe_janssen_osmotic_pressure(double temperature, double osmotic_coefficient,
                                       double c_plus, double c_minus, double pi0);

/// Quadriphasic-form law, rigid kinematics (deformation tensor = identity):
/// eps v^{l,s} = -K [ grad(p - pi_bar) + n+ grad mu~+ + n- grad mu~- ].
/// Returned as the equivalent R v force (multiply bracket by -eps); the
/// per-mass convention uses rho^± as the ion weights.
DrivingForce reduce_huyghe_janssen(const ConstitutiveModel&, const MixtureState&,
                                   const LocalGradients&, double osmotic_coefficient, double pi0,
                                   std::size_t cation_index, std::size_t anion_index,
                                   const FlowCoefficients&);

// ---------------------------------------------------------------------------
// Gradient generation from a smooth 1-D state path

using StatePath = std::function<MixtureState(double)>;

/// All gradients (and bulk map values when `bulk` is given) at path point x,
/// by central differences with one Richardson level, so every field is
/// mutually consistent.
LocalGradients gradients_from_state_path(const ConstitutiveModel&, const StatePath&, double x,
                                         double h, const BulkReference* bulk = nullptr);

/// Plain two-point differences between two nearby states.
LocalGradients gradients_from_state_pair(const ConstitutiveModel&, const MixtureState& left,
                                         const MixtureState& right, double dx,
                                         const BulkReference* bulk = nullptr);

}  // namespace swellflow::flowlaws

#endif
