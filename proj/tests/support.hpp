#pragma once

#include <vector>

#include "waiterplan/planner.hpp"
#include "waiterplan/rng.hpp"

namespace waiterplan::testing {

/// Random sparse PZ over the given indeterminates (column vector shape).
inline PolyZonotope random_pz(Rng& rng, int dim, const std::vector<VarId>& vars,
                              int n_terms, int max_degree = 3,
                              double scale = 1.0) {
  std::vector<Term> terms;
  terms.push_back({scale * MatX::Random(dim, 1).eval(), Monomial::one()});
  for (int t = 0; t < n_terms; ++t) {
    Monomial mono = Monomial::one();
    const int n_factors = 1 + rng.uniform_int(2);
    for (int f = 0; f < n_factors; ++f) {
      const auto& id = vars[static_cast<size_t>(rng.uniform_int(
          static_cast<int>(vars.size())))];
      mono = mono.times(
          Monomial::var(id, 1 + static_cast<uint32_t>(rng.uniform_int(max_degree))));
    }
    MatX coeff(dim, 1);
    for (int d = 0; d < dim; ++d) coeff(d, 0) = scale * rng.symmetric();
    terms.push_back({std::move(coeff), std::move(mono)});
  }
  return PolyZonotope::from_terms(dim, 1, std::move(terms));
}

inline Assignment random_assignment(Rng& rng, const std::vector<VarId>& vars) {
  Assignment asg;
  for (const auto& id : vars) asg.set(id, rng.symmetric());
  return asg;
}

inline std::vector<VarId> test_vars(int n) {
  std::vector<VarId> vars;
  for (int i = 0; i < n; ++i) {
    vars.push_back(param_var(static_cast<uint32_t>(i)));
  }
  return vars;
}

inline Zonotope box_zonotope(const Vec3& center, const Vec3& half) {
  MatX gens = MatX::Zero(3, 3);
  gens(0, 0) = half.x();
  gens(1, 1) = half.y();
  gens(2, 2) = half.z();
  return Zonotope(center, gens);
}

inline Interval scaled_interval(double nominal, double fraction) {
  const double r = std::abs(nominal) * fraction;
  return Interval(nominal - r, nominal + r);
}

inline Interval scaled_interval(const Mat3& nominal, double fraction) {
  const MatX r = fraction * nominal.cwiseAbs();
  return Interval(MatX(nominal) - r, MatX(nominal) + r);
}

/// Three-joint desk arm with a tray merged into the last link and a cup as
/// the object link; mass/inertia of the cup uncertain by +-5%.
inline ExtendedArmModel desk_arm(double uncertainty = 0.05) {
  ExtendedArmModel m;

  JointModel j1;
  j1.kind = JointModel::Kind::revolute;
  j1.axis = Vec3::UnitZ();
  j1.offset = Vec3(0.0, 0.0, 0.30);
  JointModel j2;
  j2.kind = JointModel::Kind::revolute;
  j2.axis = Vec3::UnitY();
  j2.offset = Vec3(0.0, 0.0, 0.10);
  JointModel j3;
  j3.kind = JointModel::Kind::revolute;
  j3.axis = Vec3::UnitY();
  j3.offset = Vec3(0.30, 0.0, 0.0);
  JointModel jo;  // cup contact point on the tray
  jo.kind = JointModel::Kind::fixed;
  jo.offset = Vec3(0.25, 0.0, 0.08);
  m.joints = {j1, j2, j3, jo};

  LinkParams l1{2.0, Vec3(0.0, 0.0, 0.05),
                Vec3(0.02, 0.02, 0.01).asDiagonal()};
  LinkParams l2{1.5, Vec3(0.15, 0.0, 0.0),
                Vec3(0.005, 0.02, 0.02).asDiagonal()};
  LinkParams l3{0.8, Vec3(0.12, 0.0, 0.01),
                Vec3(0.002, 0.01, 0.01).asDiagonal()};  // includes the tray
  LinkParams cup{0.172, Vec3(0.0, 0.0, 0.03),
                 Vec3(1.2e-4, 1.2e-4, 1.4e-4).asDiagonal()};
  m.nominal = {l1, l2, l3, cup};

  auto exact = [](const LinkParams& p) {
    LinkParamsInterval iv;
    iv.mass = Interval(p.mass, p.mass);
    iv.com = Interval::point(MatX(p.com));
    iv.inertia = Interval::point(MatX(p.inertia));
    return iv;
  };
  LinkParamsInterval cup_iv;
  cup_iv.mass = scaled_interval(cup.mass, uncertainty);
  cup_iv.com = Interval::point(MatX(cup.com));
  cup_iv.inertia = scaled_interval(cup.inertia, uncertainty);
  m.interval = {exact(l1), exact(l2), exact(l3), cup_iv};

  m.link_volumes = {
      box_zonotope(Vec3(0.0, 0.0, 0.05), Vec3(0.03, 0.03, 0.05)),
      box_zonotope(Vec3(0.15, 0.0, 0.0), Vec3(0.15, 0.03, 0.03)),
      box_zonotope(Vec3(0.125, 0.0, 0.02), Vec3(0.125, 0.08, 0.04)),
      box_zonotope(Vec3(0.0, 0.0, 0.04), Vec3(0.03, 0.03, 0.04)),
  };

  m.q_lo = VecX::Constant(3, -M_PI);
  m.q_hi = VecX::Constant(3, M_PI);
  m.qd_lo = VecX::Constant(3, -2.0);
  m.qd_hi = VecX::Constant(3, 2.0);
  m.validate();
  return m;
}

inline ContactModel desk_contact() {
  ContactModel cm;
  cm.mu_s = 0.36;
  cm.radius = 0.04;
  cm.normal = Vec3::UnitZ();
  return cm;
}

inline Scenario desk_scenario() {
  Scenario scn;
  scn.model = desk_arm();
  scn.contact = desk_contact();
  scn.q_start = VecX::Zero(3);
  scn.q_goal = (VecX(3) << 0.12, -0.08, 0.10).finished();
  scn.dt = 0.05;
  scn.t_plan = 1.0;
  scn.t_fin = 2.0;
  scn.eta1 = VecX::Constant(3, M_PI / 72.0);
  scn.controller.Kr = VecX::Constant(3, 4.0);
  scn.controller.V_M = 4.0e-5;
  scn.controller.alpha_c = 1.0;
  scn.controller.sigma_m = estimate_sigma_m(scn.model, 400, 7);
  scn.controller.sigma_M = 1.5 * estimate_sigma_max(scn.model, 400, 7);
  scn.bounds = tracking_bounds(scn.controller);
  scn.solver.seed = 1;
  return scn;
}

}  // namespace waiterplan::testing
