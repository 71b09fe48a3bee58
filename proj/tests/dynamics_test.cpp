#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <cmath>

#include "support.hpp"

using namespace waiterplan;
using namespace waiterplan::testing;

namespace {

// Single revolute joint about z with one lumped mass.
ExtendedArmModel single_link(double mass, const Vec3& com, const Mat3& inertia) {
  ExtendedArmModel m;
  JointModel j;
  j.kind = JointModel::Kind::revolute;
  j.axis = Vec3::UnitZ();
  j.offset = Vec3::Zero();
  m.joints = {j};
  m.nominal = {{mass, com, inertia}};
  LinkParamsInterval iv;
  iv.mass = Interval(mass, mass);
  iv.com = Interval::point(MatX(com));
  iv.inertia = Interval::point(MatX(inertia));
  m.interval = {iv};
  m.link_volumes = {Zonotope::point(com)};
  m.q_lo = VecX::Constant(1, -M_PI);
  m.q_hi = VecX::Constant(1, M_PI);
  m.qd_lo = VecX::Constant(1, -2.0);
  m.qd_hi = VecX::Constant(1, 2.0);
  m.validate();
  return m;
}

std::vector<PolyZonotope> point_pzs(const VecX& v) {
  std::vector<PolyZonotope> out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out.emplace_back(v[i]);
  return out;
}

}  // namespace

TEST_CASE("static single link") {
  const double m = 1.3, cx = 0.21;
  auto model = single_link(m, Vec3(cx, 0, 0), 0.01 * Mat3::Identity());
  const VecX zero = VecX::Zero(1);
  const auto res = rnea(model, zero, zero, zero, zero);

  // Gravity about a z joint produces no torque about the axis; the bending
  // moment matches the statics m g c_x about the y axis.
  CHECK(res.tau[0] == doctest::Approx(0.0));
  CHECK(std::abs(res.wrenches[0].moment.y()) ==
        doctest::Approx(m * kGravity * cx));
  CHECK(res.wrenches[0].force.z() == doctest::Approx(m * kGravity));
}

TEST_CASE("object at rest carries exactly its weight") {
  auto model = desk_arm();
  const VecX zero = VecX::Zero(3);
  const auto res = rnea(model, zero, zero, zero, zero);
  const Wrench& w = res.wrenches.back();
  CHECK(w.force.x() == doctest::Approx(0.0));
  CHECK(w.force.y() == doctest::Approx(0.0));
  CHECK(w.force.z() == doctest::Approx(0.172 * kGravity));
  CHECK(w.moment.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("rnea equals the mass-matrix assembly") {
  auto model = desk_arm();
  Rng rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const VecX q = rng.uniform_vec(model.q_lo, model.q_hi);
    const VecX qd = rng.symmetric_vec(3);
    const VecX qdd = rng.symmetric_vec(3);
    const MatX M = mass_matrix(model, q);
    CHECK((M - M.transpose()).cwiseAbs().maxCoeff() < 1e-10);
    const VecX bias = bias_torque(model, model.nominal, q, qd);
    const VecX tau = rnea(model, q, qd, qd, qdd).tau;
    CHECK((M * qdd + bias - tau).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("planar pendulum mass matrix is exact") {
  const double m = 0.7, lc = 0.4, izz = 0.013;
  Mat3 I = Mat3::Zero();
  I(2, 2) = izz;
  auto model = single_link(m, Vec3(lc, 0, 0), I);
  Rng rng(62);
  for (int trial = 0; trial < 50; ++trial) {
    const VecX q = rng.uniform_vec(model.q_lo, model.q_hi);
    const MatX M = mass_matrix(model, q);
    CHECK(M(0, 0) == doctest::Approx(m * lc * lc + izz));
  }
  // sigma_m is configuration-independent here.
  CHECK(estimate_sigma_m(model, 50, 3) == doctest::Approx(m * lc * lc + izz));
}

TEST_CASE("sigma_m estimate is seed-stable") {
  auto model = desk_arm();
  const double a = estimate_sigma_m(model, 30000, 1);
  const double b = estimate_sigma_m(model, 30000, 2);
  CHECK(a == doctest::Approx(b).epsilon(5e-3));
  CHECK(estimate_sigma_m(model, 30000, 1) == a);  // deterministic per seed
  CHECK(estimate_sigma_max(model, 1000, 1) > a);
}

TEST_CASE("non psd inertia samples are rejected") {
  auto model = desk_arm();
  Mat3 lo = -1e-3 * Mat3::Identity();
  Mat3 hi = -1e-4 * Mat3::Identity();
  model.interval[3].inertia = Interval(MatX(lo), MatX(hi));
  model.nominal[3].inertia = -5e-4 * Mat3::Identity();
  Rng rng(63);
  CHECK_THROWS_AS(sample_params(model, rng), std::runtime_error);
}

TEST_CASE("pz rnea degenerates to rnea on point inputs") {
  auto model = desk_arm();
  Rng rng(64);
  const VecX q = rng.uniform_vec(model.q_lo, model.q_hi);
  const VecX qd = rng.symmetric_vec(3);
  const VecX qda = rng.symmetric_vec(3);
  const VecX qdda = rng.symmetric_vec(3);
  const auto truth = rnea(model, q, qd, qda, qdda);
  const auto pz = pz_rnea(model, point_pzs(q), point_pzs(qd), point_pzs(qda),
                          point_pzs(qdda), lift_params_nominal(model));
  for (int j = 0; j < model.n_joints(); ++j) {
    CHECK((pz.wrenches.force[j].center() - MatX(truth.wrenches[j].force))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
    CHECK(pz.wrenches.force[j].bounds().radius().maxCoeff() < 1e-10);
    CHECK((pz.wrenches.moment[j].center() - MatX(truth.wrenches[j].moment))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
  for (int j = 0; j < 3; ++j) {
    CHECK(pz.tau[j].center_scalar() == doctest::Approx(truth.tau[j]));
  }
}

TEST_CASE("mass-only uncertainty scales the static weight linearly") {
  auto model = desk_arm();
  const double m_lo = model.interval[3].mass.lo_scalar();
  const double m_hi = model.interval[3].mass.hi_scalar();
  const VecX zero = VecX::Zero(3);
  const auto pz =
      pz_rnea(model, point_pzs(zero), point_pzs(zero), point_pzs(zero),
              point_pzs(zero), lift_params_interval(model));
  const Interval fz = pz.wrenches.object_force().entry(2).bounds();
  CHECK(fz.lo_scalar() == doctest::Approx(m_lo * kGravity).epsilon(1e-9));
  CHECK(fz.hi_scalar() == doctest::Approx(m_hi * kGravity).epsilon(1e-9));
}

TEST_CASE("each uncertain parameter keeps one indeterminate") {
  auto model = desk_arm();
  const VecX zero = VecX::Zero(3);
  const auto pz =
      pz_rnea(model, point_pzs(zero), point_pzs(zero), point_pzs(zero),
              point_pzs(zero), lift_params_interval(model));
  // Slicing the cup mass at +-1 shifts the static weight to its endpoints.
  const auto mass_id = inertial_param_var(3, 0);
  const auto fz = pz.wrenches.object_force().entry(2);
  const auto at_hi = fz.slice(mass_id, 1.0);
  const auto at_lo = fz.slice(mass_id, -1.0);
  CHECK(at_hi.center_scalar() ==
        doctest::Approx(model.interval[3].mass.hi_scalar() * kGravity));
  CHECK(at_lo.center_scalar() ==
        doctest::Approx(model.interval[3].mass.lo_scalar() * kGravity));
  CHECK(at_hi.bounds().radius().maxCoeff() < 1e-10);
}

TEST_CASE("pz rnea contains sampled dynamics") {
  auto model = desk_arm();
  Rng rng(65);
  // Kinematic sets: a box around a configuration per joint plus the
  // interval inertial parameters.
  const VecX q0 = 0.3 * rng.symmetric_vec(3);
  const VecX qd0 = 0.2 * rng.symmetric_vec(3);
  std::vector<PolyZonotope> q_pz, qd_pz, qda_pz, qdda_pz;
  for (uint32_t j = 0; j < 3; ++j) {
    q_pz.push_back(PolyZonotope::scalar_var(q0[j], 0.03, param_var(j)));
    qd_pz.push_back(PolyZonotope::scalar_var(qd0[j], 0.05, pos_error_var(j)));
    qda_pz.push_back(PolyZonotope::scalar_var(qd0[j], 0.05, pos_error_var(j)));
    qdda_pz.push_back(PolyZonotope::scalar_var(0.0, 0.4, vel_error_var(j)));
  }
  const auto pz = pz_rnea(model, q_pz, qd_pz, qda_pz, qdda_pz,
                          lift_params_interval(model));

  for (int s = 0; s < 1000; ++s) {
    const VecX xq = rng.symmetric_vec(3);
    const VecX xv = rng.symmetric_vec(3);
    const VecX xa = rng.symmetric_vec(3);
    const auto params = sample_params(model, rng);
    Assignment asg;
    for (uint32_t j = 0; j < 3; ++j) {
      asg.set(param_var(j), xq[j]);
      asg.set(pos_error_var(j), xv[j]);
      asg.set(vel_error_var(j), xa[j]);
    }
    assign_inertial_coords(model, params, &asg);
    const VecX q = q0 + 0.03 * xq;
    const VecX qd = qd0 + 0.05 * xv;
    const VecX qdda = 0.4 * xa;
    const auto truth = rnea(model, params, q, qd, qd, qdda);
    for (int j = 0; j < model.n_joints(); ++j) {
      CHECK(pz.wrenches.force[j].contains(MatX(truth.wrenches[j].force), asg,
                                          1e-9));
      CHECK(pz.wrenches.moment[j].contains(MatX(truth.wrenches[j].moment), asg,
                                           1e-9));
    }
    for (int j = 0; j < 3; ++j) {
      CHECK(pz.tau[j].contains(MatX::Constant(1, 1, truth.tau[j]), asg, 1e-9));
    }
  }
}

TEST_CASE("gravity toggle and base acceleration") {
  auto model = desk_arm();
  const VecX zero = VecX::Zero(3);
  RneaOptions off;
  off.gravity = false;
  const auto res = rnea(model, zero, zero, zero, zero, off);
  CHECK(res.tau.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(res.wrenches.back().force.cwiseAbs().maxCoeff() < 1e-12);

  RneaOptions accel;
  accel.base_accel = Vec3(1.0, 0.0, kGravity);
  const auto pushed = rnea(model, zero, zero, zero, zero, accel);
  CHECK(pushed.wrenches.back().force.x() == doctest::Approx(0.172 * 1.0));
  CHECK(pushed.wrenches.back().force.z() == doctest::Approx(0.172 * kGravity));
}
