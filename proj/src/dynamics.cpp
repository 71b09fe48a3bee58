#include "waiterplan/dynamics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "waiterplan/rng.hpp"

namespace waiterplan {

namespace {

Vec3 base_acceleration(const RneaOptions& opts) {
  if (opts.base_accel) return *opts.base_accel;
  return opts.gravity ? Vec3(0.0, 0.0, kGravity) : Vec3::Zero();
}

void check_inputs(const ExtendedArmModel& model, Eigen::Index n, const char* who) {
  if (n != model.n_actuated()) {
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  }
}

}  // namespace

RneaResult rnea(const ExtendedArmModel& model,
                const std::vector<LinkParams>& params, const VecX& q,
                const VecX& qd, const VecX& qd_aux, const VecX& qdd_aux,
                const RneaOptions& opts) {
  check_inputs(model, q.size(), "rnea");
  if (qd.size() != q.size() || qd_aux.size() != q.size() ||
      qdd_aux.size() != q.size()) {
    throw std::invalid_argument("rnea: velocity/acceleration dimension mismatch");
  }
  if (params.size() != model.joints.size()) {
    throw std::invalid_argument("rnea: one parameter set per link required");
  }
  const int n_e = model.n_joints();

  std::vector<Mat3> R(n_e);    // R_j^{j-1}
  std::vector<Vec3> w(n_e), wa(n_e), wdot(n_e), F(n_e), N(n_e);

  // Forward pass. Frame-origin accelerations use the parent's velocities
  // (the joint origin is a point of the parent link); CoM terms use the
  // link's own velocities with the auxiliary velocity in the inner cross.
  Vec3 w_p = Vec3::Zero(), wa_p = Vec3::Zero(), wdot_p = Vec3::Zero();
  Vec3 a_p = base_acceleration(opts);
  Eigen::Index qi = 0;
  for (int j = 0; j < n_e; ++j) {
    const auto& joint = model.joints[j];
    const bool actuated = joint.kind == JointModel::Kind::revolute;
    const double qj = actuated ? q[qi] : 0.0;
    R[j] = joint.rotation_at(qj);
    const Mat3 Rt = R[j].transpose();
    const Vec3& p = joint.offset;

    const Vec3 a_frame =
        Rt * (a_p + wdot_p.cross(p) + w_p.cross(wa_p.cross(p)));
    Vec3 w_j = Rt * w_p;
    Vec3 wa_j = Rt * wa_p;
    Vec3 wdot_j = Rt * wdot_p;
    if (actuated) {
      const Vec3 zqd = joint.axis * qd[qi];
      w_j += zqd;
      wdot_j += wa_j.cross(zqd) + joint.axis * qdd_aux[qi];
      wa_j += joint.axis * qd_aux[qi];
      ++qi;
    }
    const Vec3& c = params[j].com;
    const Vec3 a_com = a_frame + wdot_j.cross(c) + w_j.cross(wa_j.cross(c));
    F[j] = params[j].mass * a_com;
    N[j] = params[j].inertia * wdot_j + wa_j.cross(params[j].inertia * w_j);

    w[j] = w_j;
    wa[j] = wa_j;
    wdot[j] = wdot_j;
    w_p = w_j;
    wa_p = wa_j;
    wdot_p = wdot_j;
    a_p = a_frame;
  }

  // Backward pass; the object joint has no successor wrench.
  RneaResult out;
  out.tau = VecX::Zero(model.n_actuated());
  out.wrenches.resize(n_e);
  Vec3 f_succ = Vec3::Zero(), n_succ = Vec3::Zero();
  qi = model.n_actuated() - 1;
  for (int j = n_e - 1; j >= 0; --j) {
    Vec3 f_j, n_j;
    if (j == n_e - 1) {
      f_j = F[j];
      n_j = N[j] + params[j].com.cross(F[j]);
    } else {
      const Mat3& R_next = R[j + 1];  // frame j+1 -> j
      const Vec3 rotated = R_next * f_succ;
      f_j = rotated + F[j];
      n_j = R_next * n_succ + params[j].com.cross(F[j]) +
            model.joints[j + 1].offset.cross(rotated) + N[j];
    }
    out.wrenches[j] = {f_j, n_j, j};
    if (model.joints[j].kind == JointModel::Kind::revolute) {
      out.tau[qi--] = model.joints[j].axis.dot(n_j);
    }
    f_succ = f_j;
    n_succ = n_j;
  }
  return out;
}

RneaResult rnea(const ExtendedArmModel& model, const VecX& q, const VecX& qd,
                const VecX& qd_aux, const VecX& qdd_aux,
                const RneaOptions& opts) {
  return rnea(model, model.nominal, q, qd, qd_aux, qdd_aux, opts);
}

MatX mass_matrix(const ExtendedArmModel& model, const VecX& q,
                 const std::vector<LinkParams>& params) {
  const int n = model.n_actuated();
  const VecX zero = VecX::Zero(n);
  MatX M(n, n);
  RneaOptions opts;
  opts.gravity = false;
  for (int j = 0; j < n; ++j) {
    VecX ej = VecX::Zero(n);
    ej[j] = 1.0;
    M.col(j) = rnea(model, params, q, zero, zero, ej, opts).tau;
  }
  return M;
}

MatX mass_matrix(const ExtendedArmModel& model, const VecX& q) {
  return mass_matrix(model, q, model.nominal);
}

VecX bias_torque(const ExtendedArmModel& model,
                 const std::vector<LinkParams>& params, const VecX& q,
                 const VecX& qd, const RneaOptions& opts) {
  const VecX zero = VecX::Zero(q.size());
  return rnea(model, params, q, qd, qd, zero, opts).tau;
}

std::vector<LinkParams> sample_params(const ExtendedArmModel& model, Rng& rng) {
  std::vector<LinkParams> out(model.joints.size());
  for (size_t j = 0; j < model.joints.size(); ++j) {
    const auto& iv = model.interval[j];
    out[j].mass = rng.uniform(iv.mass.lo_scalar(), iv.mass.hi_scalar());
    for (int d = 0; d < 3; ++d) {
      out[j].com[d] = rng.uniform(iv.com.lo()(d, 0), iv.com.hi()(d, 0));
    }
    Mat3 I;
    for (int r = 0; r < 3; ++r) {
      for (int c = r; c < 3; ++c) {
        I(r, c) = rng.uniform(iv.inertia.lo()(r, c), iv.inertia.hi()(r, c));
        I(c, r) = I(r, c);
      }
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(I);
    if (eig.eigenvalues().minCoeff() < -1e-12) {
      throw std::runtime_error("sample_params: sampled inertia tensor not PSD");
    }
    out[j].inertia = I;
  }
  return out;
}

namespace {

double sampled_eigen_extreme(const ExtendedArmModel& model, int n_samples,
                             uint64_t seed, bool want_min) {
  if (n_samples < 1) throw std::invalid_argument("sigma estimate: n_samples < 1");
  Rng rng(seed);
  double extreme = want_min ? std::numeric_limits<double>::infinity()
                            : -std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    const VecX q = rng.uniform_vec(model.q_lo, model.q_hi);
    const auto params = sample_params(model, rng);
    const MatX M = mass_matrix(model, q, params);
    Eigen::SelfAdjointEigenSolver<MatX> eig(M);
    const double v =
        want_min ? eig.eigenvalues().minCoeff() : eig.eigenvalues().maxCoeff();
    extreme = want_min ? std::min(extreme, v) : std::max(extreme, v);
  }
  return extreme;
}

}  // namespace

double estimate_sigma_m(const ExtendedArmModel& model, int n_samples,
                        uint64_t seed) {
  return sampled_eigen_extreme(model, n_samples, seed, true);
}

double estimate_sigma_max(const ExtendedArmModel& model, int n_samples,
                          uint64_t seed) {
  return sampled_eigen_extreme(model, n_samples, seed, false);
}

namespace {

// Slot layout of inertial indeterminates within one link: mass, com x..z,
// then the six distinct inertia entries.
constexpr uint32_t kSlotsPerLink = 16;

}  // namespace

VarId inertial_param_var(uint32_t link, uint32_t slot) {
  if (slot >= kSlotsPerLink) {
    throw std::invalid_argument("inertial_param_var: slot out of range");
  }
  return inertial_var(link * kSlotsPerLink + slot);
}

void assign_inertial_coords(const ExtendedArmModel& model,
                            const std::vector<LinkParams>& sample,
                            Assignment* assignment) {
  if (sample.size() != model.joints.size()) {
    throw std::invalid_argument("assign_inertial_coords: link count mismatch");
  }
  auto coord = [](double value, double center, double radius) {
    return std::max(-1.0, std::min(1.0, (value - center) / radius));
  };
  for (size_t j = 0; j < sample.size(); ++j) {
    const auto& iv = model.interval[j];
    const auto link = static_cast<uint32_t>(j);
    if (iv.mass.radius()(0, 0) > 0.0) {
      assignment->set(inertial_param_var(link, 0),
                      coord(sample[j].mass, iv.mass.center()(0, 0),
                            iv.mass.radius()(0, 0)));
    }
    for (int d = 0; d < 3; ++d) {
      const double r = iv.com.radius()(d, 0);
      if (r > 0.0) {
        assignment->set(inertial_param_var(link, 1 + static_cast<uint32_t>(d)),
                        coord(sample[j].com[d], iv.com.center()(d, 0), r));
      }
    }
    uint32_t slot = 4;
    for (int r = 0; r < 3; ++r) {
      for (int c = r; c < 3; ++c, ++slot) {
        const double rad = iv.inertia.radius()(r, c);
        if (rad > 0.0) {
          assignment->set(inertial_param_var(link, slot),
                          coord(sample[j].inertia(r, c),
                                iv.inertia.center()(r, c), rad));
        }
      }
    }
  }
}

namespace {

PolyZonotope lift_symmetric_inertia(const Interval& iv, uint32_t link) {
  std::vector<Term> terms;
  const MatX c = iv.center();
  const MatX r = iv.radius();
  terms.push_back({c, Monomial::one()});
  uint32_t slot = 4;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j, ++slot) {
      if (r(i, j) > 0.0) {
        MatX g = MatX::Zero(3, 3);
        g(i, j) = r(i, j);
        g(j, i) = r(i, j);
        terms.push_back({g, Monomial::var(inertial_param_var(link, slot))});
      }
    }
  }
  return PolyZonotope::from_terms(3, 3, std::move(terms));
}

}  // namespace

std::vector<LinkParamsPz> lift_params_nominal(const ExtendedArmModel& model) {
  std::vector<LinkParamsPz> out(model.joints.size());
  for (size_t j = 0; j < model.joints.size(); ++j) {
    out[j].mass = PolyZonotope(model.nominal[j].mass);
    out[j].com = PolyZonotope::constant(MatX(model.nominal[j].com));
    out[j].inertia = PolyZonotope::constant(MatX(model.nominal[j].inertia));
  }
  return out;
}

std::vector<LinkParamsPz> lift_params_interval(const ExtendedArmModel& model) {
  std::vector<LinkParamsPz> out(model.joints.size());
  for (size_t j = 0; j < model.joints.size(); ++j) {
    const auto& iv = model.interval[j];
    const auto link = static_cast<uint32_t>(j);
    out[j].mass = PolyZonotope::from_interval(iv.mass,
                                              {inertial_param_var(link, 0)});
    out[j].com = PolyZonotope::from_interval(
        iv.com, {inertial_param_var(link, 1), inertial_param_var(link, 2),
                 inertial_param_var(link, 3)});
    out[j].inertia = lift_symmetric_inertia(iv.inertia, link);
  }
  return out;
}

PzRneaResult pz_rnea(const ExtendedArmModel& model,
                     const std::vector<PolyZonotope>& q,
                     const std::vector<PolyZonotope>& qd,
                     const std::vector<PolyZonotope>& qd_aux,
                     const std::vector<PolyZonotope>& qdd_aux,
                     const std::vector<LinkParamsPz>& params,
                     const RneaOptions& opts, int max_terms) {
  check_inputs(model, static_cast<Eigen::Index>(q.size()), "pz_rnea");
  if (qd.size() != q.size() || qd_aux.size() != q.size() ||
      qdd_aux.size() != q.size()) {
    throw std::invalid_argument("pz_rnea: velocity/acceleration count mismatch");
  }
  if (params.size() != model.joints.size()) {
    throw std::invalid_argument("pz_rnea: one parameter set per link required");
  }
  const int n_e = model.n_joints();
  auto reduce = [max_terms](const PolyZonotope& p) { return p.reduce(max_terms); };
  auto vec_const = [](const Vec3& v) { return PolyZonotope::constant(MatX(v)); };

  std::vector<PolyZonotope> R(n_e, PolyZonotope(3, 3));
  std::vector<PolyZonotope> w(n_e, PolyZonotope(3, 1));
  std::vector<PolyZonotope> wa(n_e, PolyZonotope(3, 1));
  std::vector<PolyZonotope> F(n_e, PolyZonotope(3, 1));
  std::vector<PolyZonotope> N(n_e, PolyZonotope(3, 1));

  PolyZonotope w_p = PolyZonotope::constant(MatX(Vec3::Zero()));
  PolyZonotope wa_p = w_p, wdot_p = w_p;
  PolyZonotope a_p = vec_const(base_acceleration(opts));

  size_t qi = 0;
  for (int j = 0; j < n_e; ++j) {
    const auto& joint = model.joints[j];
    const bool actuated = joint.kind == JointModel::Kind::revolute;
    R[j] = actuated ? joint_rotation_pz(joint, q[qi], max_terms)
                    : PolyZonotope::constant(MatX(joint.rotation));
    const PolyZonotope Rt = R[j].transpose();
    const PolyZonotope p = vec_const(joint.offset);

    PolyZonotope a_frame = reduce(
        Rt * (a_p + PolyZonotope::cross(wdot_p, p) +
              PolyZonotope::cross(w_p, PolyZonotope::cross(wa_p, p))));
    PolyZonotope w_j = reduce(Rt * w_p);
    PolyZonotope wa_j = reduce(Rt * wa_p);
    PolyZonotope wdot_j = reduce(Rt * wdot_p);
    if (actuated) {
      const PolyZonotope z = vec_const(joint.axis);
      const PolyZonotope zqd = qd[qi] * z;
      w_j = reduce(w_j + zqd);
      wdot_j = reduce(wdot_j + PolyZonotope::cross(wa_j, zqd) + qdd_aux[qi] * z);
      wa_j = reduce(wa_j + qd_aux[qi] * z);
      ++qi;
    }
    const PolyZonotope& c = params[j].com;
    const PolyZonotope a_com = reduce(
        a_frame + PolyZonotope::cross(wdot_j, c) +
        PolyZonotope::cross(w_j, PolyZonotope::cross(wa_j, c)));
    F[j] = reduce(params[j].mass * a_com);
    N[j] = reduce(params[j].inertia * wdot_j +
                  PolyZonotope::cross(wa_j, params[j].inertia * w_j));

    w[j] = w_j;
    wa[j] = wa_j;
    w_p = w_j;
    wa_p = wa_j;
    wdot_p = wdot_j;
    a_p = a_frame;
  }

  PzRneaResult out;
  out.tau.resize(model.n_actuated(), PolyZonotope(1, 1));
  out.wrenches.force.resize(n_e, PolyZonotope(3, 1));
  out.wrenches.moment.resize(n_e, PolyZonotope(3, 1));
  PolyZonotope f_succ = PolyZonotope::constant(MatX(Vec3::Zero()));
  PolyZonotope n_succ = f_succ;
  int ti = model.n_actuated() - 1;
  for (int j = n_e - 1; j >= 0; --j) {
    PolyZonotope f_j(3, 1), n_j(3, 1);
    if (j == n_e - 1) {
      f_j = F[j];
      n_j = reduce(N[j] + PolyZonotope::cross(params[j].com, F[j]));
    } else {
      const PolyZonotope rotated = reduce(R[j + 1] * f_succ);
      f_j = reduce(rotated + F[j]);
      n_j = reduce(R[j + 1] * n_succ +
                   PolyZonotope::cross(params[j].com, F[j]) +
                   PolyZonotope::cross(vec_const(model.joints[j + 1].offset),
                                       rotated) +
                   N[j]);
    }
    out.wrenches.force[j] = f_j;
    out.wrenches.moment[j] = n_j;
    if (model.joints[j].kind == JointModel::Kind::revolute) {
      out.tau[ti--] = PolyZonotope::constant(
                          MatX(model.joints[j].axis.transpose())) *
                      n_j;
    }
    f_succ = f_j;
    n_succ = n_j;
  }
  return out;
}

}  // namespace waiterplan
