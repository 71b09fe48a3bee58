#include "waiterplan/controller.hpp"

#include <cmath>
#include <stdexcept>

namespace waiterplan {

void ControllerConfig::validate() const {
  if (Kr.size() == 0 || (Kr.array() <= 0).any()) {
    throw std::invalid_argument("controller: Kr must be positive");
  }
  if (!(V_M >= 0) || !(alpha_c > 0) || !(sigma_m > 0) || !(sigma_M > 0)) {
    throw std::invalid_argument("controller: nonpositive configuration value");
  }
  if (sigma_m > sigma_M) {
    throw std::invalid_argument("controller: sigma_m > sigma_M");
  }
}

TrackingBounds tracking_bounds(const ControllerConfig& cfg) {
  cfg.validate();
  TrackingBounds out;
  out.eps = std::sqrt(2.0 * cfg.V_M / cfg.sigma_m);
  out.eps_p = out.eps * cfg.Kr.cwiseInverse();
  out.eps_v = 2.0 * out.eps;
  return out;
}

namespace {

struct ModifiedRefs {
  VecX e, ed, r, qd_aux, qdd_aux;
};

ModifiedRefs modified_refs(const JointState& state, const DesiredState& desired,
                           const VecX& Kr) {
  ModifiedRefs out;
  out.e = desired.q - state.q;
  out.ed = desired.qd - state.qd;
  out.r = out.ed + Kr.cwiseProduct(out.e);
  out.qd_aux = desired.qd + Kr.cwiseProduct(out.e);
  out.qdd_aux = desired.qdd + Kr.cwiseProduct(out.ed);
  return out;
}

std::vector<PolyZonotope> to_point_pzs(const VecX& v) {
  std::vector<PolyZonotope> out;
  out.reserve(static_cast<size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) out.emplace_back(v[i]);
  return out;
}

}  // namespace

VecX nominal_input(const ExtendedArmModel& model, const JointState& state,
                   const DesiredState& desired, const VecX& Kr,
                   const std::vector<LinkParams>& nominal_params) {
  const auto refs = modified_refs(state, desired, Kr);
  return rnea(model, nominal_params, state.q, state.qd, refs.qd_aux,
              refs.qdd_aux)
      .tau;
}

VecX disturbance_measure(const ExtendedArmModel& model, const JointState& state,
                         const DesiredState& desired, const VecX& Kr,
                         const std::vector<LinkParams>& nominal_params,
                         const std::vector<LinkParamsPz>& interval_params) {
  const auto refs = modified_refs(state, desired, Kr);
  const VecX tau0 = rnea(model, nominal_params, state.q, state.qd, refs.qd_aux,
                         refs.qdd_aux)
                        .tau;
  const auto tau_int =
      pz_rnea(model, to_point_pzs(state.q), to_point_pzs(state.qd),
              to_point_pzs(refs.qd_aux), to_point_pzs(refs.qdd_aux),
              interval_params);
  VecX rho(tau0.size());
  for (Eigen::Index j = 0; j < tau0.size(); ++j) {
    const Interval w =
        tau_int.tau[static_cast<size_t>(j)].bounds() - Interval::point(tau0[j]);
    rho[j] = std::max(std::abs(w.lo_scalar()), std::abs(w.hi_scalar()));
  }
  return rho;
}

VecX robust_input(const ControllerConfig& cfg, const VecX& r, const VecX& rho) {
  const double r_norm = r.norm();
  if (r_norm < 1e-12) return VecX::Zero(r.size());
  const double headroom = cfg.V_M - 0.5 * cfg.sigma_M * r_norm * r_norm;
  const double gamma =
      std::max(0.0, (-cfg.alpha_c * headroom + r.cwiseAbs().dot(rho)) / r_norm);
  return (-gamma / r_norm) * r;
}

VecX control_step(const ExtendedArmModel& model, const ControllerConfig& cfg,
                  const JointState& state, const DesiredState& desired,
                  const std::vector<LinkParams>& nominal_params,
                  const std::vector<LinkParamsPz>& interval_params,
                  ControlDiagnostics* diag) {
  const auto refs = modified_refs(state, desired, cfg.Kr);
  const VecX tau = nominal_input(model, state, desired, cfg.Kr, nominal_params);
  const VecX rho = disturbance_measure(model, state, desired, cfg.Kr,
                                       nominal_params, interval_params);
  const VecX v = robust_input(cfg, refs.r, rho);
  if (diag != nullptr) {
    diag->tau = tau;
    diag->v = v;
    diag->r = refs.r;
    diag->e = refs.e;
    diag->ed = refs.ed;
    diag->rho = rho;
  }
  return tau - v;
}

}  // namespace waiterplan
